#include "cmss/pandora_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "cmss/stats.hpp"

namespace cmss {

namespace {

struct PathAccumulator {
  int n = 0;
  int num_constraints = 0;
  const EvalOptions* opt = nullptr;
  EvalResult res;
  // MC accumulators
  RunningStat utility_stat, alt_stat;
  std::vector<RunningStat> slack_stats;

  void init(const ExecInstance& inst, const EvalOptions& options) {
    opt = &options;
    n = static_cast<int>(inst.boxes.size());
    num_constraints = options.constraints ? static_cast<int>(options.constraints->size()) : 0;
    if (num_constraints > 0 && !options.instance)
      throw std::invalid_argument("evaluate: constraints require the original instance");
    res.select_prob.assign(n, 0.0);
    res.inspect_prob.assign(n, 0.0);
    res.slack.assign(num_constraints, 0.0);
    res.slack_stderr.assign(num_constraints, 0.0);
    slack_stats.resize(num_constraints);
  }

  // lhs of constraint c along one path
  double path_lhs(const AffineConstraint& c, const SearchOutcome& out, const Realization& real) const {
    double lhs = 0.0;
    for (int i = 0; i < n; ++i) {
      if (out.selected[i]) lhs += c.theta_sel[i].at(real.atom[i]);
      if (out.inspected[i]) lhs += c.theta_insp[i].at(real.atom[i]);
    }
    return lhs;
  }

  double path_alt_utility(const SearchOutcome& out, const Realization& real,
                          const ExecInstance& inst) const {
    if (!opt->alt_values) return out.net_utility;
    double u = 0.0;
    for (int i = 0; i < n; ++i) {
      if (out.selected[i]) u += (*opt->alt_values)[i][real.atom[i]];
      if (out.inspected[i]) u -= inst.boxes[i].orig_cost;
    }
    return u;
  }

  void add_weighted(const SearchOutcome& out, const Realization& real, const ExecInstance& inst, double w) {
    for (int i = 0; i < n; ++i) {
      if (out.selected[i]) res.select_prob[i] += w;
      if (out.inspected[i]) res.inspect_prob[i] += w;
    }
    res.utility += w * out.net_utility;
    res.alt_utility += w * path_alt_utility(out, real, inst);
    res.expected_selected += w * out.num_selected;
    for (int c = 0; c < num_constraints; ++c)
      res.slack[c] -= w * path_lhs((*opt->constraints)[c], out, real);
  }

  void add_trial(const SearchOutcome& out, const Realization& real, const ExecInstance& inst) {
    for (int i = 0; i < n; ++i) {
      if (out.selected[i]) res.select_prob[i] += 1.0;
      if (out.inspected[i]) res.inspect_prob[i] += 1.0;
    }
    res.expected_selected += out.num_selected;
    utility_stat.add(out.net_utility);
    alt_stat.add(path_alt_utility(out, real, inst));
    for (int c = 0; c < num_constraints; ++c) slack_stats[c].add(path_lhs((*opt->constraints)[c], out, real));
  }

  void finish_exact() {
    for (int c = 0; c < num_constraints; ++c) res.slack[c] += (*opt->constraints)[c].bound;
  }

  void finish_mc(long long trials) {
    const double inv = 1.0 / static_cast<double>(trials);
    for (int i = 0; i < n; ++i) {
      res.select_prob[i] *= inv;
      res.inspect_prob[i] *= inv;
    }
    res.expected_selected *= inv;
    res.utility = utility_stat.mean;
    res.utility_stderr = utility_stat.stderr_mean();
    res.alt_utility = alt_stat.mean;
    res.alt_utility_stderr = alt_stat.stderr_mean();
    for (int c = 0; c < num_constraints; ++c) {
      res.slack[c] = (*opt->constraints)[c].bound - slack_stats[c].mean;
      res.slack_stderr[c] = slack_stats[c].stderr_mean();
    }
    res.trials = trials;
  }
};

}  // namespace

EvalResult evaluate_exact(const ExecInstance& inst, const TieBreaker& tie, const EvalOptions& opt) {
  const int n = static_cast<int>(inst.boxes.size());
  std::size_t space = 1;
  for (const auto& b : inst.boxes) {
    if (space > opt.enumeration_cap / b.atoms.size())
      throw CapExceeded("exact evaluation: realization space exceeds cap (size > " +
                            std::to_string(opt.enumeration_cap) + ")",
                        std::numeric_limits<std::size_t>::max());
    space *= b.atoms.size();
  }
  if (space > opt.enumeration_cap)
    throw CapExceeded("exact evaluation: realization space " + std::to_string(space) + " exceeds cap", space);

  PathAccumulator acc;
  acc.init(inst, opt);

  Realization real;
  real.atom.assign(n, 0);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= inst.boxes[i].atoms[inst.boxes[i].exec_of_orig[real.atom[i]]].prob;
    if (w > 0.0) {
      const SearchOutcome out = run_policy(inst, tie, real, opt.exec);
      acc.add_weighted(out, real, inst, w);
    }
    // odometer
    int i = 0;
    for (; i < n; ++i) {
      if (++real.atom[i] < static_cast<int>(inst.boxes[i].atoms.size())) break;
      real.atom[i] = 0;
    }
    if (i == n) break;
  }
  acc.finish_exact();
  return acc.res;
}

Realization sample_realization(const ExecInstance& inst, std::uint64_t seed, std::uint64_t trial) {
  Realization r;
  r.atom.resize(inst.boxes.size());
  for (std::size_t i = 0; i < inst.boxes.size(); ++i) {
    const double u = uniform01(seed, trial, i, 0);
    // invert the cdf over original atom order
    double acc = 0.0;
    int pick = static_cast<int>(inst.boxes[i].atoms.size()) - 1;
    for (std::size_t a = 0; a < inst.boxes[i].exec_of_orig.size(); ++a) {
      acc += inst.boxes[i].atoms[inst.boxes[i].exec_of_orig[a]].prob;
      if (u < acc) { pick = static_cast<int>(a); break; }
    }
    r.atom[i] = pick;
  }
  return r;
}

Realization sample_realization(const PandoraInstance& inst, std::uint64_t seed, std::uint64_t trial) {
  Realization r;
  r.atom.resize(inst.boxes.size());
  for (std::size_t i = 0; i < inst.boxes.size(); ++i) {
    const double u = uniform01(seed, trial, i, 0);
    double acc = 0.0;
    int pick = static_cast<int>(inst.boxes[i].dist.size()) - 1;
    for (std::size_t a = 0; a < inst.boxes[i].dist.size(); ++a) {
      acc += inst.boxes[i].dist.probs[a];
      if (u < acc) { pick = static_cast<int>(a); break; }
    }
    r.atom[i] = pick;
  }
  return r;
}

EvalResult evaluate_mc(const ExecInstance& inst, const TieBreaker& tie, long long trials,
                       std::uint64_t seed, const EvalOptions& opt) {
  if (trials < 1) throw std::invalid_argument("evaluate_mc: trials must be >= 1");
  PathAccumulator acc;
  acc.init(inst, opt);
  for (long long t = 0; t < trials; ++t) {
    const Realization real = sample_realization(inst, seed, static_cast<std::uint64_t>(t));
    const SearchOutcome out = run_policy(inst, tie, real, opt.exec);
    acc.add_trial(out, real, inst);
  }
  acc.finish_mc(trials);
  return acc.res;
}

EvalResult expected_outcome_exact(const PandoraInstance& inst, const TieBreakRule& tie, const EvalOptions& opt) {
  const ExecInstance e = ExecInstance::from_instance(inst);
  const auto breaker = make_basic_tiebreaker(tie);
  EvalOptions o = opt;
  o.instance = &inst;
  return evaluate_exact(e, *breaker, o);
}

EvalResult expected_outcome_mc(const PandoraInstance& inst, const TieBreakRule& tie, long long trials,
                               std::uint64_t seed, const EvalOptions& opt) {
  const ExecInstance e = ExecInstance::from_instance(inst);
  const auto breaker = make_basic_tiebreaker(tie);
  EvalOptions o = opt;
  o.instance = &inst;
  return evaluate_mc(e, *breaker, trials, seed, o);
}

// --------------------------------------------------------------------------
// Brute-force oracle: state = per-box (-1 unopened | atom index), value =
// optimal future utility; selection collapses into the stopping decision.

namespace {

struct BruteForce {
  const PandoraInstance& inst;
  int n;
  std::vector<std::uint64_t> radix;
  std::unordered_map<std::uint64_t, double> memo;

  explicit BruteForce(const PandoraInstance& instance) : inst(instance), n(static_cast<int>(instance.boxes.size())) {
    radix.resize(n);
    std::uint64_t r = 1;
    for (int i = 0; i < n; ++i) {
      radix[i] = r;
      r *= inst.boxes[i].dist.size() + 1;
    }
  }

  double stop_value(const std::vector<int>& state) const {
    std::vector<double> vals;
    for (int i = 0; i < n; ++i)
      if (state[i] >= 0) {
        const double v = inst.boxes[i].dist.support[state[i]];
        if (v > 0.0) vals.push_back(v);
      }
    std::sort(vals.rbegin(), vals.rend());
    double s = 0.0;
    for (int j = 0; j < std::min<int>(inst.capacity, static_cast<int>(vals.size())); ++j) s += vals[j];
    return s;
  }

  double value(std::vector<int>& state) {
    std::uint64_t key = 0;
    for (int i = 0; i < n; ++i) key += radix[i] * static_cast<std::uint64_t>(state[i] + 1);
    const auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    double best = stop_value(state);
    for (int i = 0; i < n; ++i) {
      if (state[i] >= 0) continue;
      double v = -inst.boxes[i].cost;
      for (std::size_t a = 0; a < inst.boxes[i].dist.size(); ++a) {
        if (inst.boxes[i].dist.probs[a] <= 0.0) continue;
        state[i] = static_cast<int>(a);
        v += inst.boxes[i].dist.probs[a] * value(state);
        state[i] = -1;
      }
      best = std::max(best, v);
    }
    memo.emplace(key, best);
    return best;
  }
};

}  // namespace

double brute_force_optimal_value(const PandoraInstance& inst, std::size_t state_cap) {
  inst.validate();
  std::size_t space = 1;
  for (const auto& b : inst.boxes) {
    space *= b.dist.size() + 1;
    if (space > state_cap) throw CapExceeded("brute force: state space exceeds cap", space);
  }
  BruteForce bf(inst);
  std::vector<int> state(inst.boxes.size(), -1);
  return bf.value(state);
}

}  // namespace cmss
