#include "cmss/jms_eval.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "cmss/stats.hpp"

namespace cmss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct JointState {
  std::vector<int> s;
  int selected = 0;
  bool operator==(const JointState& o) const { return selected == o.selected && s == o.s; }
};

struct JointHash {
  std::size_t operator()(const JointState& j) const {
    std::uint64_t h = 1469598103934665603ULL ^ static_cast<std::uint64_t>(j.selected);
    for (int x : j.s) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

using MassMap = std::unordered_map<JointState, double, JointHash>;

int argmax_index_action(const JmsInstance& inst, const IndexTable& table, const JointState& j) {
  if (j.selected >= inst.capacity) return -1;
  int best = -1;
  double best_sigma = 0.0;  // outside option: stop at index 0, ties stop
  for (std::size_t i = 0; i < inst.chains.size(); ++i) {
    if (inst.chains[i].is_terminal_state(j.s[i])) continue;
    const double sig = table.at(static_cast<int>(i), j.s[i]);
    if (sig > best_sigma) {
      best = static_cast<int>(i);
      best_sigma = sig;
    }
  }
  return best;
}

// Expected visits of the deterministic policy given by `action`; accumulates
// per-state visit counts (exits for non-terminal states, entries for
// terminal ones).
VisitVector forward_visits(const JmsInstance& inst,
                           const std::function<int(const JointState&)>& action, const VisitOptions& opt) {
  const auto off = inst.state_offsets();
  VisitVector out;
  out.p.assign(inst.total_states(), 0.0);
  out.bound = visit_bound(inst);

  JointState start;
  for (const auto& c : inst.chains) start.s.push_back(c.start);
  MassMap mass;
  mass.emplace(start, 1.0);
  std::unordered_map<JointState, char, JointHash> discovered;
  discovered.emplace(start, 1);

  for (int sweep = 0; sweep < opt.power_iters && !mass.empty(); ++sweep) {
    MassMap next;
    double living = 0.0;
    for (const auto& [j, mu] : mass) {
      const int a = action(j);
      if (a < 0) continue;  // stop
      const MarkovChain& ch = inst.chains[a];
      const int s = j.s[a];
      out.p[off[a] + s] += mu;
      for (int t = 0; t < ch.num_states; ++t) {
        const double pr = ch.transition[s][t];
        if (pr <= 0.0) continue;
        const double m = mu * pr;
        if (ch.is_terminal_state(t)) {
          out.p[off[a] + t] += m;
          JointState nj = j;
          nj.s[a] = t;
          nj.selected += 1;
          if (nj.selected < inst.capacity) {
            next[nj] += m;
            living += m;
          }
          // at capacity the process stops; the entry visit is already counted
        } else {
          JointState nj = j;
          nj.s[a] = t;
          next[nj] += m;
          living += m;
        }
      }
    }
    for (const auto& [j, mu] : next) discovered.emplace(j, 1);
    if (discovered.size() > opt.joint_cap)
      throw CapExceeded("visit_vector: joint state space exceeds cap", discovered.size());
    if (living < opt.mass_tol) {
      mass.clear();
      break;
    }
    mass.swap(next);
  }
  return out;
}

}  // namespace

int SeededSource::next(const MarkovChain& chain, int chain_index, int state) {
  if (count_.size() <= static_cast<std::size_t>(chain_index)) count_.resize(chain_index + 1, 0);
  const double u = uniform01(seed_, trial_ * 1000003ULL + static_cast<std::uint64_t>(chain_index), 17,
                             count_[chain_index]++);
  double acc = 0.0;
  int last = -1;
  for (int t = 0; t < chain.num_states; ++t) {
    const double p = chain.transition[state][t];
    if (p <= 0.0) continue;
    acc += p;
    last = t;
    if (u < acc) return t;
  }
  return last;
}

int ScriptedSource::next(const MarkovChain& chain, int chain_index, int state) {
  (void)chain;
  (void)state;
  if (chain_index >= static_cast<int>(steps_.size()) || steps_[chain_index].empty())
    throw std::runtime_error("scripted source exhausted for chain " + std::to_string(chain_index));
  const int t = steps_[chain_index].front();
  steps_[chain_index].pop_front();
  return t;
}

Trajectory run_index_policy(const JmsInstance& inst, const IndexTable& table, TransitionSource& stream) {
  inst.validate();
  Trajectory tr;
  tr.visits.resize(inst.chains.size());
  for (std::size_t i = 0; i < inst.chains.size(); ++i) tr.visits[i].assign(inst.chains[i].num_states, 0.0);

  JointState j;
  for (const auto& c : inst.chains) j.s.push_back(c.start);

  while (true) {
    const int a = argmax_index_action(inst, table, j);
    if (a < 0) break;
    const MarkovChain& ch = inst.chains[a];
    const int s = j.s[a];
    tr.visits[a][s] += 1.0;
    tr.reward += ch.reward[s];
    const int t = stream.next(ch, a, s);
    j.s[a] = t;
    if (ch.is_terminal_state(t)) {
      tr.visits[a][t] += 1.0;
      tr.reward += ch.reward[t];
      tr.selected.push_back(a);
      j.selected += 1;
    }
  }
  tr.final_state = j.s;
  return tr;
}

double visit_bound(const JmsInstance& inst) {
  double h = 1.0;
  for (const auto& ch : inst.chains) {
    std::vector<int> nonterm;
    for (int s = 0; s < ch.num_states; ++s)
      if (!ch.is_terminal_state(s)) nonterm.push_back(s);
    const int m = static_cast<int>(nonterm.size());
    if (m == 0) continue;
    Eigen::MatrixXd q(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) q(a, b) = ch.transition[nonterm[a]][nonterm[b]];
    const Eigen::MatrixXd fundamental = (Eigen::MatrixXd::Identity(m, m) - q).inverse();
    int start_row = 0;
    for (int a = 0; a < m; ++a)
      if (nonterm[a] == ch.start) start_row = a;
    for (int b = 0; b < m; ++b) h = std::max(h, fundamental(start_row, b));
  }
  return h;
}

VisitVector visit_vector_exact(const JmsInstance& inst, const IndexTable& table, const VisitOptions& opt) {
  inst.validate();
  return forward_visits(
      inst, [&](const JointState& j) { return argmax_index_action(inst, table, j); }, opt);
}

McVisitResult visit_vector_mc(const JmsInstance& inst, const IndexTable& table, long long trials,
                              std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("visit_vector_mc: trials must be >= 1");
  McVisitResult out;
  out.visits.p.assign(inst.total_states(), 0.0);
  out.visits.bound = visit_bound(inst);
  const auto off = inst.state_offsets();
  RunningStat reward;
  for (long long t = 0; t < trials; ++t) {
    SeededSource src(seed, static_cast<std::uint64_t>(t));
    const Trajectory tr = run_index_policy(inst, table, src);
    for (std::size_t i = 0; i < tr.visits.size(); ++i)
      for (std::size_t s = 0; s < tr.visits[i].size(); ++s) out.visits.p[off[i] + s] += tr.visits[i][s];
    reward.add(tr.reward);
  }
  for (double& x : out.visits.p) x /= static_cast<double>(trials);
  out.reward_mean = reward.mean;
  out.reward_stderr = reward.stderr_mean();
  out.trials = trials;
  return out;
}

double expected_reward(const JmsInstance& inst, const VisitVector& v) {
  const auto off = inst.state_offsets();
  double r = 0.0;
  for (std::size_t i = 0; i < inst.chains.size(); ++i)
    for (int s = 0; s < inst.chains[i].num_states; ++s) r += inst.chains[i].reward[s] * v.p[off[i] + s];
  return r;
}

namespace {

struct JointSpace {
  std::vector<JointState> states;
  std::unordered_map<JointState, int, JointHash> index;

  int intern(const JointState& j) {
    const auto it = index.find(j);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(states.size());
    states.push_back(j);
    index.emplace(j, id);
    return id;
  }
};

// Enumerates the joint states reachable under arbitrary actions and runs
// Gauss-Seidel value iteration for the optimal stopping/scheduling value.
struct JmsDp {
  const JmsInstance& inst;
  JointSpace space;
  std::vector<double> value;

  explicit JmsDp(const JmsInstance& instance, const VisitOptions& opt) : inst(instance) {
    JointState start;
    for (const auto& c : inst.chains) start.s.push_back(c.start);
    space.intern(start);
    for (std::size_t head = 0; head < space.states.size(); ++head) {
      const JointState j = space.states[head];
      if (space.states.size() > opt.joint_cap)
        throw CapExceeded("jms dp: joint state space exceeds cap", space.states.size());
      if (j.selected >= inst.capacity) continue;
      for (std::size_t i = 0; i < inst.chains.size(); ++i) {
        const MarkovChain& ch = inst.chains[i];
        if (ch.is_terminal_state(j.s[i])) continue;
        for (int t = 0; t < ch.num_states; ++t) {
          if (ch.transition[j.s[i]][t] <= 0.0) continue;
          JointState nj = j;
          nj.s[i] = t;
          if (ch.is_terminal_state(t)) nj.selected += 1;
          if (nj.selected < inst.capacity || ch.is_terminal_state(t)) space.intern(nj);
        }
      }
    }
    value.assign(space.states.size(), 0.0);
  }

  double q_value(const JointState& j, int a) const {
    const MarkovChain& ch = inst.chains[a];
    const int s = j.s[a];
    double q = ch.reward[s];
    for (int t = 0; t < ch.num_states; ++t) {
      const double pr = ch.transition[s][t];
      if (pr <= 0.0) continue;
      JointState nj = j;
      nj.s[a] = t;
      if (ch.is_terminal_state(t)) {
        nj.selected += 1;
        double cont = ch.reward[t];
        if (nj.selected < inst.capacity) cont += value[space.index.at(nj)];
        q += pr * cont;
      } else {
        q += pr * value[space.index.at(nj)];
      }
    }
    return q;
  }

  int best_action(const JointState& j, double* best_q = nullptr) const {
    int arg = -1;
    double best = 0.0;
    if (j.selected < inst.capacity) {
      for (std::size_t i = 0; i < inst.chains.size(); ++i) {
        if (inst.chains[i].is_terminal_state(j.s[i])) continue;
        const double q = q_value(j, static_cast<int>(i));
        if (q > best + 1e-14) {
          best = q;
          arg = static_cast<int>(i);
        }
      }
    }
    if (best_q) *best_q = best;
    return arg;
  }

  void solve(double tol = 1e-13, int max_sweeps = 200000) {
    double delta = kInf;
    for (int sweep = 0; sweep < max_sweeps && delta > tol; ++sweep) {
      delta = 0.0;
      for (std::size_t id = 0; id < space.states.size(); ++id) {
        double q;
        best_action(space.states[id], &q);
        delta = std::max(delta, std::fabs(q - value[id]));
        value[id] = q;
      }
    }
    if (delta > 1e-9) throw std::runtime_error("jms dp: value iteration did not converge");
  }
};

}  // namespace

double jms_brute_force_value(const JmsInstance& inst, const VisitOptions& opt) {
  inst.validate();
  JmsDp dp(inst, opt);
  dp.solve();
  JointState start;
  for (const auto& c : inst.chains) start.s.push_back(c.start);
  return dp.value[dp.space.index.at(start)];
}

std::pair<double, VisitVector> jms_optimal_visits(const JmsInstance& inst, const std::vector<double>& rewards,
                                                  const VisitOptions& opt) {
  const JmsInstance shifted = with_rewards(inst, rewards);
  JmsDp dp(shifted, opt);
  dp.solve();
  const VisitVector v = forward_visits(
      shifted, [&](const JointState& j) { return dp.best_action(j); }, opt);
  JointState start;
  for (const auto& c : inst.chains) start.s.push_back(c.start);
  return {dp.value[dp.space.index.at(start)], v};
}

}  // namespace cmss
