#include "cmss/pandora.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace cmss {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void PandoraInstance::validate() const {
  if (boxes.empty()) throw std::invalid_argument("instance: no boxes");
  if (capacity < 1 || capacity > static_cast<int>(boxes.size()))
    throw std::invalid_argument("instance: capacity out of range");
  std::set<int> ids;
  for (const auto& b : boxes) {
    b.dist.validate();
    if (!ids.insert(b.id).second) throw std::invalid_argument("instance: duplicate box id");
  }
}

int PandoraInstance::position_of(int box_id) const {
  for (std::size_t i = 0; i < boxes.size(); ++i)
    if (boxes[i].id == box_id) return static_cast<int>(i);
  return -1;
}

std::size_t PandoraInstance::realization_space() const {
  std::size_t prod = 1;
  for (const auto& b : boxes) {
    if (prod > std::numeric_limits<std::size_t>::max() / b.dist.size()) return std::numeric_limits<std::size_t>::max();
    prod *= b.dist.size();
  }
  return prod;
}

Realization Realization::from_values(const PandoraInstance& inst, const std::map<int, double>& values) {
  Realization r;
  r.atom.resize(inst.boxes.size());
  for (std::size_t i = 0; i < inst.boxes.size(); ++i) {
    const auto it = values.find(inst.boxes[i].id);
    if (it == values.end()) throw std::invalid_argument("realization: missing box " + std::to_string(inst.boxes[i].id));
    const auto& sup = inst.boxes[i].dist.support;
    int found = -1;
    for (std::size_t a = 0; a < sup.size(); ++a)
      if (std::fabs(sup[a] - it->second) <= 1e-12) { found = static_cast<int>(a); break; }
    if (found < 0) throw std::invalid_argument("realization: value not in support of box " + std::to_string(inst.boxes[i].id));
    r.atom[i] = found;
  }
  return r;
}

std::string TieBreakRule::name() const {
  switch (kind) {
    case Kind::lexicographic: return "lexicographic";
    case Kind::negative_extreme: return "negative_extreme";
    case Kind::positive_extreme: return "positive_extreme";
    case Kind::explicit_scores: return "explicit_scores";
    case Kind::perturbation: return "perturbation";
  }
  return "?";
}

double ExecBox::prob_value_greater(double t) const {
  double p = 0.0;
  for (const auto& a : atoms)
    if (a.value > t) p += a.prob;
  return p;
}

double ExecBox::prob_value_greater_equal(double t) const {
  double p = 0.0;
  for (const auto& a : atoms)
    if (a.value >= t) p += a.prob;
  return p;
}

double reservation_from_atoms(const std::vector<ExecAtom>& atoms, double cost) {
  if (cost < 0.0) return kInf;
  double vmax = -kInf;
  for (const auto& a : atoms) vmax = std::max(vmax, a.value);
  if (cost == 0.0) return vmax;
  // sort values descending and walk the piecewise-linear excess function
  std::vector<std::pair<double, double>> vp;
  vp.reserve(atoms.size());
  for (const auto& a : atoms) vp.emplace_back(a.value, a.prob);
  std::sort(vp.begin(), vp.end(), [](auto& x, auto& y) { return x.first > y.first; });
  double tail_prob = 0.0, tail_sum = 0.0;
  for (std::size_t j = 0; j < vp.size(); ++j) {
    tail_prob += vp[j].second;
    tail_sum += vp[j].second * vp[j].first;
    const double lo = (j + 1 < vp.size()) ? vp[j + 1].first : -kInf;
    if (tail_prob <= 0.0) continue;
    const double sigma = (tail_sum - cost) / tail_prob;
    if (sigma >= lo && sigma <= vp[j].first) return sigma;
  }
  double mean = 0.0;
  for (const auto& [v, p] : vp) mean += v * p;
  return mean - cost;
}

ExecInstance ExecInstance::from_instance(const PandoraInstance& inst) {
  inst.validate();
  ExecInstance e;
  e.capacity = inst.capacity;
  e.boxes.resize(inst.boxes.size());
  for (std::size_t i = 0; i < inst.boxes.size(); ++i) {
    const Box& b = inst.boxes[i];
    ExecBox& eb = e.boxes[i];
    eb.id = b.id;
    eb.cost = eb.orig_cost = b.cost;
    eb.atoms.resize(b.dist.size());
    eb.exec_of_orig.resize(b.dist.size());
    for (std::size_t a = 0; a < b.dist.size(); ++a) {
      eb.atoms[a] = {b.dist.support[a], b.dist.support[a], b.dist.probs[a], static_cast<int>(a)};
      eb.exec_of_orig[a] = static_cast<int>(a);
    }
    eb.sigma = reservation_from_atoms(eb.atoms, eb.cost);
  }
  return e;
}

namespace {

class LexTie : public TieBreaker {
 public:
  int pick(const TieContext& ctx) const override {
    // lowest box id wins; outside option last among ties
    int best = -1;
    for (int c : ctx.candidates) {
      if (c < 0) continue;
      if (best < 0 || ctx.inst.boxes[c].id < ctx.inst.boxes[best].id) best = c;
    }
    if (best >= 0) return best;
    return -1;
  }
};

class ExplicitTie : public TieBreaker {
 public:
  explicit ExplicitTie(std::map<int, double> scores) : scores_(std::move(scores)) {}
  int pick(const TieContext& ctx) const override {
    int best = 0;
    double best_score = -kInf;
    bool have = false;
    for (int c : ctx.candidates) {
      double s;
      if (c < 0) {
        const auto it = scores_.find(-1);
        s = it == scores_.end() ? 0.0 : it->second;  // outside option scores 0 by convention
      } else {
        const auto it = scores_.find(ctx.inst.boxes[c].id);
        if (it == scores_.end())
          throw std::invalid_argument("explicit_scores: no score for candidate box " +
                                      std::to_string(ctx.inst.boxes[c].id));
        s = it->second;
      }
      // deterministic fallback inside equal scores: lower id first, outside last
      if (!have || s > best_score + 1e-15 ||
          (std::fabs(s - best_score) <= 1e-15 && c >= 0 && (best < 0 || ctx.inst.boxes[c].id < ctx.inst.boxes[best].id))) {
        best = c;
        best_score = s;
        have = true;
      }
    }
    return best;
  }

 private:
  std::map<int, double> scores_;
};

}  // namespace

std::unique_ptr<TieBreaker> make_basic_tiebreaker(const TieBreakRule& rule) {
  switch (rule.kind) {
    case TieBreakRule::Kind::lexicographic: return std::make_unique<LexTie>();
    case TieBreakRule::Kind::explicit_scores: return std::make_unique<ExplicitTie>(rule.scores);
    default:
      throw std::invalid_argument("tie rule '" + rule.name() + "' needs a constraint context");
  }
}

SearchOutcome run_policy(const ExecInstance& inst, const TieBreaker& tie, const Realization& real,
                         const ExecParams& params) {
  const int n = static_cast<int>(inst.boxes.size());
  if (static_cast<int>(real.atom.size()) != n) throw std::invalid_argument("realization does not cover all boxes");

  std::vector<char> opened(n, 0), selected(n, 0);
  std::vector<int> realized(n, -1);  // exec-order atom index once opened
  std::vector<double> option(n);
  for (int i = 0; i < n; ++i) option[i] = inst.boxes[i].sigma;

  SearchOutcome out;
  out.inspected.assign(n, 0);
  out.selected.assign(n, 0);

  std::vector<int> cands;
  while (true) {
    // o_max over unselected boxes and the outside option
    double o_max = 0.0;  // outside option value
    for (int i = 0; i < n; ++i)
      if (!selected[i]) o_max = std::max(o_max, option[i]);

    cands.clear();
    for (int i = 0; i < n; ++i) {
      if (!selected[i] && option[i] >= o_max - params.tie_tol) cands.push_back(i);
    }
    if (o_max <= params.tie_tol) cands.push_back(-1);  // outside option ties at 0
    for (int i = 0; i < n; ++i) {
      if (!opened[i] && std::fabs(inst.boxes[i].cost) <= params.zero_cost_tol &&
          !(option[i] >= o_max - params.tie_tol))
        cands.push_back(i);  // unopened zero-cost boxes are always candidates
    }

    TieContext ctx{inst, cands, opened, selected, realized, option, o_max};
    const int pick = tie.pick(ctx);

    if (pick < 0) break;  // outside option selected: terminate

    if (!opened[pick]) {
      // inspect
      opened[pick] = 1;
      out.inspected[pick] = 1;
      out.inspection_order.push_back(pick);
      const int exec_atom = inst.boxes[pick].exec_of_orig[real.atom[pick]];
      realized[pick] = exec_atom;
      option[pick] = inst.boxes[pick].atoms[exec_atom].value;
      out.net_utility -= inst.boxes[pick].orig_cost;
    } else {
      // select
      selected[pick] = 1;
      out.selected[pick] = 1;
      out.num_selected += 1;
      out.net_utility += inst.boxes[pick].atoms[realized[pick]].orig_value;
      if (out.num_selected >= inst.capacity) break;
    }
  }
  return out;
}

SearchOutcome run_refined_policy(const PandoraInstance& inst, const TieBreakRule& tie,
                                 const Realization& real, const ExecParams& params) {
  const ExecInstance e = ExecInstance::from_instance(inst);
  const auto breaker = make_basic_tiebreaker(tie);
  return run_policy(e, *breaker, real, params);
}

}  // namespace cmss
