#include "cmss/extreme.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cmss {

int compare(const ExtScore& a, const ExtScore& b, double tol) {
  if (a.cls != b.cls) return a.cls < b.cls ? -1 : 1;
  if (a.cls != 0) return 0;
  if (a.val < b.val - tol) return -1;
  if (a.val > b.val + tol) return 1;
  return 0;
}

ScoreLevel make_score_level(const PandoraInstance& base, const ExecInstance& exec,
                            const AffineConstraint& constraint) {
  constraint.validate(base);
  ScoreLevel lvl;
  const std::size_t n = exec.boxes.size();
  lvl.theta_sel.resize(n);
  lvl.e_theta_insp.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ExecBox& eb = exec.boxes[i];
    lvl.theta_sel[i].resize(eb.atoms.size());
    for (std::size_t p = 0; p < eb.atoms.size(); ++p)
      lvl.theta_sel[i][p] = constraint.theta_sel[i].at(eb.atoms[p].orig_atom);
    lvl.e_theta_insp[i] = constraint.expected_theta_insp(base, static_cast<int>(i));
  }
  return lvl;
}

ExtScore refined_extreme_score(const TieContext& ctx, int candidate, const ScoreLevel& level,
                               const ExecParams& params) {
  if (candidate < 0) return ExtScore::finite(0.0);  // outside option
  const ExecBox& eb = ctx.inst.boxes[candidate];
  if (ctx.opened[candidate]) {
    return ExtScore::finite(level.theta_sel[candidate][ctx.realized_atom[candidate]]);
  }
  if (eb.cost < -params.zero_cost_tol) return ExtScore::pos_inf();

  const double e_theta_insp = level.e_theta_insp[candidate];

  // Split the support into atoms strictly above o_max and atoms tied with it.
  double p_above = 0.0, s_above = 0.0;
  struct Tied { double theta; double prob; };
  std::vector<Tied> tied;
  for (std::size_t p = 0; p < eb.atoms.size(); ++p) {
    const double v = eb.atoms[p].value;
    const double th = level.theta_sel[candidate][p];
    if (v > ctx.o_max + params.tie_tol) {
      p_above += eb.atoms[p].prob;
      s_above += eb.atoms[p].prob * th;
    } else if (v >= ctx.o_max - params.tie_tol) {
      tied.push_back({th, eb.atoms[p].prob});
    }
  }
  // ties enter in decreasing theta_S order
  std::stable_sort(tied.begin(), tied.end(), [](const Tied& a, const Tied& b) { return a.theta > b.theta; });

  if (p_above <= 0.0 && e_theta_insp >= 0.0) return ExtScore::pos_inf();

  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  double pl = p_above, sl = s_above;
  if (pl > 0.0) {
    best = (sl + e_theta_insp) / pl;
    any = true;
  }
  for (const Tied& t : tied) {
    pl += t.prob;
    sl += t.prob * t.theta;
    if (pl > 0.0) {
      best = std::max(best, (sl + e_theta_insp) / pl);
      any = true;
    }
  }
  if (!any) return e_theta_insp < 0.0 ? ExtScore::neg_inf() : ExtScore::pos_inf();
  return ExtScore::finite(best);
}

ExtScore basic_extreme_score(const TieContext& ctx, int candidate, double theta_sel, double theta_insp,
                             const ExecParams& params) {
  if (candidate < 0) return ExtScore::finite(0.0);
  const ExecBox& eb = ctx.inst.boxes[candidate];
  if (ctx.opened[candidate]) return ExtScore::finite(theta_sel);
  if (eb.cost < -params.zero_cost_tol) return ExtScore::pos_inf();
  if (theta_insp >= 0.0) {
    const double p = eb.prob_value_greater(ctx.o_max + params.tie_tol);
    if (p <= 0.0) return ExtScore::pos_inf();
    return ExtScore::finite(theta_sel + theta_insp / p);
  }
  const double p = eb.prob_value_greater_equal(ctx.o_max - params.tie_tol);
  if (p <= 0.0) return ExtScore::neg_inf();
  return ExtScore::finite(theta_sel + theta_insp / p);
}

int ExtremeTie::pick(const TieContext& ctx) const {
  int best = ctx.candidates.front();
  for (std::size_t k = 1; k < ctx.candidates.size(); ++k) {
    const int cand = ctx.candidates[k];
    int cmp = 0;
    for (const auto& lvl : levels_) {
      const ExtScore sc = refined_extreme_score(ctx, cand, lvl, params_);
      const ExtScore sb = refined_extreme_score(ctx, best, lvl, params_);
      cmp = compare(sc, sb, params_.tie_tol);
      if (cmp != 0) break;
    }
    if (cmp > 0) {
      best = cand;
    } else if (cmp == 0) {
      // deterministic fallback: lowest box id, outside option last
      if (best < 0 || (cand >= 0 && ctx.inst.boxes[cand].id < ctx.inst.boxes[best].id)) best = cand;
    }
  }
  return best;
}

std::unique_ptr<TieBreaker> make_tiebreaker(const TieBreakRule& rule, const DualAdjustedInstance& adj,
                                            const ExecParams& params) {
  switch (rule.kind) {
    case TieBreakRule::Kind::lexicographic:
    case TieBreakRule::Kind::explicit_scores:
      return make_basic_tiebreaker(rule);
    case TieBreakRule::Kind::negative_extreme: {
      if (adj.constraints.size() != 1)
        throw std::invalid_argument("negative_extreme needs exactly one constraint");
      std::vector<ScoreLevel> lv{make_score_level(adj.base, adj.exec, adj.constraints[0])};
      return std::make_unique<ExtremeTie>(std::move(lv), params);
    }
    case TieBreakRule::Kind::positive_extreme: {
      if (adj.constraints.size() != 1)
        throw std::invalid_argument("positive_extreme needs exactly one constraint");
      std::vector<ScoreLevel> lv{make_score_level(adj.base, adj.exec, adj.constraints[0].negated())};
      return std::make_unique<ExtremeTie>(std::move(lv), params);
    }
    case TieBreakRule::Kind::perturbation: {
      // each omega level maximizes omega . slack, i.e. negative-extreme on
      // the negated omega-combination of the constraints
      std::vector<ScoreLevel> lv;
      for (const auto& w : rule.omega) {
        if (w.size() != adj.constraints.size())
          throw std::invalid_argument("perturbation rule: omega size must match constraint count");
        const AffineConstraint combo = AffineConstraint::combination(adj.constraints, w);
        lv.push_back(make_score_level(adj.base, adj.exec, combo.negated()));
      }
      if (lv.empty()) return make_basic_tiebreaker(TieBreakRule::lexicographic_rule());
      return std::make_unique<ExtremeTie>(std::move(lv), params);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace cmss
