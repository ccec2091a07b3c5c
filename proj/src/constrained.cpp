#include "cmss/constrained.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cmss {

namespace {

// min / max of E[theta_S].x + E[theta_I].y over the marginal polytope.
std::pair<double, double> lhs_range(const PandoraInstance& inst, const AffineConstraint& c) {
  const int n = static_cast<int>(inst.boxes.size());
  auto extremum = [&](double sgn) {
    // minimize sgn * (a.x + b.y)
    double constant = 0.0;
    std::vector<double> gamma(n);
    for (int i = 0; i < n; ++i) {
      double a = 0.0;
      if (c.theta_sel[i].per_atom) {
        for (std::size_t at = 0; at < inst.boxes[i].dist.size(); ++at)
          a += inst.boxes[i].dist.probs[at] * (*c.theta_sel[i].per_atom)[at];
      } else {
        a = c.theta_sel[i].scalar;
      }
      const double b = c.expected_theta_insp(inst, i);
      // choose y in [x, 1]: y = x when sgn*b >= 0, else y = 1
      if (sgn * b >= 0.0) {
        gamma[i] = sgn * (a + b);
      } else {
        gamma[i] = sgn * a;
        constant += sgn * b;
      }
    }
    std::sort(gamma.begin(), gamma.end());
    double v = constant;
    for (int i = 0; i < std::min(n, inst.capacity); ++i)
      if (gamma[i] < 0.0) v += gamma[i];
    return v;
  };
  const double lo = extremum(+1.0);
  const double hi = -extremum(-1.0);
  return {lo, hi};
}

EvalResult eval_with(const DualAdjustedInstance& adj, const TieBreakRule& rule, const SolveOptions& opt) {
  const auto tie = make_tiebreaker(rule, adj, opt.exec);
  EvalOptions eo;
  eo.instance = &adj.base;
  eo.constraints = &adj.constraints;
  eo.enumeration_cap = opt.enumeration_cap;
  eo.exec = opt.exec;
  if (opt.use_mc) return evaluate_mc(adj.exec, *tie, opt.mc_trials, opt.mc_seed, eo);
  return evaluate_exact(adj.exec, *tie, eo);
}

}  // namespace

bool check_feasibility(const PandoraInstance& inst, const AffineConstraint& constraint) {
  inst.validate();
  constraint.validate(inst);
  const auto [lo, hi] = lhs_range(inst, constraint);
  const double eps = 1e-12 * (1.0 + std::fabs(constraint.bound));
  if (constraint.sense == ConstraintSense::leq) return lo <= constraint.bound + eps;
  return lo <= constraint.bound + eps && constraint.bound <= hi + eps;
}

BindingCheck check_binding(const PandoraInstance& inst, const AffineConstraint& constraint,
                           const SolveOptions& opt) {
  if (constraint.sense != ConstraintSense::leq)
    throw std::invalid_argument("check_binding: constraint must be an inequality");
  const DualAdjustedInstance unadj = adjust_instance(inst, constraint, 0.0);
  const EvalResult r = eval_with(unadj, TieBreakRule::lexicographic_rule(), opt);
  const double tol = opt.use_mc ? 3.0 * r.slack_stderr[0] : 1e-12;
  return r.slack[0] >= -tol ? BindingCheck::drop_constraint : BindingCheck::make_equality;
}

DualProbe dual_value_and_slacks(const PandoraInstance& inst, const AffineConstraint& constraint,
                                double lambda, const SolveOptions& opt) {
  const DualAdjustedInstance adj = adjust_instance(inst, constraint, lambda);
  const EvalResult lo = eval_with(adj, TieBreakRule::negative_extreme_rule(), opt);
  const EvalResult hi = eval_with(adj, TieBreakRule::positive_extreme_rule(), opt);
  DualProbe p;
  // G(lambda) = Utility(pi) + lambda * slack(pi) for any adjusted-optimal pi
  p.g = lo.utility + lambda * lo.slack[0];
  p.slack_minus = lo.slack[0];
  p.slack_plus = hi.slack[0];
  p.utility_minus = lo.utility;
  p.utility_plus = hi.utility;
  return p;
}

double dual_search_bound(const PandoraInstance& inst, const AffineConstraint& constraint) {
  double vmax = -std::numeric_limits<double>::infinity();
  double vmin = std::numeric_limits<double>::infinity();
  double cmax = 0.0;
  for (const auto& b : inst.boxes) {
    vmax = std::max(vmax, b.dist.max_value());
    vmin = std::min(vmin, b.dist.min_value());
    cmax = std::max(cmax, std::fabs(b.cost));
  }
  const double denom = constraint.min_nonzero_coef(inst);
  if (denom == 0.0) return 0.0;
  return (vmax - vmin + cmax + 1.0) / denom;
}

double minimize_dual(const PandoraInstance& inst, const AffineConstraint& constraint,
                     const SolveOptions& opt) {
  if (constraint.sense != ConstraintSense::equality)
    throw std::invalid_argument("minimize_dual: equality form required (pre-process inequalities)");
  if (constraint.all_zero()) {
    if (std::fabs(constraint.bound) > 1e-12)
      throw InfeasibleConstraint("constraint has zero coefficients and nonzero bound");
    return 0.0;
  }

  const double slack_eps = opt.use_mc ? 1e-7 : 1e-12;
  auto straddles = [&](const DualProbe& p) {
    return p.slack_minus <= slack_eps && p.slack_plus >= -slack_eps;
  };

  const DualProbe at0 = dual_value_and_slacks(inst, constraint, 0.0, opt);
  if (straddles(at0)) return 0.0;

  const double bound = dual_search_bound(inst, constraint);
  double lo, hi;
  if (at0.slack_plus < 0.0) {
    // G decreasing at 0: the minimizer is to the right
    lo = 0.0;
    hi = bound;
    const DualProbe ph = dual_value_and_slacks(inst, constraint, hi, opt);
    if (straddles(ph)) return hi;
    if (ph.slack_minus < 0.0) throw InfeasibleConstraint("dual subgradient has no sign change in [-L, L]");
  } else {
    hi = 0.0;
    lo = -bound;
    const DualProbe pl = dual_value_and_slacks(inst, constraint, lo, opt);
    if (straddles(pl)) return lo;
    if (pl.slack_plus > 0.0) throw InfeasibleConstraint("dual subgradient has no sign change in [-L, L]");
  }

  // invariant: slack_plus(lo) < 0 < slack_minus(hi)
  for (int it = 0; it < opt.max_bisect_iters && hi - lo > opt.dual_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const DualProbe pm = dual_value_and_slacks(inst, constraint, mid, opt);
    if (straddles(pm)) return mid;
    if (pm.slack_plus < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

EvalResult evaluate_atom(const PolicyAtom& atom, const std::vector<AffineConstraint>& constraints,
                         const SolveOptions& opt) {
  const auto tie = make_tiebreaker(atom.rule, atom.adjusted, opt.exec);
  EvalOptions eo;
  eo.instance = &atom.adjusted.base;
  eo.constraints = &constraints;
  eo.enumeration_cap = opt.enumeration_cap;
  eo.exec = opt.exec;
  if (opt.use_mc) return evaluate_mc(atom.adjusted.exec, *tie, opt.mc_trials, opt.mc_seed, eo);
  return evaluate_exact(atom.adjusted.exec, *tie, eo);
}

RandomizedIndexPolicy solve_rdip(const PandoraInstance& inst, const AffineConstraint& constraint,
                                 const SolveOptions& opt) {
  inst.validate();
  constraint.validate(inst);
  if (!check_feasibility(inst, constraint)) throw InfeasibleConstraint("constraint polytope is empty");

  RandomizedIndexPolicy policy;

  AffineConstraint work = constraint;
  if (constraint.sense == ConstraintSense::leq) {
    if (check_binding(inst, constraint, opt) == BindingCheck::drop_constraint) {
      policy.constraint_dropped = true;
      policy.lambda_star = 0.0;
      policy.atoms.push_back({adjust_instance(inst, constraint, 0.0), TieBreakRule::lexicographic_rule(), 1.0});
      const EvalResult r = evaluate_atom(policy.atoms[0], {constraint}, opt);
      policy.utility = r.utility;
      policy.slack = r.slack[0];
      policy.atom_utility = {r.utility};
      policy.atom_slack = {r.slack[0]};
      return policy;
    }
    work.sense = ConstraintSense::equality;
  }

  const double lambda = minimize_dual(inst, work, opt);
  policy.lambda_star = lambda;

  const DualAdjustedInstance adj = adjust_instance(inst, work, lambda);
  PolicyAtom lo{adj, TieBreakRule::negative_extreme_rule(), 1.0};
  PolicyAtom hi{adj, TieBreakRule::positive_extreme_rule(), 1.0};
  const EvalResult rlo = evaluate_atom(lo, {work}, opt);
  const EvalResult rhi = evaluate_atom(hi, {work}, opt);
  const double d_minus = rlo.slack[0];
  const double d_plus = rhi.slack[0];

  const double zero_eps = opt.use_mc ? 1e-7 : 1e-12;
  if (std::fabs(d_minus) <= zero_eps && std::fabs(d_plus) <= zero_eps) {
    lo.weight = 1.0;
    policy.atoms = {lo};
    policy.atom_utility = {rlo.utility};
    policy.atom_slack = {d_minus};
    policy.utility = rlo.utility;
    policy.slack = d_minus;
    return policy;
  }
  if (d_minus > zero_eps || d_plus < -zero_eps)
    throw InfeasibleConstraint("extreme slacks do not straddle zero at lambda*");

  const double w_minus = d_plus / (d_plus - d_minus);
  const double w_plus = -d_minus / (d_plus - d_minus);
  lo.weight = w_minus;
  hi.weight = w_plus;
  policy.atoms = {lo, hi};
  policy.atom_utility = {rlo.utility, rhi.utility};
  policy.atom_slack = {d_minus, d_plus};
  policy.utility = w_minus * rlo.utility + w_plus * rhi.utility;
  policy.slack = w_minus * d_minus + w_plus * d_plus;
  return policy;
}

SlackReport slack_of(const RandomizedIndexPolicy& policy, const PandoraInstance& inst,
                     const AffineConstraint& constraint, const SolveOptions& opt) {
  (void)inst;
  SlackReport rep;
  rep.exact = !opt.use_mc;
  double var = 0.0;
  for (const auto& atom : policy.atoms) {
    const EvalResult r = evaluate_atom(atom, {constraint}, opt);
    rep.slack += atom.weight * r.slack[0];
    if (opt.use_mc) {
      var += atom.weight * atom.weight * r.slack_stderr[0] * r.slack_stderr[0];
      rep.trials += r.trials;
    }
  }
  rep.stderr_slack = std::sqrt(var);
  return rep;
}

}  // namespace cmss
