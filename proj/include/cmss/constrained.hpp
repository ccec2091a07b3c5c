#pragma once

#include <cstdint>
#include <optional>

#include "cmss/adjusted.hpp"
#include "cmss/extreme.hpp"
#include "cmss/pandora_eval.hpp"

namespace cmss {

struct InfeasibleConstraint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PolicyAtom {
  DualAdjustedInstance adjusted;
  TieBreakRule rule;
  double weight = 1.0;
};

// Mixture of deterministic dual-adjusted index policies.
struct RandomizedIndexPolicy {
  std::vector<PolicyAtom> atoms;
  double lambda_star = 0.0;
  bool constraint_dropped = false;  // inequality satisfied by the unconstrained optimum

  // filled by the solver (exact or MC depending on options)
  double utility = 0.0;
  double slack = 0.0;
  std::vector<double> atom_utility;
  std::vector<double> atom_slack;
};

struct SlackReport {
  double slack = 0.0;
  bool exact = true;
  long long trials = 0;
  double stderr_slack = 0.0;
};

enum class BindingCheck { drop_constraint, make_equality };

struct SolveOptions {
  double dual_tol = 1e-12;
  int max_bisect_iters = 200;
  ExecParams exec;
  std::size_t enumeration_cap = 10'000'000;
  // Monte Carlo evaluation mode for instances too large to enumerate. Probes
  // share the seed (common random numbers), so the bisection sees a
  // deterministic approximate dual function.
  bool use_mc = false;
  long long mc_trials = 100'000;
  std::uint64_t mc_seed = 1;
};

// Non-emptiness of {x,y in [0,1]^n : x_i <= y_i, sum x_i <= k,
// theta_S.x + theta_I.y <= b (or = b)}; value-specific coefficients enter via
// their expectations. Solved in closed form (the LP separates given the
// single budget row).
bool check_feasibility(const PandoraInstance& inst, const AffineConstraint& constraint);

// Pre-processing for inequality constraints: if an unconstrained optimum
// already satisfies the constraint it can be dropped, otherwise it binds.
BindingCheck check_binding(const PandoraInstance& inst, const AffineConstraint& constraint,
                           const SolveOptions& opt = {});

struct DualProbe {
  double g = 0.0;            // G_cons(lambda)
  double slack_minus = 0.0;  // slack of the tau- optimal policy
  double slack_plus = 0.0;   // slack of the tau+ optimal policy
  double utility_minus = 0.0;
  double utility_plus = 0.0;
};

DualProbe dual_value_and_slacks(const PandoraInstance& inst, const AffineConstraint& constraint,
                                double lambda, const SolveOptions& opt = {});

// Bisection on the subgradient interval sign over [-Lambda, Lambda].
double minimize_dual(const PandoraInstance& inst, const AffineConstraint& constraint,
                     const SolveOptions& opt = {});

// Instance-dependent bound on |lambda*|.
double dual_search_bound(const PandoraInstance& inst, const AffineConstraint& constraint);

// Full pipeline: feasibility gate, binding pre-process for inequalities,
// dual minimization, and the two-atom randomized policy with exactly zero
// slack.
RandomizedIndexPolicy solve_rdip(const PandoraInstance& inst, const AffineConstraint& constraint,
                                 const SolveOptions& opt = {});

SlackReport slack_of(const RandomizedIndexPolicy& policy, const PandoraInstance& inst,
                     const AffineConstraint& constraint, const SolveOptions& opt = {});

// Exact expectations of one atom (utility w.r.t. original values, slack per
// the given constraints).
EvalResult evaluate_atom(const PolicyAtom& atom, const std::vector<AffineConstraint>& constraints,
                         const SolveOptions& opt = {});

}  // namespace cmss
