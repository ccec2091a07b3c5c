#pragma once

#include <cstdint>
#include <functional>

#include "cmss/constraint.hpp"
#include "cmss/pandora.hpp"

namespace cmss {

// Thrown when an exact computation would exceed its state-space cap.
struct CapExceeded : std::runtime_error {
  std::size_t size;
  explicit CapExceeded(const std::string& what, std::size_t sz) : std::runtime_error(what), size(sz) {}
};

struct EvalOptions {
  const PandoraInstance* instance = nullptr;                 // needed for constraint slacks
  const std::vector<AffineConstraint>* constraints = nullptr;
  const std::vector<std::vector<double>>* alt_values = nullptr;  // per box, per original atom
  std::size_t enumeration_cap = 10'000'000;
  ExecParams exec;
};

struct EvalResult {
  std::vector<double> select_prob;   // E[A_i] by box position
  std::vector<double> inspect_prob;  // E[I_i] by box position
  double utility = 0.0;
  double alt_utility = 0.0;          // same outcome paths, alternate value table
  double expected_selected = 0.0;
  std::vector<double> slack;         // bound - E[lhs] per constraint
  // Monte Carlo extras (zero for exact evaluation):
  double utility_stderr = 0.0;
  double alt_utility_stderr = 0.0;
  std::vector<double> slack_stderr;
  long long trials = 0;
};

// Exact expectations by full enumeration of the realization product space.
EvalResult evaluate_exact(const ExecInstance& inst, const TieBreaker& tie, const EvalOptions& opt = {});

// Monte Carlo estimate; identical (seed) gives identical output, and the
// per-(trial, box) substreams make trial order irrelevant.
EvalResult evaluate_mc(const ExecInstance& inst, const TieBreaker& tie, long long trials,
                       std::uint64_t seed, const EvalOptions& opt = {});

// pandora_core convenience wrappers (basic tie rules on the raw instance).
EvalResult expected_outcome_exact(const PandoraInstance& inst, const TieBreakRule& tie,
                                  const EvalOptions& opt = {});
EvalResult expected_outcome_mc(const PandoraInstance& inst, const TieBreakRule& tie, long long trials,
                               std::uint64_t seed, const EvalOptions& opt = {});

// Exact optimal expected utility of the unconstrained problem by memoized
// backward induction over (opened set with realized atoms). Test oracle for
// tiny instances.
double brute_force_optimal_value(const PandoraInstance& inst, std::size_t state_cap = 10'000'000);

// Draws one realization for the given (seed, trial) pair.
Realization sample_realization(const PandoraInstance& inst, std::uint64_t seed, std::uint64_t trial);
Realization sample_realization(const ExecInstance& inst, std::uint64_t seed, std::uint64_t trial);

}  // namespace cmss
