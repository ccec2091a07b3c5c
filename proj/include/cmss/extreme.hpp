#pragma once

#include <memory>

#include "cmss/adjusted.hpp"

namespace cmss {

// Score with explicit infinity classes so degenerate branches order cleanly.
struct ExtScore {
  int cls = 0;  // -1: -inf, 0: finite, +1: +inf
  double val = 0.0;

  static ExtScore pos_inf() { return {+1, 0.0}; }
  static ExtScore neg_inf() { return {-1, 0.0}; }
  static ExtScore finite(double v) { return {0, v}; }
};

// 3-way comparison with tolerance on the finite part.
int compare(const ExtScore& a, const ExtScore& b, double tol);

// One lexicographic scoring level in negative-extreme form: the rule pushes
// this constraint's slack down. The positive-extreme rule is the same scorer
// on the negated constraint.
struct ScoreLevel {
  std::vector<std::vector<double>> theta_sel;  // [box][exec-atom order]
  std::vector<double> e_theta_insp;            // [box]
};

ScoreLevel make_score_level(const PandoraInstance& base, const ExecInstance& exec,
                            const AffineConstraint& constraint);

// Refined extreme tie-breaking score of one candidate (-1 = outside option)
// given the current execution context. Handles value-specific coefficients;
// scalar constraints reduce to the basic rule.
ExtScore refined_extreme_score(const TieContext& ctx, int candidate, const ScoreLevel& level,
                               const ExecParams& params);

// Basic rule for scalar coefficients, implemented directly from its case
// analysis. Used as a cross-check of the refined scorer.
ExtScore basic_extreme_score(const TieContext& ctx, int candidate, double theta_sel, double theta_insp,
                             const ExecParams& params);

// Tie-breaker maximizing the level scores lexicographically; falls back to
// lowest box id (outside option last).
class ExtremeTie final : public TieBreaker {
 public:
  ExtremeTie(std::vector<ScoreLevel> levels, ExecParams params)
      : levels_(std::move(levels)), params_(params) {}
  int pick(const TieContext& ctx) const override;

 private:
  std::vector<ScoreLevel> levels_;
  ExecParams params_;
};

// Materializes any rule kind against an adjusted instance. negative_extreme /
// positive_extreme require exactly one constraint; perturbation rules build
// one level per omega vector (each maximizing omega . slack).
std::unique_ptr<TieBreaker> make_tiebreaker(const TieBreakRule& rule, const DualAdjustedInstance& adj,
                                            const ExecParams& params = {});

}  // namespace cmss
