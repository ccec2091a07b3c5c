#pragma once

#include "cmss/constraint.hpp"
#include "cmss/pandora.hpp"

namespace cmss {

// Instance with rewards/costs shifted by the dual variables:
//   v~ = v - sum_j lambda_j theta_S_j(v),  c~ = c + sum_j lambda_j E[theta_I_j].
// Supports are re-sorted after adjustment; equal adjusted values are kept as
// separate atoms (ordering merges, probability mass does not).
struct DualAdjustedInstance {
  PandoraInstance base;
  std::vector<AffineConstraint> constraints;
  std::vector<double> lambda;  // one per constraint
  ExecInstance exec;           // adjusted execution view

  double lambda_scalar() const { return lambda.empty() ? 0.0 : lambda[0]; }
};

DualAdjustedInstance adjust_instance(const PandoraInstance& inst,
                                     const std::vector<AffineConstraint>& constraints,
                                     const std::vector<double>& lambda);

// Single-constraint convenience.
DualAdjustedInstance adjust_instance(const PandoraInstance& inst, const AffineConstraint& constraint,
                                     double lambda);

}  // namespace cmss
