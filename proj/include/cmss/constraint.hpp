#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmss/pandora.hpp"

namespace cmss {

enum class ConstraintSense { equality, leq };

// One ex-ante affine constraint E[sum theta_S(v_i) A_i + sum theta_I(v_i) I_i] = b (or <= b).
// Coefficients are stored per box position; a coefficient is either a scalar
// or a per-support-value map (value-specific constraints).
struct AffineConstraint {
  struct Coef {
    double scalar = 0.0;
    std::optional<std::vector<double>> per_atom;  // aligned with the box's original support

    double at(int atom) const { return per_atom ? (*per_atom)[atom] : scalar; }
    bool value_specific() const { return per_atom.has_value(); }
  };

  std::vector<Coef> theta_sel;   // by box position
  std::vector<Coef> theta_insp;  // by box position
  double bound = 0.0;
  ConstraintSense sense = ConstraintSense::equality;
  std::string label;

  void validate(const PandoraInstance& inst) const;

  // E_{v~F_i}[theta_I_i(v)] for box position i.
  double expected_theta_insp(const PandoraInstance& inst, int pos) const;

  // True when every coefficient is exactly zero (constraint degenerates to a
  // constant).
  bool all_zero() const;

  // Smallest nonzero coefficient magnitude (over theta_S atoms and
  // E[theta_I]); used for the dual search bound. Returns 0 when all_zero().
  double min_nonzero_coef(const PandoraInstance& inst) const;

  AffineConstraint negated() const;
  AffineConstraint scaled(double w) const;
  static AffineConstraint combination(const std::vector<AffineConstraint>& cs,
                                      const std::vector<double>& weights);
};

// Slack sign convention follows the dual function: slack = bound - E[lhs].
// Zero slack means the constraint holds exactly; positive slack satisfies a
// <= constraint strictly.

}  // namespace cmss
