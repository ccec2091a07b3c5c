#include "cmss/constraint.hpp"

#include <cmath>
#include <stdexcept>

namespace cmss {

void AffineConstraint::validate(const PandoraInstance& inst) const {
  const std::size_t n = inst.boxes.size();
  if (theta_sel.size() != n || theta_insp.size() != n)
    throw std::invalid_argument("constraint: coefficient vectors must cover all boxes");
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t m = inst.boxes[i].dist.size();
    if (theta_sel[i].per_atom && theta_sel[i].per_atom->size() != m)
      throw std::invalid_argument("constraint: value-specific theta_S must cover the full support");
    if (theta_insp[i].per_atom && theta_insp[i].per_atom->size() != m)
      throw std::invalid_argument("constraint: value-specific theta_I must cover the full support");
  }
}

double AffineConstraint::expected_theta_insp(const PandoraInstance& inst, int pos) const {
  const Coef& c = theta_insp[pos];
  if (!c.per_atom) return c.scalar;
  double e = 0.0;
  const auto& probs = inst.boxes[pos].dist.probs;
  for (std::size_t a = 0; a < probs.size(); ++a) e += probs[a] * (*c.per_atom)[a];
  return e;
}

bool AffineConstraint::all_zero() const {
  auto zero = [](const Coef& c) {
    if (!c.per_atom) return c.scalar == 0.0;
    for (double x : *c.per_atom)
      if (x != 0.0) return false;
    return true;
  };
  for (const auto& c : theta_sel)
    if (!zero(c)) return false;
  for (const auto& c : theta_insp)
    if (!zero(c)) return false;
  return true;
}

double AffineConstraint::min_nonzero_coef(const PandoraInstance& inst) const {
  double m = 0.0;
  auto consider = [&m](double x) {
    const double a = std::fabs(x);
    if (a > 1e-14 && (m == 0.0 || a < m)) m = a;
  };
  for (const auto& c : theta_sel) {
    if (c.per_atom)
      for (double x : *c.per_atom) consider(x);
    else
      consider(c.scalar);
  }
  for (std::size_t i = 0; i < theta_insp.size(); ++i) consider(expected_theta_insp(inst, static_cast<int>(i)));
  return m;
}

AffineConstraint AffineConstraint::negated() const { return scaled(-1.0); }

AffineConstraint AffineConstraint::scaled(double w) const {
  AffineConstraint r = *this;
  auto scale = [w](Coef& c) {
    c.scalar *= w;
    if (c.per_atom)
      for (double& x : *c.per_atom) x *= w;
  };
  for (auto& c : r.theta_sel) scale(c);
  for (auto& c : r.theta_insp) scale(c);
  r.bound *= w;
  return r;
}

AffineConstraint AffineConstraint::combination(const std::vector<AffineConstraint>& cs,
                                               const std::vector<double>& weights) {
  if (cs.empty() || cs.size() != weights.size())
    throw std::invalid_argument("constraint combination: size mismatch");
  const std::size_t n = cs[0].theta_sel.size();
  AffineConstraint out;
  out.theta_sel.resize(n);
  out.theta_insp.resize(n);
  out.bound = 0.0;
  out.sense = ConstraintSense::equality;
  auto add = [](Coef& dst, const Coef& src, double w) {
    if (!src.per_atom) {
      if (dst.per_atom)
        for (double& x : *dst.per_atom) x += w * src.scalar;
      else
        dst.scalar += w * src.scalar;
      return;
    }
    if (!dst.per_atom) {
      dst.per_atom = std::vector<double>(src.per_atom->size(), dst.scalar);
      dst.scalar = 0.0;
    }
    for (std::size_t a = 0; a < src.per_atom->size(); ++a) (*dst.per_atom)[a] += w * (*src.per_atom)[a];
  };
  for (std::size_t j = 0; j < cs.size(); ++j) {
    if (cs[j].theta_sel.size() != n) throw std::invalid_argument("constraint combination: box count mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      add(out.theta_sel[i], cs[j].theta_sel[i], weights[j]);
      add(out.theta_insp[i], cs[j].theta_insp[i], weights[j]);
    }
    out.bound += weights[j] * cs[j].bound;
  }
  return out;
}

}  // namespace cmss
