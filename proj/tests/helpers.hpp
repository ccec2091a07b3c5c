#pragma once

#include <random>

#include "cmss/constraint.hpp"
#include "cmss/pandora.hpp"

namespace cmss::testing {

// Four candidates, k = 1, all costs 1; boxes 1,2 in group X and 3,4 in Y.
inline PandoraInstance example_fs() {
  PandoraInstance inst;
  inst.capacity = 1;
  inst.boxes = {
      {1, ValueDistribution({4.0, 10.0}, {0.5, 0.5}), 1.0, "X"},
      {2, ValueDistribution({3.0, 9.0}, {0.5, 0.5}), 1.0, "X"},
      {3, ValueDistribution({2.0, 8.0}, {0.5, 0.5}), 1.0, "Y"},
      {4, ValueDistribution({1.0, 7.0}, {0.5, 0.5}), 1.0, "Y"},
  };
  return inst;
}

// Four candidates with equal top-three reservation indices (6,6,6,5).
inline PandoraInstance example_tie() {
  PandoraInstance inst;
  inst.capacity = 1;
  inst.boxes = {
      {1, ValueDistribution({4.0, 7.5}, {1.0 / 3.0, 2.0 / 3.0}), 1.0, "X"},
      {2, ValueDistribution({4.0, 9.0}, {2.0 / 3.0, 1.0 / 3.0}), 1.0, "X"},
      {3, ValueDistribution({4.0, 10.0}, {3.0 / 4.0, 1.0 / 4.0}), 1.0, "Y"},
      {4, ValueDistribution({4.0, 7.0}, {1.0 / 2.0, 1.0 / 2.0}), 1.0, "Y"},
  };
  return inst;
}

// Three candidates with sigma_1 = sigma_2 = sigma_3 = 4; boxes 1,2 in X and 3
// in Y; p2 = 0.1, p3 = 0.8.
inline PandoraInstance counterexample_3box() {
  PandoraInstance inst;
  inst.capacity = 1;
  inst.boxes = {
      {1, ValueDistribution({6.0}, {1.0}), 2.0, "X"},
      {2, ValueDistribution({2.0, 14.0}, {0.9, 0.1}), 1.0, "X"},
      {3, ValueDistribution({3.0, 9.0}, {0.2, 0.8}), 4.0, "Y"},
  };
  return inst;
}

inline AffineConstraint scalar_constraint(const PandoraInstance& inst, const std::vector<double>& ts,
                                          const std::vector<double>& ti, double b, ConstraintSense sense) {
  AffineConstraint c;
  c.theta_sel.resize(inst.boxes.size());
  c.theta_insp.resize(inst.boxes.size());
  for (std::size_t i = 0; i < inst.boxes.size(); ++i) {
    c.theta_sel[i].scalar = ts[i];
    c.theta_insp[i].scalar = ti[i];
  }
  c.bound = b;
  c.sense = sense;
  return c;
}

// Parity in selection: theta_S = +1 on X, -1 on Y, b = 0, equality.
inline AffineConstraint parity_selection(const PandoraInstance& inst) {
  std::vector<double> ts, ti(inst.boxes.size(), 0.0);
  for (const auto& b : inst.boxes) ts.push_back(b.group == "Y" ? -1.0 : 1.0);
  return scalar_constraint(inst, ts, ti, 0.0, ConstraintSense::equality);
}

inline AffineConstraint parity_inspection(const PandoraInstance& inst) {
  std::vector<double> ti, ts(inst.boxes.size(), 0.0);
  for (const auto& b : inst.boxes) ti.push_back(b.group == "Y" ? -1.0 : 1.0);
  return scalar_constraint(inst, ts, ti, 0.0, ConstraintSense::equality);
}

inline PandoraInstance random_tiny_instance(std::mt19937_64& rng, int max_boxes = 4, int max_support = 3,
                                            int max_k = 2) {
  std::uniform_int_distribution<int> nd(1, max_boxes), sd(1, max_support);
  std::uniform_real_distribution<double> vd(-3.0, 8.0), cd(-0.5, 2.5), ud(0.0, 1.0);
  PandoraInstance inst;
  const int n = nd(rng);
  inst.capacity = std::min(n, std::uniform_int_distribution<int>(1, max_k)(rng));
  for (int i = 0; i < n; ++i) {
    const int m = sd(rng);
    std::vector<double> sup;
    while (static_cast<int>(sup.size()) < m) {
      double v = std::round(vd(rng) * 4.0) / 4.0;
      bool dup = false;
      for (double s : sup) dup |= (s == v);
      if (!dup) sup.push_back(v);
    }
    std::sort(sup.begin(), sup.end());
    std::vector<double> pr(sup.size());
    double tot = 0.0;
    for (auto& p : pr) {
      p = 1.0 + std::floor(ud(rng) * 4.0);
      tot += p;
    }
    for (auto& p : pr) p /= tot;
    inst.boxes.push_back({i + 1, ValueDistribution(sup, pr), std::round(cd(rng) * 4.0) / 4.0, i % 2 ? "Y" : "X"});
  }
  return inst;
}

}  // namespace cmss::testing
