#pragma once

#include <string>
#include <vector>

namespace cmss {

// Finite discrete value distribution with strictly increasing support.
struct ValueDistribution {
  std::vector<double> support;  // strictly increasing
  std::vector<double> probs;    // same length, nonnegative, sums to 1

  ValueDistribution() = default;
  ValueDistribution(std::vector<double> s, std::vector<double> p);

  // Throws std::invalid_argument on any broken invariant.
  void validate() const;

  std::size_t size() const { return support.size(); }
  double mean() const;
  double min_value() const { return support.front(); }
  double max_value() const { return support.back(); }

  // E[(v - sigma)^+]
  double expected_excess(double sigma) const;
  double prob_greater(double t) const;          // P[v > t]
  double prob_greater_equal(double t) const;    // P[v >= t]

  // Single deterministic atom.
  static ValueDistribution point(double v);
};

// Reservation index per the redefined rule: +inf when cost < 0, otherwise
// the infimum sigma with E[(v - sigma)^+] = cost. cost = 0 gives max support;
// costs above E[(v - min)^+] resolve below the support (always solvable).
double reservation_index(const ValueDistribution& dist, double cost);

}  // namespace cmss
