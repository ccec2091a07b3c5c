#include "cmss/distribution.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cmss {

ValueDistribution::ValueDistribution(std::vector<double> s, std::vector<double> p)
    : support(std::move(s)), probs(std::move(p)) {
  validate();
}

void ValueDistribution::validate() const {
  if (support.empty()) throw std::invalid_argument("distribution: empty support");
  if (support.size() != probs.size())
    throw std::invalid_argument("distribution: support/probs length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!std::isfinite(support[i])) throw std::invalid_argument("distribution: non-finite support value");
    if (probs[i] < 0.0) throw std::invalid_argument("distribution: negative probability");
    if (i > 0 && !(support[i] > support[i - 1]))
      throw std::invalid_argument("distribution: support not strictly increasing");
    total += probs[i];
  }
  if (std::fabs(total - 1.0) > 1e-12) throw std::invalid_argument("distribution: probabilities do not sum to 1");
}

double ValueDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) m += support[i] * probs[i];
  return m;
}

double ValueDistribution::expected_excess(double sigma) const {
  double e = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i] > sigma) e += probs[i] * (support[i] - sigma);
  return e;
}

double ValueDistribution::prob_greater(double t) const {
  double p = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i] > t) p += probs[i];
  return p;
}

double ValueDistribution::prob_greater_equal(double t) const {
  double p = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i] >= t) p += probs[i];
  return p;
}

ValueDistribution ValueDistribution::point(double v) { return ValueDistribution({v}, {1.0}); }

double reservation_index(const ValueDistribution& dist, double cost) {
  if (cost < 0.0) return std::numeric_limits<double>::infinity();
  if (cost == 0.0) return dist.max_value();

  // E[(v - sigma)^+] is piecewise linear and strictly decreasing below
  // max(support); walk the pieces from the top and solve the matching one.
  const auto& v = dist.support;
  const auto& p = dist.probs;
  const int n = static_cast<int>(v.size());
  double tail_prob = 0.0;  // P[v >= v_j] for the piece below v_j
  double tail_sum = 0.0;   // sum of p_i * v_i over that tail
  for (int j = n - 1; j >= 0; --j) {
    tail_prob += p[j];
    tail_sum += p[j] * v[j];
    // On sigma in [v_{j-1}, v_j]: E = tail_sum - sigma * tail_prob.
    const double lo = (j > 0) ? v[j - 1] : -std::numeric_limits<double>::infinity();
    if (tail_prob <= 0.0) continue;
    const double sigma = (tail_sum - cost) / tail_prob;
    if (sigma >= lo && sigma <= v[j]) return sigma;
  }
  // cost exceeds E[(v - min)^+]; below the support E = mean - sigma.
  return dist.mean() - cost;
}

}  // namespace cmss
