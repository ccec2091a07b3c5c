#pragma once

#include <cstdint>

namespace cmss {

// Standard normal pdf / cdf / quantile. The quantile uses Wichura's AS241
// rational approximations (double precision), so results are identical
// across platforms, which keeps seeded instance generation reproducible.
double normal_pdf(double z);
double normal_cdf(double z);
double normal_ppf(double p);

// 64-bit mix (splitmix64 finalizer). Used to derive independent RNG
// substreams from (seed, trial, index) triples.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

// Deterministic counter-based uniform in [0,1). Stateless: the n-th draw of
// substream (seed,a,b) is the same no matter which thread asks for it.
double uniform01(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t n);

struct RunningStat {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stderr_mean() const;
};

}  // namespace cmss
