#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace heston::testing {

/// Sample mean and variance with standard errors for both, the latter
/// from the fourth central moment.
struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;
  double mean_se = 0.0;
  double variance_se = 0.0;
};

inline SampleMoments sample_moments(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = (x - mean) * (x - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  SampleMoments s;
  s.mean = mean;
  s.variance = m2 * n / (n - 1.0);
  s.mean_se = std::sqrt(m2 / n);
  s.variance_se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
  return s;
}

inline bool within_se(double value, double target, double se, double k = 3.0) {
  return std::abs(value - target) <= k * se;
}

}  // namespace heston::testing
