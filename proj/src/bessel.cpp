#include "heston/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "heston/errors.hpp"

namespace heston {

namespace {

void check_args(double nu, double z) {
  if (!(nu > -1.0) || !std::isfinite(nu)) {
    throw ParameterError("bessel_iv: order must satisfy nu > -1");
  }
  if (!(z >= 0.0) || !std::isfinite(z)) {
    throw ParameterError("bessel_iv: argument must be finite and nonnegative");
  }
}

constexpr double kSeriesTol = 1e-17;

}  // namespace

namespace detail {

double log_bessel_iv_series(double nu, double z) {
  const double half_z = 0.5 * z;
  const double q = half_z * half_z;
  const double log_half_z = std::log(half_z);

  // term ratio t_{k+1}/t_k = q / ((k+1)(k+nu+1)) crosses 1 near this index
  const double peak_real = 0.5 * (std::sqrt(nu * nu + z * z) - nu);
  const double peak = std::floor(std::max(0.0, peak_real));
  const double log_peak_term =
      (2.0 * peak + nu) * log_half_z - std::lgamma(peak + 1.0) - std::lgamma(peak + nu + 1.0);

  double sum = 1.0;
  double term = 1.0;
  for (double k = peak;; k += 1.0) {
    term *= q / ((k + 1.0) * (k + nu + 1.0));
    sum += term;
    if (term < kSeriesTol * sum) break;
  }
  term = 1.0;
  for (double k = peak; k > 0.0; k -= 1.0) {
    term *= k * (k + nu) / q;
    sum += term;
    if (term < kSeriesTol * sum) break;
  }
  return log_peak_term + std::log(sum);
}

double log_bessel_iv_scaled_asymptotic(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double sum = 1.0;
  double term = 1.0;
  double prev_abs = 1.0;
  for (int k = 1; k < 500; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * z);
    const double abs_term = std::abs(term);
    if (abs_term > prev_abs) break;  // divergent tail reached
    sum += term;
    if (abs_term < 1e-17 * std::abs(sum)) {
      return -0.5 * std::log(2.0 * std::numbers::pi * z) + std::log(sum);
    }
    prev_abs = abs_term;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

double log_bessel_iv_scaled(double nu, double z) {
  check_args(nu, z);
  if (z == 0.0) {
    if (nu == 0.0) return 0.0;
    return nu > 0.0 ? -std::numeric_limits<double>::infinity()
                    : std::numeric_limits<double>::infinity();
  }
  if (z >= detail::kBesselAsymptoticThreshold) {
    const double asym = detail::log_bessel_iv_scaled_asymptotic(nu, z);
    if (!std::isnan(asym)) return asym;
  }
  return detail::log_bessel_iv_series(nu, z) - z;
}

double log_bessel_iv(double nu, double z) {
  const double scaled = log_bessel_iv_scaled(nu, z);
  return std::isfinite(scaled) ? scaled + z : scaled;
}

double bessel_iv(double nu, double z) {
  const double value = std::exp(log_bessel_iv(nu, z));
  if (std::isinf(value) && z > 0.0) {
    throw DomainError("bessel_iv: I_nu(z) overflows; use log_bessel_iv_scaled");
  }
  return value;
}

}  // namespace heston
