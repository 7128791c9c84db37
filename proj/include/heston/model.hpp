#pragma once

namespace heston {

/// Heston parameter set. The CIR constants delta and nu are always derived
/// from (kappa, theta, xi) on demand and never stored.
struct ModelParams {
  double s0 = 100.0;
  double v0 = 0.04;
  double kappa = 1.0;   // mean-reversion speed
  double theta = 0.04;  // mean-reversion level
  double xi = 1.0;      // vol-of-vol
  double rho = 0.0;
  double r = 0.0;  // decimals, e.g. 0.0319 for 3.19%
  double q = 0.0;

  /// Degrees of freedom of the noncentral chi-square transition, 4 kappa theta / xi^2.
  double delta() const { return 4.0 * kappa * theta / (xi * xi); }
  /// Bessel order delta/2 - 1.
  double nu() const { return 0.5 * delta() - 1.0; }

  /// Throws ParameterError naming the offending field.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct VarianceMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// (2 kappa_arg / xi^2) / sinh(kappa_arg t / 2).
double phi(double kappa_arg, double t, double xi);

/// Mean and variance of V_t given V_0 = v0.
VarianceMoments terminal_variance_moments(double v0, double t, const ModelParams& model);

/// Mean and variance of the average variance (1/t) * int_0^t V_s ds, starting from model.v0.
VarianceMoments avg_variance_moments(const ModelParams& model, double t);

}  // namespace heston
