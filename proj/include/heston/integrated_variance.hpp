#pragma once

#include <cstdint>

#include "heston/model.hpp"

namespace heston {

/// Gamma-expansion coefficients for a step of length h (a = kappa h / 2).
///
/// The moments of the series components are
///   E(X)   = (V0 + Vh) m_x h            Var(X)   = (V0 + Vh) v_x xi^2 h^3
///   E(Z_a) = a m_z xi^2 h^2             Var(Z_a) = a v_z xi^4 h^4
/// and the k-th series term carries rate lambda(k) and weight 1 / gamma(k).
struct SeriesCoeffs {
  double h = 0.0;
  double kappa = 0.0;
  double xi = 0.0;
  double a = 0.0;
  double c1 = 0.0;  // coth(a)
  double c2 = 0.0;  // 1 / sinh^2(a)
  double m_x = 0.0;
  double v_x = 0.0;
  double m_z = 0.0;
  double v_z = 0.0;

  /// 16 k^2 pi^2 / (xi^2 h (kappa^2 h^2 + 4 k^2 pi^2))
  double lambda(std::int64_t k) const;
  /// (kappa^2 h^2 + 4 k^2 pi^2) / (2 xi^2 h^2)
  double gamma(std::int64_t k) const;
};

SeriesCoeffs series_coeffs(const ModelParams& model, double h);

/// Partial sums over k = 1..K of the four per-term moment contributions.
struct TruncationSums {
  std::int64_t K = 0;
  double lambda_over_gamma = 0.0;     // sum lambda_k / gamma_k
  double inv_gamma = 0.0;             // sum 1 / gamma_k
  double two_lambda_over_gamma2 = 0.0;  // sum 2 lambda_k / gamma_k^2
  double inv_gamma2 = 0.0;            // sum 1 / gamma_k^2
};

/// Summed from the smallest term upwards with compensation so large K stays
/// accurate against the closed-form totals.
TruncationSums truncation_sums(const SeriesCoeffs& coeffs, std::int64_t K);

struct IvMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of eta ~ BES(nu, z).
IvMoments bessel_variate_moments(double nu, double z);

/// Moments of the integrated variance over [0, h] given (V0, Vh), with the
/// Bessel variate integrated out.
IvMoments iv_moments_bessel(double v0, double vT, const ModelParams& model, double h);

/// Moments of the integrated variance given (V0, Vh) and the Poisson count mu
/// of the variance transition. Uses elementary functions only.
IvMoments iv_moments_pois(double v0, double vT, std::int64_t mu, const ModelParams& model,
                          double h);
IvMoments iv_moments_pois(double v0, double vT, std::int64_t mu, const ModelParams& model,
                          const SeriesCoeffs& coeffs);

/// Moments of the series remainder after its first K terms.
IvMoments iv_moments_truncated(std::int64_t K, double v0, double vT, std::int64_t mu,
                               const ModelParams& model, double h);
IvMoments iv_moments_truncated(const TruncationSums& sums, double v0, double vT,
                               std::int64_t mu, const ModelParams& model,
                               const SeriesCoeffs& coeffs);

/// E(exp(-u I) | V0, Vh, mu): elementary closed form, no Bessel function.
double cond_laplace_pois(double u, double v0, double vT, std::int64_t mu,
                         const ModelParams& model, double h);

/// E(exp(-u I) | V0, Vh): the classical form with the Bessel ratio
/// I_nu(z_u) / I_nu(z).
double cond_laplace_bk(double u, double v0, double vT, const ModelParams& model, double h);

}  // namespace heston
