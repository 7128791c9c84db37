#pragma once

namespace heston {

/// Modified Bessel function of the first kind I_nu(z) for nu > -1, z >= 0.
/// Throws DomainError when the value overflows a double (use the scaled form).
double bessel_iv(double nu, double z);

/// ln(e^{-z} I_nu(z)). Finite for every z > 0, including z far beyond the
/// overflow threshold of bessel_iv.
double log_bessel_iv_scaled(double nu, double z);

/// ln I_nu(z).
double log_bessel_iv(double nu, double z);

namespace detail {

/// Power series summed outward from its largest term in log space.
double log_bessel_iv_series(double nu, double z);

/// Large-z expansion e^{z}/sqrt(2 pi z) * sum_k (-1)^k a_k(nu) / z^k, scaled by e^{-z}.
/// Returns NaN when the expansion does not reach full precision before its
/// terms start growing (small z relative to nu^2).
double log_bessel_iv_scaled_asymptotic(double nu, double z);

/// Argument above which the asymptotic branch is tried first.
inline constexpr double kBesselAsymptoticThreshold = 50.0;

}  // namespace detail

}  // namespace heston
