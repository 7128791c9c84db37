#pragma once

#include <complex>
#include <functional>
#include <span>

#include "heston/model.hpp"

namespace heston {

using cdouble = std::complex<double>;

/// Characteristic function E[exp(i u ln(S_T / S_0))] for complex u, in the
/// rotation-count-free form (the complex log never crosses its branch cut).
cdouble heston_charfn(cdouble u, const ModelParams& model, double T);

/// Product of independent factor characteristic functions sharing (s0, r, q);
/// the (r - q) drift is counted once.
cdouble multifactor_charfn(cdouble u, std::span<const ModelParams> factors, double T);

struct QuadratureSpec {
  enum class Rule { adaptive_lobatto };
  Rule rule = Rule::adaptive_lobatto;
  double tolerance = 1e-11;  // absolute, on the integral
  /// Upper truncation of the Fourier integral; 0 selects it automatically by
  /// extending the range until a further segment contributes below tolerance.
  double upper_bound = 0.0;
  int max_depth = 40;
};

/// Adaptive Gauss-Lobatto (4-point / 7-point Kronrod pair) on [a, b].
double integrate_lobatto(const std::function<double(double)>& f, double a, double b,
                         double tolerance, int max_depth = 40);

/// Call price from any log-return characteristic function (Lewis contour at Im u = -1/2).
double price_call_from_charfn(const std::function<cdouble(cdouble)>& charfn, double s0,
                              double r, double q, double T, double strike,
                              const QuadratureSpec& quad = {});

double price_european_exact(const ModelParams& model, double T, double strike,
                            const QuadratureSpec& quad = {});

double price_multifactor_exact(std::span<const ModelParams> factors, double T, double strike,
                               const QuadratureSpec& quad = {});

double normal_cdf(double x);

/// Undiscounted Black call F N(d1) - X N(d2); sigma = 0 gives max(F - X, 0).
double bs_call_undiscounted(double forward, double sigma, double T, double strike);

/// Continuously monitored fair strike E(R_{0,T}).
double varswap_strike_continuous(const ModelParams& model, double T);

/// Fair strike of the variance swap monitored every h = T / N.
double varswap_strike_discrete(const ModelParams& model, double T, double h);

}  // namespace heston
