#include "heston/distributions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "heston/bessel.hpp"
#include "heston/errors.hpp"

namespace heston {

namespace {

std::int64_t poisson_inversion(double rate, RngStream& rng) {
  const double u = rng.uniform();
  double p = std::exp(-rate);
  double cdf = p;
  std::int64_t k = 0;
  // cap guards against u landing in the rounding gap above the summed cdf
  while (u > cdf && k < 1000) {
    ++k;
    p *= rate / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

std::int64_t poisson_ptrs(double rate, RngStream& rng) {
  const double slam = std::sqrt(rate);
  const double loglam = std::log(rate);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -rate + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

double gamma_shape_ge_one(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

std::int64_t sample_poisson(double rate, RngStream& rng) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw ParameterError("sample_poisson: rate must be finite and nonnegative, got " +
                         std::to_string(rate));
  }
  if (rate == 0.0) return 0;
  if (rate < 10.0) return poisson_inversion(rate, rng);
  if (rate > 1e15) {
    throw ParameterError(
        "sample_poisson: rate " + std::to_string(rate) +
        " exceeds 1e15; the variance step is too small for the Poisson-gamma transition");
  }
  return poisson_ptrs(rate, rng);
}

double sample_std_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw ParameterError("sample_std_gamma: shape must be positive and finite, got " +
                         std::to_string(shape));
  }
  if (shape >= 1.0) return gamma_shape_ge_one(shape, rng);
  const double g = gamma_shape_ge_one(shape + 1.0, rng);
  const double x = std::exp(std::log(g) + std::log(rng.uniform()) / shape);
  return std::max(x, std::numeric_limits<double>::min());
}

double sample_invgauss(double mu, double lambda, RngStream& rng) {
  if (!(mu > 0.0) || !(lambda > 0.0) || !std::isfinite(mu) || !std::isfinite(lambda)) {
    throw ParameterError("sample_invgauss: mu and lambda must be positive and finite");
  }
  const double n = rng.normal();
  const double y = mu * n * n;
  // smaller root of the quadratic, written without cancellation
  const double x = 2.0 * mu * lambda / (2.0 * lambda + y + std::sqrt(y * (y + 4.0 * lambda)));
  if (rng.uniform() * (mu + x) <= mu) return x;
  return mu * mu / x;
}

PoissonGammaTransition::PoissonGammaTransition(const ModelParams& model, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("transition step h must be positive");
  const double kh = model.kappa * h;
  const double xi2 = model.xi * model.xi;
  // phi e^{-kh/2}/2 = 2 kappa / (xi^2 (e^{kh} - 1)),  2 e^{-kh/2}/phi = xi^2 (1 - e^{-kh}) / (2 kappa)
  rate_per_variance_ = 2.0 * model.kappa / (xi2 * std::expm1(kh));
  scale_ = -xi2 * std::expm1(-kh) / (2.0 * model.kappa);
  half_delta_ = 0.5 * model.delta();
}

TerminalVarianceDraw sample_terminal_variance(double v0, double h, const ModelParams& model,
                                              RngStream& rng) {
  if (!(v0 > 0.0)) throw ParameterError("sample_terminal_variance: v0 must be positive");
  const PoissonGammaTransition transition(model, h);
  const auto draw = transition.sample(v0, rng);
  return {draw.v_next, draw.mu};
}

double bessel_pmf(std::int64_t j, double nu, double z) {
  if (j < 0) return 0.0;
  if (!(z > 0.0)) throw ParameterError("bessel_pmf: z must be positive");
  const double jd = static_cast<double>(j);
  const double log_p = (2.0 * jd + nu) * std::log(0.5 * z) - std::lgamma(jd + 1.0) -
                       std::lgamma(jd + nu + 1.0) - log_bessel_iv(nu, z);
  return std::exp(log_p);
}

std::int64_t sample_bessel_rv(double nu, double z, RngStream& rng) {
  if (!(nu > -1.0) || !std::isfinite(nu)) throw ParameterError("sample_bessel_rv: nu > -1 required");
  if (!(z > 0.0) || !std::isfinite(z)) throw ParameterError("sample_bessel_rv: z > 0 required");

  const double q = 0.25 * z * z;
  const double mode_real = 0.5 * (std::sqrt(nu * nu + z * z) - nu);
  const std::int64_t mode = static_cast<std::int64_t>(std::floor(std::max(0.0, mode_real)));
  const double p_mode = bessel_pmf(mode, nu, z);

  const double u = rng.uniform();
  double cdf = p_mode;
  if (u <= cdf) return mode;

  // Walk outward, always taking the more probable neighbour next.
  std::int64_t up = mode;
  std::int64_t down = mode;
  double p_up = p_mode;
  double p_down = p_mode;
  auto next_up = [&] {
    const double k = static_cast<double>(up);
    return p_up * q / ((k + 1.0) * (k + nu + 1.0));
  };
  auto next_down = [&] {
    if (down == 0) return 0.0;
    const double k = static_cast<double>(down);
    return p_down * k * (k + nu) / q;
  };
  double cand_up = next_up();
  double cand_down = next_down();
  for (;;) {
    if (cand_up <= 0.0 && cand_down <= 0.0) {
      return p_up >= p_down ? up : down;  // cdf stalled below u by rounding
    }
    if (cand_up >= cand_down) {
      ++up;
      p_up = cand_up;
      cdf += p_up;
      if (u <= cdf) return up;
      cand_up = next_up();
      if (cand_up < 1e-300) cand_up = 0.0;
    } else {
      --down;
      p_down = cand_down;
      cdf += p_down;
      if (u <= cdf) return down;
      cand_down = next_down();
    }
  }
}

}  // namespace heston
