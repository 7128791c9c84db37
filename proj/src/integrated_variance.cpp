#include "heston/integrated_variance.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <string>

#include "heston/bessel.hpp"
#include "heston/errors.hpp"

namespace heston {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

// Taylor coefficients in a^2 (a^0 .. a^20) of m_x, v_x, m_z, v_z.
constexpr double kMxSeries[] = {1.0 / 3.0,
                                -2.0 / 45.0,
                                2.0 / 315.0,
                                -4.0 / 4725.0,
                                2.0 / 18711.0,
                                -2764.0 / 212837625.0,
                                4.0 / 2606175.0,
                                -28936.0 / 162820783125.0,
                                87734.0 / 4331032831125.0,
                                -698444.0 / 306265893058125.0,
                                310732.0 / 1222532449149375.0};
constexpr double kVxSeries[] = {1.0 / 45.0,
                                -2.0 / 315.0,
                                2.0 / 1575.0,
                                -4.0 / 18711.0,
                                1382.0 / 42567525.0,
                                -4.0 / 868725.0,
                                14468.0 / 23260111875.0,
                                -350936.0 / 4331032831125.0,
                                349222.0 / 34029543673125.0,
                                -310732.0 / 244506489829875.0,
                                945456364.0 / 6118774907992621875.0};
constexpr double kMzSeries[] = {1.0 / 12.0,
                                -1.0 / 180.0,
                                1.0 / 1890.0,
                                -1.0 / 18900.0,
                                1.0 / 187110.0,
                                -691.0 / 1277025750.0,
                                1.0 / 18243225.0,
                                -3617.0 / 651283132500.0,
                                43867.0 / 77958590960250.0,
                                -174611.0 / 3062658930581250.0,
                                77683.0 / 13447856940643125.0};
constexpr double kVzSeries[] = {1.0 / 360.0,
                                -1.0 / 1890.0,
                                1.0 / 12600.0,
                                -1.0 / 93555.0,
                                691.0 / 510810300.0,
                                -1.0 / 6081075.0,
                                3617.0 / 186080895000.0,
                                -87734.0 / 38979295480125.0,
                                174611.0 / 680590873462500.0,
                                -77683.0 / 2689571388128625.0,
                                236364091.0 / 73425298895911462500.0};

// Below this a the closed forms lose more than ~1e-13 to cancellation
// (v_z divides an O(a^4) numerator by a^4); the series is exact to rounding there.
constexpr double kSeriesSwitch = 0.5;

template <std::size_t N>
double even_series(const double (&c)[N], double a2) {
  double acc = 0.0;
  for (std::size_t i = N; i-- > 0;) acc = acc * a2 + c[i];
  return acc;
}

// ln sinh(x) for x > 0 without overflow
double log_sinh(double x) {
  if (x < 20.0) return std::log(std::sinh(x));
  return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2;
}

// (2 k / xi^2) coth(k h / 2), which is cosh(k h/2) phi_h(k)
double coth_phi(double k, double h, double xi) {
  return (2.0 * k / (xi * xi)) / std::tanh(0.5 * k * h);
}

void require_positive_pair(double v0, double vT, const char* who) {
  if (!(v0 > 0.0) || !(vT > 0.0)) {
    throw ParameterError(std::string(who) + ": variances must be positive");
  }
}

struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

double SeriesCoeffs::lambda(std::int64_t k) const {
  const double kk = static_cast<double>(k);
  const double four_k2_pi2 = 4.0 * kk * kk * kPi2;
  const double kh = kappa * h;
  return 4.0 * four_k2_pi2 / (xi * xi * h * (kh * kh + four_k2_pi2));
}

double SeriesCoeffs::gamma(std::int64_t k) const {
  const double kk = static_cast<double>(k);
  const double kh = kappa * h;
  return (kh * kh + 4.0 * kk * kk * kPi2) / (2.0 * xi * xi * h * h);
}

SeriesCoeffs series_coeffs(const ModelParams& model, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("series_coeffs: h must be positive");
  SeriesCoeffs s;
  s.h = h;
  s.kappa = model.kappa;
  s.xi = model.xi;
  const double a = 0.5 * model.kappa * h;
  if (!(a > 0.0) || a > 700.0) {
    throw DomainError("series_coeffs: a = kappa h / 2 outside (0, 700]");
  }
  s.a = a;
  s.c1 = 1.0 / std::tanh(a);
  const double sh = std::sinh(a);
  s.c2 = a > 350.0 ? 0.0 : 1.0 / (sh * sh);

  if (a < kSeriesSwitch) {
    const double a2 = a * a;
    s.m_x = even_series(kMxSeries, a2);
    s.v_x = even_series(kVxSeries, a2);
    s.m_z = even_series(kMzSeries, a2);
    s.v_z = even_series(kVzSeries, a2);
  } else {
    const double c1 = s.c1;
    const double c2 = s.c2;
    s.m_x = (c1 - a * c2) / (2.0 * a);
    s.v_x = (c1 + a * c2 - 2.0 * a * a * c1 * c2) / (8.0 * a * a * a);
    s.m_z = (a * c1 - 1.0) / (4.0 * a * a);
    s.v_z = (a * c1 + a * a * c2 - 2.0) / (16.0 * a * a * a * a);
  }
  return s;
}

TruncationSums truncation_sums(const SeriesCoeffs& coeffs, std::int64_t K) {
  if (K < 0) throw ParameterError("truncation_sums: K must be nonnegative");
  TruncationSums out;
  out.K = K;
  Neumaier s1, s2, s3, s4;
  for (std::int64_t k = K; k >= 1; --k) {
    const double lam = coeffs.lambda(k);
    const double inv_g = 1.0 / coeffs.gamma(k);
    s1.add(lam * inv_g);
    s2.add(inv_g);
    s3.add(2.0 * lam * inv_g * inv_g);
    s4.add(inv_g * inv_g);
  }
  out.lambda_over_gamma = s1.value();
  out.inv_gamma = s2.value();
  out.two_lambda_over_gamma2 = s3.value();
  out.inv_gamma2 = s4.value();
  return out;
}

IvMoments bessel_variate_moments(double nu, double z) {
  const double log_i0 = log_bessel_iv_scaled(nu, z);
  const double r1 = std::exp(log_bessel_iv_scaled(nu + 1.0, z) - log_i0);
  const double r2 = std::exp(log_bessel_iv_scaled(nu + 2.0, z) - log_i0);
  IvMoments out;
  out.mean = 0.5 * z * r1;
  out.variance = 0.25 * z * z * r2 + out.mean - out.mean * out.mean;
  if (out.variance < 0.0) out.variance = 0.0;
  return out;
}

IvMoments iv_moments_bessel(double v0, double vT, const ModelParams& model, double h) {
  require_positive_pair(v0, vT, "iv_moments_bessel");
  const SeriesCoeffs s = series_coeffs(model, h);
  const double z = std::sqrt(v0 * vT) * phi(model.kappa, h, model.xi);
  const IvMoments eta = bessel_variate_moments(model.nu(), z);
  if (!std::isfinite(eta.mean) || !std::isfinite(eta.variance)) {
    throw DomainError("iv_moments_bessel: Bessel ratio evaluation failed");
  }
  const double xi2 = model.xi * model.xi;
  const double h2 = h * h;
  const double half_delta = 0.5 * model.delta();
  const double ez2 = 2.0 * s.m_z * xi2 * h2;       // E(Z_2)
  const double vz2 = 2.0 * s.v_z * xi2 * xi2 * h2 * h2;  // Var(Z_2)
  IvMoments out;
  out.mean = (v0 + vT) * s.m_x * h + half_delta * s.m_z * xi2 * h2 + eta.mean * ez2;
  out.variance = (v0 + vT) * s.v_x * xi2 * h2 * h + half_delta * s.v_z * xi2 * xi2 * h2 * h2 +
                 eta.mean * vz2 + eta.variance * ez2 * ez2;
  return out;
}

IvMoments iv_moments_pois(double v0, double vT, std::int64_t mu, const ModelParams& model,
                          const SeriesCoeffs& s) {
  const double xi2 = model.xi * model.xi;
  const double h = s.h;
  const double h2 = h * h;
  const double shape = 0.5 * model.delta() + 2.0 * static_cast<double>(mu);
  IvMoments out;
  out.mean = (v0 + vT) * s.m_x * h + shape * s.m_z * xi2 * h2;
  out.variance = (v0 + vT) * s.v_x * xi2 * h2 * h + shape * s.v_z * xi2 * xi2 * h2 * h2;
  return out;
}

IvMoments iv_moments_pois(double v0, double vT, std::int64_t mu, const ModelParams& model,
                          double h) {
  require_positive_pair(v0, vT, "iv_moments_pois");
  if (mu < 0) throw ParameterError("iv_moments_pois: mu must be nonnegative");
  return iv_moments_pois(v0, vT, mu, model, series_coeffs(model, h));
}

IvMoments iv_moments_truncated(const TruncationSums& sums, double v0, double vT,
                               std::int64_t mu, const ModelParams& model,
                               const SeriesCoeffs& s) {
  const IvMoments full = iv_moments_pois(v0, vT, mu, model, s);
  if (sums.K == 0) return full;
  const double shape = 0.5 * model.delta() + 2.0 * static_cast<double>(mu);
  IvMoments out;
  out.mean = full.mean - ((v0 + vT) * sums.lambda_over_gamma + shape * sums.inv_gamma);
  out.variance =
      full.variance - ((v0 + vT) * sums.two_lambda_over_gamma2 + shape * sums.inv_gamma2);
  const auto clamp = [](double& value, double reference, const char* what) {
    if (value >= 0.0) return;
    if (value < -1e-14 * reference) {
      throw NumericalError(std::string("iv_moments_truncated: negative remainder ") + what);
    }
    assert(value >= -1e-14 * reference);
    value = 0.0;
  };
  clamp(out.mean, full.mean, "mean");
  clamp(out.variance, full.variance, "variance");
  return out;
}

IvMoments iv_moments_truncated(std::int64_t K, double v0, double vT, std::int64_t mu,
                               const ModelParams& model, double h) {
  require_positive_pair(v0, vT, "iv_moments_truncated");
  if (K < 0) throw ParameterError("iv_moments_truncated: K must be nonnegative");
  if (mu < 0) throw ParameterError("iv_moments_truncated: mu must be nonnegative");
  const SeriesCoeffs s = series_coeffs(model, h);
  return iv_moments_truncated(truncation_sums(s, K), v0, vT, mu, model, s);
}

namespace {

// Shared pieces of both transforms: the X factor exponent and ln(phi(kappa_u)/phi(kappa)).
struct LaplaceParts {
  double x_exponent;
  double log_phi_ratio;
  double kappa_u;
};

LaplaceParts laplace_parts(double u, double v0, double vT, const ModelParams& m, double h) {
  if (!(u >= 0.0) || !std::isfinite(u)) throw ParameterError("Laplace argument must be >= 0");
  if (!(h > 0.0)) throw ParameterError("Laplace transform: h must be positive");
  const double ku = std::sqrt(m.kappa * m.kappa + 2.0 * m.xi * m.xi * u);
  if (0.5 * ku * h > 700.0) throw DomainError("Laplace transform: kappa_u h / 2 exceeds 700");
  LaplaceParts p;
  p.kappa_u = ku;
  p.x_exponent = -0.5 * (v0 + vT) * (coth_phi(ku, h, m.xi) - coth_phi(m.kappa, h, m.xi));
  p.log_phi_ratio =
      std::log(ku / m.kappa) + log_sinh(0.5 * m.kappa * h) - log_sinh(0.5 * ku * h);
  return p;
}

}  // namespace

double cond_laplace_pois(double u, double v0, double vT, std::int64_t mu,
                         const ModelParams& model, double h) {
  require_positive_pair(v0, vT, "cond_laplace_pois");
  if (mu < 0) throw ParameterError("cond_laplace_pois: mu must be nonnegative");
  if (u == 0.0) return 1.0;
  const LaplaceParts p = laplace_parts(u, v0, vT, model, h);
  const double shape = 0.5 * model.delta() + 2.0 * static_cast<double>(mu);
  return std::exp(p.x_exponent + shape * p.log_phi_ratio);
}

double cond_laplace_bk(double u, double v0, double vT, const ModelParams& model, double h) {
  require_positive_pair(v0, vT, "cond_laplace_bk");
  if (u == 0.0) return 1.0;
  const LaplaceParts p = laplace_parts(u, v0, vT, model, h);
  const double root = std::sqrt(v0 * vT);
  const double z = root * phi(model.kappa, h, model.xi);
  const double z_u = root * phi(p.kappa_u, h, model.xi);
  const double nu = model.nu();
  const double log_bessel_ratio =
      log_bessel_iv_scaled(nu, z_u) + z_u - log_bessel_iv_scaled(nu, z) - z;
  const double value = std::exp(p.x_exponent + p.log_phi_ratio + log_bessel_ratio);
  if (!std::isfinite(value)) throw DomainError("cond_laplace_bk: evaluation overflowed");
  return value;
}

}  // namespace heston
