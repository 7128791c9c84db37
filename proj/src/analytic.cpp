#include "heston/analytic.hpp"

#include <cmath>
#include <numbers>

#include "heston/errors.hpp"

namespace heston {

namespace {

constexpr cdouble kI{0.0, 1.0};

// ln E[exp(i u X)] with X = ln(S_T/S_0) - (r - q) T.
cdouble heston_log_charfn_centered(cdouble u, const ModelParams& m, double T) {
  const double xi2 = m.xi * m.xi;
  const cdouble iu = kI * u;
  const cdouble beta = m.kappa - m.rho * m.xi * iu;
  const cdouble d = std::sqrt(beta * beta + xi2 * (iu + u * u));
  const cdouble bm = beta - d;
  const cdouble g = bm / (beta + d);
  const cdouble e = std::exp(-d * T);
  const cdouble one_minus_ge = 1.0 - g * e;
  const cdouble C = (m.kappa * m.theta / xi2) * (bm * T - 2.0 * std::log(one_minus_ge / (1.0 - g)));
  const cdouble D = (bm / xi2) * (1.0 - e) / one_minus_ge;
  return C + D * m.v0;
}

}  // namespace

cdouble heston_charfn(cdouble u, const ModelParams& model, double T) {
  if (!(T > 0.0)) throw ParameterError("heston_charfn: T must be positive");
  const cdouble value =
      std::exp(kI * u * ((model.r - model.q) * T) + heston_log_charfn_centered(u, model, T));
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw DomainError("heston_charfn: overflow");
  }
  return value;
}

cdouble multifactor_charfn(cdouble u, std::span<const ModelParams> factors, double T) {
  if (factors.empty()) throw ParameterError("multifactor_charfn: no factors");
  if (!(T > 0.0)) throw ParameterError("multifactor_charfn: T must be positive");
  const ModelParams& first = factors.front();
  cdouble log_value = kI * u * ((first.r - first.q) * T);
  for (const auto& f : factors) log_value += heston_log_charfn_centered(u, f, T);
  return std::exp(log_value);
}

namespace {

constexpr double kAlpha = 0.816496580927726;  // sqrt(2/3)
constexpr double kBeta = 0.447213595499958;   // 1/sqrt(5)

struct LobattoState {
  const std::function<double(double)>& f;
  double tol;
  int max_depth;
};

double lobatto_step(LobattoState& st, double a, double b, double fa, double fb, int depth) {
  const double h = 0.5 * (b - a);
  const double m = 0.5 * (a + b);
  const double mll = m - kAlpha * h;
  const double ml = m - kBeta * h;
  const double mr = m + kBeta * h;
  const double mrr = m + kAlpha * h;
  const double fmll = st.f(mll);
  const double fml = st.f(ml);
  const double fm = st.f(m);
  const double fmr = st.f(mr);
  const double fmrr = st.f(mrr);
  const double i2 = (h / 6.0) * (fa + fb + 5.0 * (fml + fmr));
  const double i1 =
      (h / 1470.0) * (77.0 * (fa + fb) + 432.0 * (fmll + fmrr) + 625.0 * (fml + fmr) + 672.0 * fm);
  if (std::abs(i1 - i2) <= st.tol || depth >= st.max_depth || mll <= a || b <= mrr) {
    return i1;
  }
  // Children share the parent's absolute budget; the error estimate is pessimistic
  // (it measures the 4-point rule) so this converges well inside tolerance.
  return lobatto_step(st, a, mll, fa, fmll, depth + 1) +
         lobatto_step(st, mll, ml, fmll, fml, depth + 1) +
         lobatto_step(st, ml, m, fml, fm, depth + 1) +
         lobatto_step(st, m, mr, fm, fmr, depth + 1) +
         lobatto_step(st, mr, mrr, fmr, fmrr, depth + 1) +
         lobatto_step(st, mrr, b, fmrr, fb, depth + 1);
}

}  // namespace

double integrate_lobatto(const std::function<double(double)>& f, double a, double b,
                         double tolerance, int max_depth) {
  if (!(b > a)) return 0.0;
  LobattoState st{f, tolerance, max_depth};
  return lobatto_step(st, a, b, f(a), f(b), 0);
}

double price_call_from_charfn(const std::function<cdouble(cdouble)>& charfn, double s0,
                              double r, double q, double T, double strike,
                              const QuadratureSpec& quad) {
  if (!(strike > 0.0) || !(T > 0.0) || !(s0 > 0.0)) {
    throw ParameterError("call pricing: s0, strike and T must be positive");
  }
  const double forward = s0 * std::exp((r - q) * T);
  const double k = std::log(forward / strike);
  const cdouble shift{0.0, -0.5};
  const double drift = (r - q) * T;
  const auto integrand = [&](double u) {
    const cdouble w = u + shift;
    // charfn of ln(S_T/F): remove the deterministic drift
    const cdouble centered = charfn(w) * std::exp(-kI * w * drift);
    return (std::exp(kI * u * k) * centered).real() / (u * u + 0.25);
  };

  double integral = 0.0;
  if (quad.upper_bound > 0.0) {
    integral = integrate_lobatto(integrand, 0.0, quad.upper_bound, quad.tolerance, quad.max_depth);
  } else {
    double lo = 0.0;
    double width = 25.0;
    for (int segment = 0; segment < 60; ++segment) {
      const double part =
          integrate_lobatto(integrand, lo, lo + width, quad.tolerance, quad.max_depth);
      integral += part;
      lo += width;
      if (std::abs(part) < 0.01 * quad.tolerance && segment > 0) break;
      if (segment == 59) throw NumericalError("call pricing: Fourier integral did not converge");
      width *= 1.5;
    }
  }
  const double price =
      std::exp(-r * T) * (forward - std::sqrt(forward * strike) * integral / std::numbers::pi);
  if (!std::isfinite(price)) throw NumericalError("call pricing: non-finite price");
  return price;
}

double price_european_exact(const ModelParams& model, double T, double strike,
                            const QuadratureSpec& quad) {
  model.validate();
  return price_call_from_charfn([&](cdouble u) { return heston_charfn(u, model, T); }, model.s0,
                                model.r, model.q, T, strike, quad);
}

double price_multifactor_exact(std::span<const ModelParams> factors, double T, double strike,
                               const QuadratureSpec& quad) {
  if (factors.empty()) throw ParameterError("price_multifactor_exact: no factors");
  for (const auto& f : factors) f.validate();
  const ModelParams& first = factors.front();
  return price_call_from_charfn([&](cdouble u) { return multifactor_charfn(u, factors, T); },
                                first.s0, first.r, first.q, T, strike, quad);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bs_call_undiscounted(double forward, double sigma, double T, double strike) {
  const double sd = sigma * std::sqrt(T);
  if (!(sd > 0.0)) return std::max(forward - strike, 0.0);
  const double d1 = std::log(forward / strike) / sd + 0.5 * sd;
  return forward * normal_cdf(d1) - strike * normal_cdf(d1 - sd);
}

double varswap_strike_continuous(const ModelParams& model, double T) {
  if (!(T > 0.0)) throw ParameterError("varswap_strike_continuous: T must be positive");
  return avg_variance_moments(model, T).mean;
}

double varswap_strike_discrete(const ModelParams& m, double T, double h) {
  if (!(T > 0.0) || !(h > 0.0)) throw ParameterError("varswap_strike_discrete: T, h must be positive");
  const double n = T / h;
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n) || std::round(n) < 1.0) {
    throw ParameterError("varswap_strike_discrete: T / h must be a positive integer");
  }
  const double kT = m.kappa * T;
  const double kh = m.kappa * h;
  const double dv = m.v0 - m.theta;
  const double ratio_T = -std::expm1(-kT) / kT;  // (1 - e^{-kT}) / kT
  const double ratio_h = -std::expm1(-kh) / kh;
  const double carry = m.theta + 2.0 * m.q - 2.0 * m.r;

  const double line1 = 0.25 * h * carry * (carry + 2.0 * dv * ratio_T);
  const double line2 = (m.theta * m.xi / m.kappa) * (m.xi / (4.0 * m.kappa) - m.rho) * (1.0 - ratio_h) +
                       dv * (m.xi / m.kappa) * (m.xi / (2.0 * m.kappa) - m.rho) * ratio_T *
                           (1.0 + kh / (-std::expm1(kh)));
  const double line3 =
      ((m.xi * m.xi / (m.kappa * m.kappa)) * (m.theta - 2.0 * m.v0) + (2.0 / m.kappa) * dv * dv) *
      (-std::expm1(-2.0 * kT) / (8.0 * kT)) * (-std::expm1(-kh) / (1.0 + std::exp(-kh)));
  return varswap_strike_continuous(m, T) + line1 + line2 + line3;
}

}  // namespace heston
