#include "heston/model.hpp"

#include <cmath>
#include <string>

#include "heston/errors.hpp"

namespace heston {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string("model.") + name + " must be positive and finite, got " +
                         std::to_string(value));
  }
}

}  // namespace

void ModelParams::validate() const {
  require_positive(s0, "s0");
  require_positive(v0, "v0");
  require_positive(kappa, "kappa");
  require_positive(theta, "theta");
  require_positive(xi, "xi");
  if (!(std::abs(rho) <= 1.0)) {
    throw ParameterError("model.rho must lie in [-1, 1], got " + std::to_string(rho));
  }
  if (!std::isfinite(r)) throw ParameterError("model.r must be finite");
  if (!std::isfinite(q)) throw ParameterError("model.q must be finite");
  if (!(delta() > 0.0) || !std::isfinite(delta())) {
    throw ParameterError("model: 4 kappa theta / xi^2 must be positive and finite");
  }
}

double phi(double kappa_arg, double t, double xi) {
  if (!(kappa_arg > 0.0) || !(t > 0.0) || !(xi > 0.0)) {
    throw ParameterError("phi: kappa, t and xi must be positive");
  }
  const double x = 0.5 * kappa_arg * t;
  if (x > 700.0) throw DomainError("phi: kappa * t / 2 exceeds 700, sinh overflows");
  return (2.0 * kappa_arg / (xi * xi)) / std::sinh(x);
}

VarianceMoments terminal_variance_moments(double v0, double t, const ModelParams& m) {
  const double decay = std::exp(-m.kappa * t);
  const double one_minus = -std::expm1(-m.kappa * t);
  VarianceMoments out;
  out.mean = m.theta + (v0 - m.theta) * decay;
  out.variance = (m.xi * m.xi / m.kappa) * one_minus * (v0 * decay + 0.5 * m.theta * one_minus);
  return out;
}

VarianceMoments avg_variance_moments(const ModelParams& m, double t) {
  const double kt = m.kappa * t;
  const double decay = std::exp(-kt);
  // (1 - e^{-kt}) / kt, with its small-argument limit 1
  const double ratio = kt > 1e-12 ? -std::expm1(-kt) / kt : 1.0 - 0.5 * kt;
  const double dv = m.v0 - m.theta;
  VarianceMoments out;
  out.mean = m.theta + dv * ratio;
  out.variance = (m.xi * m.xi / (m.kappa * m.kappa * t)) *
                 (m.theta - 2.0 * dv * decay +
                  (m.v0 - 2.5 * m.theta + (m.v0 - 0.5 * m.theta) * decay) * ratio);
  return out;
}

}  // namespace heston
