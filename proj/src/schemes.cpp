#include "heston/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "heston/errors.hpp"

namespace heston {

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::ge: return "GE";
    case SchemeKind::pois_ge: return "POIS-GE";
    case SchemeKind::ig: return "IG";
    case SchemeKind::qem: return "QEM";
    case SchemeKind::pois_td: return "POIS-TD";
  }
  return "?";
}

namespace {

std::string normalized(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '_') c = '-';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

SchemeKind parse_scheme(std::string_view text) {
  const std::string s = normalized(text);
  if (s == "ge") return SchemeKind::ge;
  if (s == "pois-ge") return SchemeKind::pois_ge;
  if (s == "ig") return SchemeKind::ig;
  if (s == "qem" || s == "qe") return SchemeKind::qem;
  if (s == "pois-td") return SchemeKind::pois_td;
  throw ConfigError("unknown scheme '" + std::string(text) +
                    "' (expected ge, pois-ge, ig, qem or pois-td)");
}

std::string to_string(MartingaleMode mode) {
  switch (mode) {
    case MartingaleMode::none: return "none";
    case MartingaleMode::price: return "price";
    case MartingaleMode::return_variance: return "return_variance";
  }
  return "?";
}

MartingaleMode parse_martingale_mode(std::string_view text) {
  const std::string s = normalized(text);
  if (s == "none") return MartingaleMode::none;
  if (s == "price") return MartingaleMode::price;
  if (s == "return-variance" || s == "retvar") return MartingaleMode::return_variance;
  throw ConfigError("unknown martingale mode '" + std::string(text) + "'");
}

void SchemeConfig::validate() const {
  if (n_steps < 1) throw ConfigError("scheme: number of steps must be >= 1");
  if (K < 0) throw ConfigError("scheme: truncation level K must be >= 0");
  if (!uses_truncation(kind) && K != 0) {
    throw ConfigError("scheme: K applies only to GE and POIS-GE, not " + to_string(kind));
  }
  if (martingale == MartingaleMode::return_variance && !is_time_discretization(kind)) {
    throw ConfigError("scheme: return-variance correction is defined only for QEM and POIS-TD");
  }
}

QeCoeffs qe_coeffs(double v, double h, const ModelParams& m) {
  QeCoeffs c;
  const VarianceMoments mom = terminal_variance_moments(v, h, m);
  c.mean = mom.mean;
  c.variance = mom.variance;
  c.psi = mom.variance / (mom.mean * mom.mean);
  const double base = 0.25 * m.rho * h * (2.0 * m.kappa / m.xi - m.rho);
  c.A1 = base + m.rho / m.xi;
  c.A2 = base - m.rho / m.xi;
  if (c.psi <= kQeCriticalPsi) {
    c.quadratic = true;
    const double inv = 2.0 / c.psi;
    const double b2 = inv - 1.0 + std::sqrt(inv) * std::sqrt(inv - 1.0);
    c.b = std::sqrt(b2);
    c.a = c.mean / (1.0 + b2);
  } else {
    c.quadratic = false;
    c.p = (c.psi - 1.0) / (c.psi + 1.0);
    c.beta = (1.0 - c.p) / c.mean;
  }
  return c;
}

double sample_moment_matched_ig(double mean, double variance, RngStream& rng) {
  if (!(mean > 0.0)) return 0.0;
  if (!(variance >= 1e-300)) return mean;
  const double lambda = mean * mean * mean / variance;
  if (!std::isfinite(lambda)) return mean;
  return sample_invgauss(mean, lambda, rng);
}

StepKernel::StepKernel(const ModelParams& model, double h, const SchemeConfig& config)
    : model_(model),
      h_(h),
      config_(config),
      transition_(model, h),
      coeffs_(series_coeffs(model, h)),
      half_delta_(0.5 * model.delta()),
      nu_(model.nu()),
      phi_h_(phi(model.kappa, h, model.xi)) {
  model.validate();
  config.validate();
  const int K = uses_truncation(config.kind) ? config.K : 0;
  sums_ = truncation_sums(coeffs_, K);
  lambda_.reserve(static_cast<std::size_t>(K));
  inv_gamma_.reserve(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    lambda_.push_back(coeffs_.lambda(k));
    inv_gamma_.push_back(1.0 / coeffs_.gamma(k));
  }
  const double xi2 = model.xi * model.xi;
  rem_x_mean_ = coeffs_.m_x * h - sums_.lambda_over_gamma;
  rem_x_var_ = coeffs_.v_x * xi2 * h * h * h - sums_.two_lambda_over_gamma2;
  rem_z_mean_ = coeffs_.m_z * xi2 * h * h - sums_.inv_gamma;
  rem_z_var_ = coeffs_.v_z * xi2 * xi2 * h * h * h * h - sums_.inv_gamma2;

  const double lev = model.kappa / model.xi - 0.5 * model.rho;
  mart_price_coef_ = 0.5 * model.rho * model.rho * lev * lev;
  const double ret = model.rho * model.kappa / model.xi - 0.5;
  mart_retvar_coef_ = ret * ret;
}

StepResult StepKernel::step(double v, RngStream& rng) const {
  switch (config_.kind) {
    case SchemeKind::pois_ge: return step_pois_ge(v, rng);
    case SchemeKind::ge: return step_ge(v, rng);
    case SchemeKind::ig: return step_ig(v, rng);
    case SchemeKind::qem: return step_qem(v, rng);
    case SchemeKind::pois_td: return step_pois_td(v, rng);
  }
  throw ConfigError("unknown scheme kind");
}

StepResult StepKernel::step_pois_ge(double v, RngStream& rng) const {
  const auto draw = transition_.sample(v, rng);
  const double v_sum = v + draw.v_next;
  const double shape = half_delta_ + 2.0 * static_cast<double>(draw.mu);

  double iv = 0.0;
  for (std::size_t k = 0; k < lambda_.size(); ++k) {
    const auto n_k = sample_poisson(v_sum * lambda_[k], rng);
    iv += sample_std_gamma(static_cast<double>(n_k) + shape, rng) * inv_gamma_[k];
  }
  const IvMoments rem = iv_moments_truncated(sums_, v, draw.v_next, draw.mu, model_, coeffs_);
  iv += sample_moment_matched_ig(rem.mean, rem.variance, rng);

  StepResult out;
  out.v_next = draw.v_next;
  out.iv = iv;
  out.mu = draw.mu;
  return out;
}

namespace {

// Gamma variate with the given mean and variance (shape m^2/s2, scale s2/m).
double moment_matched_gamma(double mean, double variance, RngStream& rng) {
  if (!(mean > 0.0)) return 0.0;
  if (!(variance >= 1e-300)) return mean;
  const double scale = variance / mean;
  return scale * sample_std_gamma(mean / scale, rng);
}

}  // namespace

StepResult StepKernel::step_ge(double v, RngStream& rng) const {
  // noncentral chi-square draw; the mixing count is not used by this scheme
  const double v_next = transition_.sample(v, rng).v_next;
  const double v_sum = v + v_next;
  const double z = std::sqrt(v * v_next) * phi_h_;
  const std::int64_t eta = sample_bessel_rv(nu_, z, rng);

  double iv = 0.0;
  for (std::size_t k = 0; k < lambda_.size(); ++k) {
    const auto n_k = sample_poisson(v_sum * lambda_[k], rng);
    double g = n_k > 0 ? sample_std_gamma(static_cast<double>(n_k), rng) : 0.0;
    g += sample_std_gamma(half_delta_, rng);
    for (std::int64_t j = 0; j < eta; ++j) g += sample_std_gamma(2.0, rng);
    iv += g * inv_gamma_[k];
  }
  iv += moment_matched_gamma(v_sum * rem_x_mean_, v_sum * rem_x_var_, rng);
  iv += moment_matched_gamma(half_delta_ * rem_z_mean_, half_delta_ * rem_z_var_, rng);
  for (std::int64_t j = 0; j < eta; ++j) {
    iv += moment_matched_gamma(2.0 * rem_z_mean_, 2.0 * rem_z_var_, rng);
  }

  StepResult out;
  out.v_next = v_next;
  out.iv = iv;
  return out;
}

StepResult StepKernel::step_ig(double v, RngStream& rng) const {
  const double v_next = transition_.sample(v, rng).v_next;
  const double z = std::sqrt(v * v_next) * phi_h_;
  const IvMoments eta = bessel_variate_moments(nu_, z);

  const double xi2 = model_.xi * model_.xi;
  const double h = h_;
  const double ez2 = 2.0 * coeffs_.m_z * xi2 * h * h;
  const double vz2 = 2.0 * coeffs_.v_z * xi2 * xi2 * h * h * h * h;
  const double mean = (v + v_next) * coeffs_.m_x * h + half_delta_ * coeffs_.m_z * xi2 * h * h +
                      eta.mean * ez2;
  const double variance = (v + v_next) * coeffs_.v_x * xi2 * h * h * h +
                          half_delta_ * coeffs_.v_z * xi2 * xi2 * h * h * h * h +
                          eta.mean * vz2 + eta.variance * ez2 * ez2;

  StepResult out;
  out.v_next = v_next;
  out.iv = sample_moment_matched_ig(mean, variance, rng);
  return out;
}

StepResult StepKernel::step_qem(double v, RngStream& rng) const {
  const QeCoeffs c = qe_coeffs(v, h_, model_);
  StepResult out;
  double branch_term = 0.0;
  if (c.quadratic) {
    const double zb = c.b + rng.normal();
    out.v_next = c.a * zb * zb;
    const double denom = 1.0 - 2.0 * c.A1 * c.a;
    if (!(denom > 0.0)) throw DomainError("QEM martingale correction requires 2 A1 a < 1");
    branch_term = -c.A1 * c.b * c.b * c.a / denom + 0.5 * std::log(denom);
  } else {
    const double u = rng.uniform();
    out.v_next = u <= c.p ? 0.0 : std::log((1.0 - c.p) / (1.0 - u)) / c.beta;
    if (!(c.beta > c.A1)) throw DomainError("QEM martingale correction requires A1 < beta");
    branch_term = -std::log(c.p + c.beta * (1.0 - c.p) / (c.beta - c.A1));
  }
  out.iv = 0.5 * (v + out.v_next) * h_;
  if (config_.martingale != MartingaleMode::none) {
    out.mart_price = model_.rho * model_.kappa * model_.theta * h_ / model_.xi - c.A2 * v +
                     branch_term;
  }
  return out;
}

StepResult StepKernel::step_pois_td(double v, RngStream& rng) const {
  const auto draw = transition_.sample(v, rng);
  const IvMoments mom = iv_moments_pois(v, draw.v_next, draw.mu, model_, coeffs_);
  StepResult out;
  out.v_next = draw.v_next;
  out.iv = mom.mean;
  out.mu = draw.mu;
  if (config_.martingale == MartingaleMode::price) {
    out.mart_price = mart_price_coef_ * mom.variance;
  } else if (config_.martingale == MartingaleMode::return_variance) {
    out.mart_retvar = mart_retvar_coef_ * mom.variance;
  }
  return out;
}

namespace {

void require_step_args(double v, double h, const char* who) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(who) + ": v must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError(std::string(who) + ": h must be positive");
}

StepResult one_step(double v, double h, const ModelParams& model, const SchemeConfig& cfg,
                    RngStream& rng, const char* who) {
  require_step_args(v, h, who);
  return StepKernel(model, h, cfg).step(v, rng);
}

}  // namespace

StepResult step_pois_ge(double v, double h, int K, const ModelParams& model, RngStream& rng) {
  return one_step(v, h, model, {SchemeKind::pois_ge, K, 1, MartingaleMode::none}, rng,
                  "step_pois_ge");
}

StepResult step_pois_ig(double v, double h, const ModelParams& model, RngStream& rng) {
  return step_pois_ge(v, h, 0, model, rng);
}

StepResult step_ge(double v, double h, int K, const ModelParams& model, RngStream& rng) {
  return one_step(v, h, model, {SchemeKind::ge, K, 1, MartingaleMode::none}, rng, "step_ge");
}

StepResult step_ig(double v, double h, const ModelParams& model, RngStream& rng) {
  return one_step(v, h, model, {SchemeKind::ig, 0, 1, MartingaleMode::none}, rng, "step_ig");
}

StepResult step_qem(double v, double h, const ModelParams& model, RngStream& rng,
                    MartingaleMode mode) {
  return one_step(v, h, model, {SchemeKind::qem, 0, 1, mode}, rng, "step_qem");
}

StepResult step_pois_td(double v, double h, const ModelParams& model, RngStream& rng,
                        MartingaleMode mode) {
  return one_step(v, h, model, {SchemeKind::pois_td, 0, 1, mode}, rng, "step_pois_td");
}

double log_forward_increment(double v0, double v_next, double iv, double h,
                             const ModelParams& m, double mart_price) {
  return (m.r - m.q) * h - 0.5 * m.rho * m.rho * iv +
         (m.rho / m.xi) * (v_next - v0 + m.kappa * (iv - m.theta * h)) + mart_price;
}

double cond_forward(double s, double v0, double v_next, double iv, double h,
                    const ModelParams& model, double mart_price) {
  return s * std::exp(log_forward_increment(v0, v_next, iv, h, model, mart_price));
}

double sample_log_return(double v0, double v_next, double iv, double h, const ModelParams& m,
                         double z, double mart_price) {
  if (!(iv >= 0.0)) throw ParameterError("sample_log_return: iv must be nonnegative");
  return (m.r - m.q) * h - 0.5 * iv +
         (m.rho / m.xi) * (v_next - v0 + m.kappa * (iv - m.theta * h)) + mart_price +
         std::sqrt((1.0 - m.rho * m.rho) * iv) * z;
}

}  // namespace heston
