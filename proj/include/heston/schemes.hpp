#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heston/distributions.hpp"
#include "heston/integrated_variance.hpp"
#include "heston/model.hpp"
#include "heston/rng.hpp"

namespace heston {

enum class SchemeKind { ge, pois_ge, ig, qem, pois_td };

enum class MartingaleMode { none, price, return_variance };

/// Table label: "GE", "POIS-GE", "IG", "QEM", "POIS-TD".
std::string to_string(SchemeKind kind);
/// Accepts the table labels and the lower-case CLI spellings (ge, pois-ge, ...).
SchemeKind parse_scheme(std::string_view text);
std::string to_string(MartingaleMode mode);
MartingaleMode parse_martingale_mode(std::string_view text);

/// True for the gamma-expansion schemes, the only ones taking a truncation level.
constexpr bool uses_truncation(SchemeKind kind) {
  return kind == SchemeKind::ge || kind == SchemeKind::pois_ge;
}
constexpr bool is_time_discretization(SchemeKind kind) {
  return kind == SchemeKind::qem || kind == SchemeKind::pois_td;
}

struct SchemeConfig {
  SchemeKind kind = SchemeKind::pois_ge;
  int K = 0;
  int n_steps = 1;
  MartingaleMode martingale = MartingaleMode::price;

  void validate() const;

  friend bool operator==(const SchemeConfig&, const SchemeConfig&) = default;
};

struct StepResult {
  double v_next = 0.0;
  double iv = 0.0;                  // integrated variance over the step
  std::optional<std::int64_t> mu;   // Poisson conditioning count (POIS schemes only)
  double mart_price = 0.0;          // added to the forward exponent
  double mart_retvar = 0.0;         // added to the squared log return
};

/// Quadratic-exponential moment-matching coefficients for one step from v.
struct QeCoeffs {
  double mean = 0.0;
  double variance = 0.0;
  double psi = 0.0;
  bool quadratic = true;  // psi <= 1.5
  double a = 0.0, b = 0.0;       // quadratic branch: a (b + Z)^2
  double p = 0.0, beta = 0.0;    // exponential branch: mass p at zero, rate beta
  double A1 = 0.0, A2 = 0.0;     // (rho h / 4)(2 kappa / xi - rho) +/- rho / xi
};

inline constexpr double kQeCriticalPsi = 1.5;

QeCoeffs qe_coeffs(double v, double h, const ModelParams& model);

/// Per-(model, h, config) precomputation for the simulation hot loop.
class StepKernel {
 public:
  StepKernel(const ModelParams& model, double h, const SchemeConfig& config);

  StepResult step(double v, RngStream& rng) const;

  double h() const { return h_; }
  const SchemeConfig& config() const { return config_; }
  const ModelParams& model() const { return model_; }
  const SeriesCoeffs& coeffs() const { return coeffs_; }

 private:
  StepResult step_pois_ge(double v, RngStream& rng) const;
  StepResult step_ge(double v, RngStream& rng) const;
  StepResult step_ig(double v, RngStream& rng) const;
  StepResult step_qem(double v, RngStream& rng) const;
  StepResult step_pois_td(double v, RngStream& rng) const;

  ModelParams model_;
  double h_;
  SchemeConfig config_;
  PoissonGammaTransition transition_;
  SeriesCoeffs coeffs_;
  TruncationSums sums_;
  std::vector<double> lambda_;     // lambda_k, k = 1..K
  std::vector<double> inv_gamma_;  // 1 / gamma_k
  double half_delta_;
  double nu_;
  double phi_h_;
  // gamma-expansion remainders per unit weight (GE baseline)
  double rem_x_mean_, rem_x_var_, rem_z_mean_, rem_z_var_;
  // martingale-correction multipliers of Var(I | mu)
  double mart_price_coef_, mart_retvar_coef_;
};

/// IG(mean, mean^3/variance), degenerating to the mean when the variance
/// vanishes or lambda overflows.
double sample_moment_matched_ig(double mean, double variance, RngStream& rng);

StepResult step_pois_ge(double v, double h, int K, const ModelParams& model, RngStream& rng);
/// The K = 0 member of the Poisson-conditioned family.
StepResult step_pois_ig(double v, double h, const ModelParams& model, RngStream& rng);
StepResult step_ge(double v, double h, int K, const ModelParams& model, RngStream& rng);
StepResult step_ig(double v, double h, const ModelParams& model, RngStream& rng);
StepResult step_qem(double v, double h, const ModelParams& model, RngStream& rng,
                    MartingaleMode mode = MartingaleMode::price);
StepResult step_pois_td(double v, double h, const ModelParams& model, RngStream& rng,
                        MartingaleMode mode = MartingaleMode::price);

/// ln(F_{i+1} / S_i): (r-q)h - rho^2 iv / 2 + (rho/xi)[v_next - v0 + kappa(iv - theta h)] + mart_price
double log_forward_increment(double v0, double v_next, double iv, double h,
                             const ModelParams& model, double mart_price);

/// Conditional forward price S e^{log_forward_increment}.
double cond_forward(double s, double v0, double v_next, double iv, double h,
                    const ModelParams& model, double mart_price);

/// Log return given the variance path and one standard normal draw z.
double sample_log_return(double v0, double v_next, double iv, double h,
                         const ModelParams& model, double z, double mart_price);

}  // namespace heston
