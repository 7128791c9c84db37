#pragma once

#include <cstdint>

#include "heston/model.hpp"
#include "heston/rng.hpp"

namespace heston {

/// Poisson variate. Sequential-search inversion below rate 10, Hormann's
/// transformed rejection (PTRS) above.
std::int64_t sample_poisson(double rate, RngStream& rng);

/// Unit-scale gamma variate for any shape > 0 (Marsaglia-Tsang squeeze,
/// with the shape < 1 case boosted through Gamma(a) = Gamma(a+1) U^{1/a}).
/// The result is strictly positive; underflow is clamped to the smallest
/// normal double.
double sample_std_gamma(double shape, RngStream& rng);

/// Inverse Gaussian IG(mu, lambda) by the Michael-Schucany-Haas transformation.
double sample_invgauss(double mu, double lambda, RngStream& rng);

/// Exact CIR transition V_t -> V_{t+h} written as a Poisson mixture of gammas:
///   mu ~ Poisson(v * rate_per_variance),  v_next = scale * Gamma(delta/2 + mu).
/// Built once per (model, h) so hot loops pay only for the two draws.
class PoissonGammaTransition {
 public:
  PoissonGammaTransition(const ModelParams& model, double h);

  struct Draw {
    double v_next;
    std::int64_t mu;
  };

  Draw sample(double v, RngStream& rng) const {
    const std::int64_t mu = sample_poisson(v * rate_per_variance_, rng);
    return {scale_ * sample_std_gamma(half_delta_ + static_cast<double>(mu), rng), mu};
  }

  /// phi_h(kappa) e^{-kappa h/2} / 2
  double rate_per_variance() const { return rate_per_variance_; }
  /// 2 e^{-kappa h/2} / phi_h(kappa)
  double scale() const { return scale_; }
  double half_delta() const { return half_delta_; }

 private:
  double rate_per_variance_;
  double scale_;
  double half_delta_;
};

struct TerminalVarianceDraw {
  double v_next;
  std::int64_t mu;
};

TerminalVarianceDraw sample_terminal_variance(double v0, double h, const ModelParams& model,
                                              RngStream& rng);

/// P(eta = j) for eta ~ BES(nu, z).
double bessel_pmf(std::int64_t j, double nu, double z);

/// Bessel variate BES(nu, z): mode located analytically, probabilities
/// accumulated outward from the mode through the ratio recursion.
std::int64_t sample_bessel_rv(double nu, double z, RngStream& rng);

}  // namespace heston
