#include <doctest.h>

#include <algorithm>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "heston/distributions.hpp"
#include "heston/errors.hpp"
#include "heston/integrated_variance.hpp"
#include "support.hpp"

using namespace heston;
using heston::testing::sample_moments;
using heston::testing::within_se;

namespace {

constexpr int kSamples = 1'000'000;

template <class Draw>
std::vector<double> draw_many(Draw&& draw, int n = kSamples) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (auto& x : xs) x = draw();
  return xs;
}

}  // namespace

TEST_CASE("uniforms are strictly inside the unit interval and the stream is addressable") {
  RngStream a(7, 3, 11), b(7, 3, 11), c(7, 3, 12);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform());
    differs = differs || (c.uniform() != u);
  }
  CHECK(differs);
}

TEST_CASE("poisson mean and variance equal the rate") {
  RngStream rng(1);
  for (double rate : {0.3, 5.0, 9.99, 10.0, 37.5, 1e4}) {
    const auto s = sample_moments(draw_many([&] { return double(sample_poisson(rate, rng)); }));
    INFO("rate=" << rate);
    CHECK(within_se(s.mean, rate, s.mean_se));
    CHECK(within_se(s.variance, rate, s.variance_se));
  }
  CHECK(sample_poisson(0.0, rng) == 0);
}

TEST_CASE("poisson rejects invalid or overflowing rates") {
  RngStream rng(1);
  CHECK_THROWS_AS(sample_poisson(-1.0, rng), ParameterError);
  CHECK_THROWS_AS(sample_poisson(NAN, rng), ParameterError);
  CHECK_THROWS_AS(sample_poisson(1e16, rng), ParameterError);
}

TEST_CASE("gamma mean and variance equal the shape") {
  RngStream rng(2);
  for (double shape : {0.05, 0.3, 1.0, 2.5, 50.0}) {
    const auto s = sample_moments(draw_many([&] { return sample_std_gamma(shape, rng); }));
    INFO("shape=" << shape);
    CHECK(within_se(s.mean, shape, s.mean_se));
    CHECK(within_se(s.variance, shape, s.variance_se));
  }
  CHECK_THROWS_AS(sample_std_gamma(0.0, rng), ParameterError);
}

TEST_CASE("gamma with tiny shape stays positive") {
  RngStream rng(3);
  for (int i = 0; i < 10000; ++i) CHECK(sample_std_gamma(1e-3, rng) > 0.0);
}

TEST_CASE("inverse gaussian mean mu and variance mu^3 / lambda") {
  RngStream rng(4);
  for (auto [mu, lambda] : {std::pair{1.0, 1.0}, {0.05, 3.0}, {2.0, 0.1}, {0.4, 400.0}}) {
    const auto s = sample_moments(draw_many([&] { return sample_invgauss(mu, lambda, rng); }));
    INFO("mu=" << mu << " lambda=" << lambda);
    CHECK(within_se(s.mean, mu, s.mean_se));
    CHECK(within_se(s.variance, mu * mu * mu / lambda, s.variance_se));
  }
}

TEST_CASE("terminal variance matches CIR moments and the noncentral chi-square law") {
  RngStream rng(5);
  struct Setup {
    ModelParams m;
    double h;
  };
  const Setup setups[] = {
      {ModelParams{100, 0.04, 0.5, 0.04, 1.0, -0.9, 0, 0}, 10.0},
      {ModelParams{100, 0.010201, 6.21, 0.019, 0.61, -0.7, 0.0319, 0}, 0.125},
      {ModelParams{100, 0.04, 4.0, 0.25, 1.0, -0.5, 0.01, 0.02}, 1.0},
  };
  for (const auto& [m, h] : setups) {
    const double e = std::exp(-m.kappa * h);
    const double mean = m.theta + (m.v0 - m.theta) * e;
    const double var = m.v0 * m.xi * m.xi * e * (1 - e) / m.kappa +
                       m.theta * m.xi * m.xi * (1 - e) * (1 - e) / (2 * m.kappa);
    std::vector<double> xs(kSamples);
    for (auto& x : xs) x = sample_terminal_variance(m.v0, h, m, rng).v_next;
    const auto s = sample_moments(xs);
    INFO("kappa=" << m.kappa << " h=" << h);
    CHECK(within_se(s.mean, mean, s.mean_se));
    CHECK(within_se(s.variance, var, s.variance_se));

    // V_h = c * chi'^2(delta, lambda) with c = xi^2 (1 - e) / (4 kappa)
    const double c = m.xi * m.xi * (1 - e) / (4 * m.kappa);
    const double lam = m.v0 * e / c;
    const boost::math::non_central_chi_squared law(m.delta(), lam);
    std::sort(xs.begin(), xs.end());
    for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) {
      const double q = c * boost::math::quantile(law, p);
      const double frac =
          double(std::lower_bound(xs.begin(), xs.end(), q) - xs.begin()) / double(xs.size());
      CHECK(within_se(frac, p, std::sqrt(p * (1 - p) / xs.size())));
    }
  }
}

TEST_CASE("bessel pmf matches the series definition and sums to one") {
  for (auto [nu, z] : {std::pair{-0.366, 0.8}, {1.0, 12.0}, {-0.96, 3.0}, {30.0, 250.0}}) {
    double total = 0.0;
    for (int j = 0; j < 2000; ++j) {
      const double p = bessel_pmf(j, nu, z);
      total += p;
      if (j < 40 && z < 20) {
        const double ref = std::exp((2 * j + nu) * std::log(z / 2) - std::lgamma(j + 1.0) -
                                    std::lgamma(j + nu + 1.0)) /
                           boost::math::cyl_bessel_i(nu, z);
        INFO("nu=" << nu << " z=" << z << " j=" << j);
        CHECK(std::abs(p - ref) <= 1e-12 * std::max(ref, 1e-300) + 1e-300);
      }
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("bessel variate mean and variance match the closed-form moments") {
  RngStream rng(6);
  for (auto [nu, z] : {std::pair{-0.366, 0.8}, {1.0, 12.0}, {-0.96, 3.0}, {30.0, 250.0}}) {
    const auto s =
        sample_moments(draw_many([&] { return double(sample_bessel_rv(nu, z, rng)); }));
    const IvMoments ref = bessel_variate_moments(nu, z);
    INFO("nu=" << nu << " z=" << z);
    CHECK(within_se(s.mean, ref.mean, s.mean_se));
    CHECK(within_se(s.variance, ref.variance, s.variance_se));
  }
}
