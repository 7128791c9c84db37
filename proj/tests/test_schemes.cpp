#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "heston/errors.hpp"
#include "heston/integrated_variance.hpp"
#include "heston/schemes.hpp"
#include "support.hpp"

using namespace heston;
using heston::testing::sample_moments;
using heston::testing::within_se;

namespace {

const ModelParams kCaseI{100, 0.04, 0.5, 0.04, 1.0, -0.9, 0, 0};
const ModelParams kCaseIII{100, 0.010201, 6.21, 0.019, 0.61, -0.7, 0.0319, 0};
const ModelParams kCaseIV{100, 0.04, 4.0, 0.25, 1.0, -0.5, 0.01, 0.02};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Exact CIR moments written out independently of the library.
VarianceMoments cir(double v, double h, const ModelParams& m) {
  const double e = std::exp(-m.kappa * h);
  return {m.theta + (v - m.theta) * e, v * m.xi * m.xi * e * (1 - e) / m.kappa +
                                           m.theta * m.xi * m.xi * (1 - e) * (1 - e) / (2 * m.kappa)};
}

}  // namespace

TEST_CASE("scheme labels and parsing") {
  CHECK(to_string(SchemeKind::pois_ge) == "POIS-GE");
  CHECK(parse_scheme("pois-td") == SchemeKind::pois_td);
  CHECK(parse_scheme("POIS-GE") == SchemeKind::pois_ge);
  CHECK(parse_scheme("qem") == SchemeKind::qem);
  CHECK_THROWS_AS(parse_scheme("euler"), ConfigError);
  CHECK(parse_martingale_mode("return_variance") == MartingaleMode::return_variance);
}

TEST_CASE("scheme config invariants") {
  CHECK_NOTHROW(SchemeConfig{SchemeKind::ge, 4, 1, MartingaleMode::price}.validate());
  CHECK_THROWS_AS((SchemeConfig{SchemeKind::ig, 2, 1, MartingaleMode::price}.validate()), ConfigError);
  CHECK_THROWS_AS((SchemeConfig{SchemeKind::qem, 1, 1, MartingaleMode::price}.validate()), ConfigError);
  CHECK_THROWS_AS((SchemeConfig{SchemeKind::pois_ge, -1, 1, MartingaleMode::price}.validate()),
                  ConfigError);
  CHECK_THROWS_AS((SchemeConfig{SchemeKind::ge, 0, 0, MartingaleMode::price}.validate()), ConfigError);
  CHECK_THROWS_AS((SchemeConfig{SchemeKind::pois_ge, 0, 1, MartingaleMode::return_variance}.validate()),
                  ConfigError);
  CHECK_NOTHROW(SchemeConfig{SchemeKind::qem, 0, 4, MartingaleMode::return_variance}.validate());
}

TEST_CASE("QE coefficients reproduce the conditional mean and variance in both branches") {
  const double h = 0.5;
  bool saw_quadratic = false, saw_exponential = false;
  for (double v : {0.0005, 0.01, 0.04, 0.25, 1.0}) {
    const QeCoeffs c = qe_coeffs(v, h, kCaseI);
    const VarianceMoments ref = cir(v, h, kCaseI);
    INFO("v=" << v << " psi=" << c.psi);
    CHECK(c.quadratic == (c.psi <= 1.5));
    double mean, var;
    if (c.quadratic) {
      saw_quadratic = true;
      const double b2 = c.b * c.b;
      mean = c.a * (1 + b2);
      var = 2 * c.a * c.a * (1 + 2 * b2);
    } else {
      saw_exponential = true;
      mean = (1 - c.p) / c.beta;
      var = (1 - c.p * c.p) / (c.beta * c.beta);
    }
    CHECK(rel(mean, ref.mean) < 1e-12);
    CHECK(rel(var, ref.variance) < 1e-12);
    const double base = 0.25 * kCaseI.rho * h * (2 * kCaseI.kappa / kCaseI.xi - kCaseI.rho);
    CHECK(rel(c.A1, base + kCaseI.rho / kCaseI.xi) < 1e-15);
    CHECK(rel(c.A2, base - kCaseI.rho / kCaseI.xi) < 1e-15);
  }
  CHECK(saw_quadratic);
  CHECK(saw_exponential);
}

TEST_CASE("one-step variance draws match the CIR moments") {
  const double h = 0.5;
  struct Run {
    SchemeKind kind;
    int K;
    double v;
    int n;
    ModelParams model;
  };
  const Run runs[] = {
      {SchemeKind::qem, 0, 2.0, 1'000'000, kCaseI},  // quadratic branch
      {SchemeKind::qem, 0, 0.0005, 1'000'000, kCaseI},  // exponential branch
      {SchemeKind::pois_ge, 2, 0.04, 400'000, kCaseIV},
      {SchemeKind::pois_td, 0, 0.04, 400'000, kCaseIV},
      {SchemeKind::ig, 0, 0.04, 200'000, kCaseIV},
      {SchemeKind::ge, 2, 0.04, 200'000, kCaseIV},
  };
  for (const auto& r : runs) {
    REQUIRE((r.kind != SchemeKind::qem || qe_coeffs(r.v, h, r.model).quadratic == (r.v > 0.1)));
    const StepKernel kernel(r.model, h, {r.kind, r.K, 1, MartingaleMode::price});
    RngStream rng(11, static_cast<int>(r.kind));
    std::vector<double> xs(static_cast<std::size_t>(r.n));
    for (auto& x : xs) x = kernel.step(r.v, rng).v_next;
    const auto s = sample_moments(xs);
    const auto ref = cir(r.v, h, r.model);
    INFO(to_string(r.kind) << " v=" << r.v);
    CHECK(within_se(s.mean, ref.mean, s.mean_se));
    CHECK(within_se(s.variance, ref.variance, s.variance_se));
  }
}

TEST_CASE("POIS-GE with K = 0 is bitwise the Poisson-conditioned IG step") {
  RngStream a(5, 1, 2), b(5, 1, 2);
  for (int i = 0; i < 2000; ++i) {
    const double v = 0.01 + 0.001 * (i % 50);
    const StepResult x = step_pois_ge(v, 0.7, 0, kCaseIII, a);
    const StepResult y = step_pois_ig(v, 0.7, kCaseIII, b);
    CHECK(x.v_next == y.v_next);
    CHECK(x.iv == y.iv);
    CHECK(x.mu == y.mu);
  }
}

TEST_CASE("free step functions and the precomputed kernel agree") {
  const StepKernel kernel(kCaseI, 2.5, {SchemeKind::ge, 3, 1, MartingaleMode::price});
  RngStream a(9), b(9);
  for (int i = 0; i < 500; ++i) {
    const StepResult x = kernel.step(0.04, a);
    const StepResult y = step_ge(0.04, 2.5, 3, kCaseI, b);
    CHECK(x.v_next == y.v_next);
    CHECK(x.iv == y.iv);
  }
}

TEST_CASE("step results honour the contract") {
  RngStream rng(3);
  for (SchemeKind kind : {SchemeKind::ge, SchemeKind::pois_ge, SchemeKind::ig, SchemeKind::qem,
                          SchemeKind::pois_td}) {
    const int K = uses_truncation(kind) ? 2 : 0;
    const StepKernel none(kCaseI, 1.0, {kind, K, 1, MartingaleMode::none});
    for (int i = 0; i < 2000; ++i) {
      const StepResult s = none.step(0.04, rng);
      CHECK(s.iv >= 0.0);
      CHECK(s.mart_price == 0.0);
      CHECK(s.mart_retvar == 0.0);
      CHECK(s.mu.has_value() == (kind == SchemeKind::pois_ge || kind == SchemeKind::pois_td));
    }
  }
}

TEST_CASE("POIS-TD uses the conditional mean and the two corrections") {
  const double h = 0.25, v = 0.03;
  RngStream a(21), b(21), c(21);
  const StepResult p = step_pois_td(v, h, kCaseIII, a, MartingaleMode::price);
  const StepResult r = step_pois_td(v, h, kCaseIII, b, MartingaleMode::return_variance);
  const StepResult n = step_pois_td(v, h, kCaseIII, c, MartingaleMode::none);
  REQUIRE(p.mu.has_value());
  const IvMoments mom = iv_moments_pois(v, p.v_next, *p.mu, kCaseIII, h);
  CHECK(p.iv == doctest::Approx(mom.mean).epsilon(1e-14));
  const auto& M = kCaseIII;
  const double lev = M.kappa / M.xi - M.rho / 2;
  CHECK(p.mart_price == doctest::Approx(0.5 * M.rho * M.rho * lev * lev * mom.variance).epsilon(1e-13));
  CHECK(p.mart_retvar == 0.0);
  const double ret = M.rho * M.kappa / M.xi - 0.5;
  CHECK(r.mart_price == 0.0);
  CHECK(r.mart_retvar == doctest::Approx(ret * ret * mom.variance).epsilon(1e-13));
  CHECK(n.iv == p.iv);
  CHECK(n.mart_price == 0.0);
}

TEST_CASE("sampled integrated variance has the conditional moments it was built from") {
  // By the tower property E[iv - E(I | state)] = 0 and E[(iv - E)^2 - Var(I | state)] = 0.
  const double h = 1.0;
  for (SchemeKind kind : {SchemeKind::ig, SchemeKind::pois_ge}) {
    const StepKernel kernel(kCaseIII, h, {kind, 0, 1, MartingaleMode::price});
    RngStream rng(31, static_cast<int>(kind));
    std::vector<double> d1, d2;
    for (int i = 0; i < 300'000; ++i) {
      const StepResult s = kernel.step(kCaseIII.v0, rng);
      const IvMoments mom = kind == SchemeKind::ig
                                ? iv_moments_bessel(kCaseIII.v0, s.v_next, kCaseIII, h)
                                : iv_moments_pois(kCaseIII.v0, s.v_next, *s.mu, kCaseIII, h);
      const double e = s.iv - mom.mean;
      d1.push_back(e);
      d2.push_back(e * e - mom.variance);
    }
    const auto m1 = sample_moments(d1);
    const auto m2 = sample_moments(d2);
    INFO(to_string(kind));
    CHECK(within_se(m1.mean, 0.0, m1.mean_se));
    CHECK(within_se(m2.mean, 0.0, m2.mean_se));
  }
}

TEST_CASE("empirical conditional Laplace transform matches the closed forms") {
  // E[e^{-u iv} - L(u | state)] = 0 for an exact sampler; K = 16 leaves a negligible remainder.
  const double h = 1.0;
  for (SchemeKind kind : {SchemeKind::pois_ge, SchemeKind::ge}) {
    const StepKernel kernel(kCaseIII, h, {kind, 16, 1, MartingaleMode::price});
    RngStream rng(41, static_cast<int>(kind));
    const int n = kind == SchemeKind::ge ? 100'000 : 300'000;
    for (double u : {1.0, 60.0}) {
      std::vector<double> d;
      RngStream local(41, static_cast<int>(kind), static_cast<std::uint64_t>(u));
      for (int i = 0; i < n; ++i) {
        const StepResult s = kernel.step(kCaseIII.v0, local);
        const double L = kind == SchemeKind::pois_ge
                             ? cond_laplace_pois(u, kCaseIII.v0, s.v_next, *s.mu, kCaseIII, h)
                             : cond_laplace_bk(u, kCaseIII.v0, s.v_next, kCaseIII, h);
        d.push_back(std::exp(-u * s.iv) - L);
      }
      const auto m = sample_moments(d);
      INFO(to_string(kind) << " u=" << u);
      CHECK(within_se(m.mean, 0.0, m.mean_se));
    }
  }
}

TEST_CASE("integrated variance over the horizon is conserved on average") {
  const double T = 1.0;
  const double target = T * (kCaseIV.theta + (kCaseIV.v0 - kCaseIV.theta) *
                                                 (-std::expm1(-kCaseIV.kappa * T)) / (kCaseIV.kappa * T));
  struct Run {
    SchemeKind kind;
    int K;
    int N;
    int paths;
    double slack;
  };
  const Run runs[] = {{SchemeKind::pois_ge, 4, 1, 200'000, 0.0},
                      {SchemeKind::ge, 4, 1, 100'000, 0.0},
                      {SchemeKind::ig, 0, 2, 200'000, 0.0},
                      {SchemeKind::qem, 0, 64, 40'000, 1e-4},
                      {SchemeKind::pois_td, 0, 64, 40'000, 1e-4}};
  for (const auto& r : runs) {
    const double h = T / r.N;
    const StepKernel kernel(kCaseIV, h, {r.kind, r.K, r.N, MartingaleMode::price});
    RngStream rng(51, static_cast<int>(r.kind));
    std::vector<double> totals;
    for (int p = 0; p < r.paths; ++p) {
      double v = kCaseIV.v0, total = 0.0;
      for (int i = 0; i < r.N; ++i) {
        const StepResult s = kernel.step(v, rng);
        total += s.iv;
        v = s.v_next;
      }
      totals.push_back(total);
    }
    const auto m = sample_moments(totals);
    INFO(to_string(r.kind));
    CHECK(std::abs(m.mean - target) <= 3 * m.mean_se + r.slack);
  }
}

TEST_CASE("martingale corrections keep the discounted forward a martingale over one step") {
  const double h = 0.5;
  for (SchemeKind kind : {SchemeKind::qem, SchemeKind::pois_td}) {
    const StepKernel kernel(kCaseIV, h, {kind, 0, 1, MartingaleMode::price});
    RngStream rng(61, static_cast<int>(kind));
    std::vector<double> spots;
    const double v = kCaseIV.v0;
    for (int i = 0; i < 1'000'000; ++i) {
      const StepResult s = kernel.step(v, rng);
      spots.push_back(std::exp((kCaseIV.q - kCaseIV.r) * h) *
                      cond_forward(kCaseIV.s0, v, s.v_next, s.iv, h, kCaseIV, s.mart_price));
    }
    const auto m = sample_moments(spots);
    INFO(to_string(kind));
    CHECK(within_se(m.mean, kCaseIV.s0, m.mean_se));
  }
}

TEST_CASE("log return and forward share the leverage term") {
  const ModelParams& m = kCaseIV;
  const double lf = log_forward_increment(0.04, 0.05, 0.02, 0.25, m, 0.001);
  const double lr = sample_log_return(0.04, 0.05, 0.02, 0.25, m, 0.0, 0.001);
  // with z = 0 they differ only by -(1 - rho^2) iv / 2
  CHECK(lr - lf == doctest::Approx(-0.5 * (1 - m.rho * m.rho) * 0.02).epsilon(1e-12));
  CHECK_THROWS_AS(sample_log_return(0.04, 0.05, -1.0, 0.25, m, 0.0, 0.0), ParameterError);
}

TEST_CASE("degenerate inverse gaussian moments collapse to the mean") {
  RngStream rng(1);
  CHECK(sample_moment_matched_ig(0.3, 0.0, rng) == 0.3);
  CHECK(sample_moment_matched_ig(0.3, 1e-310, rng) == 0.3);
  CHECK(sample_moment_matched_ig(0.0, 0.1, rng) == 0.0);
}

TEST_CASE("step preconditions") {
  RngStream rng(1);
  CHECK_THROWS_AS(step_pois_ge(-0.1, 1.0, 0, kCaseI, rng), ParameterError);
  CHECK_THROWS_AS(step_ig(0.04, 0.0, kCaseI, rng), ParameterError);
}
