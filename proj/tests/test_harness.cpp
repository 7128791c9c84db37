#include <doctest.h>

#include <cmath>
#include <string>

#include "heston/errors.hpp"
#include "heston/harness.hpp"

using namespace heston;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.case_name = "IV";
  s.model = ModelParams{100, 0.04, 4.0, 0.25, 1.0, -0.5, 0.01, 0.02};
  s.maturity = 1.0;
  s.product = {ProductKind::european_call, 120.0, 0};
  s.configs = {{SchemeKind::pois_ge, 1, 1, MartingaleMode::price},
               {SchemeKind::qem, 0, 2, MartingaleMode::price}};
  s.n_paths = 3000;
  s.n_reps = 4;
  s.seed = 7;
  s.threads = 1;
  return s;
}

void strip_timing(ExperimentResult& r) {
  for (auto& c : r.configs) c.row.wall_seconds = 0.0;
}

}  // namespace

TEST_CASE("one path and one rep: zero SE and bias equal to the single estimate minus benchmark") {
  ExperimentSpec s = small_spec();
  s.n_paths = 1;
  s.n_reps = 1;
  const auto r = run_experiment(s);
  for (const auto& c : r.configs) {
    CHECK(c.row.se == 0.0);
    REQUIRE(c.row.bias.has_value());
    CHECK(*c.row.bias == c.rep_estimates.front() - *c.row.benchmark);
  }
}

TEST_CASE("same seed reproduces the result exactly") {
  auto a = run_experiment(small_spec());
  auto b = run_experiment(small_spec());
  ExperimentSpec threaded = small_spec();
  threaded.threads = 4;
  auto c = run_experiment(threaded);
  strip_timing(a);
  strip_timing(b);
  strip_timing(c);
  for (std::size_t i = 0; i < a.configs.size(); ++i) {
    CHECK(a.configs[i].row == b.configs[i].row);
    CHECK(a.configs[i].rep_estimates == b.configs[i].rep_estimates);
    CHECK(a.configs[i].rep_estimates == c.configs[i].rep_estimates);
  }
}

TEST_CASE("reported SE is the population spread of the per-rep estimates") {
  const auto r = run_experiment(small_spec());
  for (const auto& c : r.configs) {
    double mean = 0.0;
    for (double x : c.rep_estimates) mean += x;
    mean /= c.rep_estimates.size();
    double ss = 0.0;
    for (double x : c.rep_estimates) ss += (x - mean) * (x - mean);
    CHECK(std::abs(std::sqrt(ss / c.rep_estimates.size()) - c.row.se) <= 1e-12);
    CHECK(std::abs(mean - c.row.estimate) <= 1e-12);
    CHECK(c.row.wall_seconds >= 0.0);
    CHECK(c.spot_bias.has_value());
  }
}

TEST_CASE("CSV has the exact columns, empty optional cells and round-trips") {
  ExperimentSpec s = small_spec();
  s.benchmark = BenchmarkSource::none;
  const auto r = run_experiment(s);
  const std::string csv = emit_table(r, TableFormat::csv);
  CHECK(csv.rfind("case,scheme,N,K,paths,reps,estimate,benchmark,bias,se,wall_seconds\n", 0) == 0);
  CHECK(csv.find("IV,QEM,2,,3000,4,") != std::string::npos);
  const auto rows = parse_csv(csv);
  REQUIRE(rows.size() == r.configs.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i] == r.configs[i].row);
  CHECK(!rows[1].K.has_value());
  CHECK(!rows[0].benchmark.has_value());

  const auto with_bench = run_experiment(small_spec());
  const auto rows2 = parse_csv(emit_table(with_bench, TableFormat::csv));
  for (std::size_t i = 0; i < rows2.size(); ++i) CHECK(rows2[i] == with_bench.configs[i].row);
  CHECK_THROWS_AS(parse_csv("bad,header\n"), ConfigError);
}

TEST_CASE("markdown uses three decimals and percent units for variance swaps") {
  ExperimentResult r;
  r.case_name = "III";
  r.product = ProductKind::variance_swap;
  r.maturity = 1.0;
  ConfigResult c;
  c.config = {SchemeKind::pois_td, 0, 4, MartingaleMode::return_variance};
  c.row = {"III", "POIS-TD", 4, std::nullopt, 100, 2, 0.0183212, 0.0183201, 0.0000011, 0.0000712, 0.5};
  r.configs.push_back(c);
  const std::string md = emit_table(r, TableFormat::markdown);
  CHECK(md.find("| 4 | 1/4 | 1.832 | 0.500 | 0.000 (0.007) |") != std::string::npos);

  ExperimentResult o;
  o.case_name = "I";
  o.product = ProductKind::european_call;
  o.maturity = 10.0;
  ConfigResult g;
  g.config = {SchemeKind::ge, 2, 1, MartingaleMode::price};
  g.row = {"I", "GE", 1, 2, 100, 2, 13.5, 13.08467014, 0.4153, 0.0214, 0.1};
  g.spot_bias = 0.0751;
  g.spot_se = 0.0749;
  o.configs.push_back(g);
  const std::string omd = emit_table(o, TableFormat::markdown);
  CHECK(omd.find("| 1 | 2 | 0.100 | 0.415 (0.021) | 0.075 (0.075) |") != std::string::npos);
}

TEST_CASE("experiment validation") {
  ExperimentSpec s = small_spec();
  s.product = {ProductKind::variance_swap, 0.0, 2};
  CHECK_THROWS_AS(s.validate(), ConfigError);  // fourier benchmark with a swap
  s.benchmark = BenchmarkSource::varswap_closed_form;
  CHECK_THROWS_AS(s.validate(), ConfigError);  // POIS-GE cannot price swaps
  s.configs = {{SchemeKind::pois_td, 0, 2, MartingaleMode::return_variance}};
  CHECK_NOTHROW(s.validate());
  s.configs = {{SchemeKind::pois_td, 0, 3, MartingaleMode::return_variance}};
  CHECK_THROWS_AS(s.validate(), ConfigError);  // steps differ from periods
  ExperimentSpec t = small_spec();
  t.n_reps = 0;
  CHECK_THROWS_AS(t.validate(), ParameterError);
  t = small_spec();
  t.case_name = "a,b";
  CHECK_THROWS_AS(t.validate(), ConfigError);
}

TEST_CASE("merging results keeps configs in order") {
  const auto a = run_experiment(small_spec());
  const auto m = merge_results({a, a});
  CHECK(m.configs.size() == 2 * a.configs.size());
  ExperimentResult other = a;
  other.case_name = "I";
  CHECK_THROWS_AS(merge_results({a, other}), ConfigError);
}

TEST_CASE("grid sweep scores each cell by the summed absolute bias") {
  GridSpec g;
  g.base = small_spec().model;
  g.xi_values = {1.0, 0.5};
  g.kappa_values = {4.0};
  g.configs = {{SchemeKind::pois_ge, 1, 1, MartingaleMode::price}};
  g.n_paths = 2000;
  g.n_reps = 2;
  g.threads = 1;
  const GridResult r = run_grid(g);
  REQUIRE(r.cells.size() == 2);
  for (const auto& cell : r.cells) {
    double sum = 0.0;
    for (double b : cell.strike_bias) sum += std::abs(b);
    CHECK(cell.abs_bias_sum == doctest::Approx(sum));
  }
  const auto rows = parse_csv(emit_grid(r, TableFormat::csv));
  CHECK(rows.size() == 2);
  CHECK(rows[1].case_name == "IV xi=0.5 kappa=4");
  CHECK(emit_grid(r, TableFormat::markdown).find("| 0.5 | 4 |") != std::string::npos);
}
