#include "heston/cli/presets.hpp"

#include "heston/errors.hpp"

namespace heston::cli {

namespace {

CasePreset make(std::string name, double v0, double theta, double xi, double rho, double kappa,
                double T, double r, double q, double strike) {
  CasePreset p;
  p.name = std::move(name);
  p.model = ModelParams{100.0, v0, kappa, theta, xi, rho, r, q};
  p.maturity = T;
  p.strike = strike;
  return p;
}

}  // namespace

const std::vector<CasePreset>& all_presets() {
  static const std::vector<CasePreset> presets{
      make("I", 0.04, 0.04, 1.0, -0.9, 0.5, 10.0, 0.0, 0.0, 100.0),
      make("II", 0.04, 0.04, 0.9, -0.5, 0.3, 15.0, 0.0, 0.0, 100.0),
      make("III", 0.010201, 0.019, 0.61, -0.7, 6.21, 1.0, 0.0319, 0.0, 100.0),
      make("IV", 0.04, 0.25, 1.0, -0.5, 4.0, 1.0, 0.01, 0.02, 120.0),
  };
  return presets;
}

const CasePreset& case_preset(std::string_view name) {
  for (const auto& p : all_presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown case '" + std::string(name) + "' (expected I, II, III or IV)");
}

std::vector<int> td_steps_for(std::string_view case_name) {
  if (case_name == "I") return {20, 40, 80};
  if (case_name == "II") return {30, 60, 120};
  case_preset(case_name);
  return {2, 4, 8};
}

namespace {

ExperimentSpec base_spec(const CasePreset& p, const BenchRun& run) {
  ExperimentSpec s;
  s.case_name = p.name;
  s.model = p.model;
  s.maturity = p.maturity;
  s.product = {ProductKind::european_call, p.strike, 0};
  s.n_paths = run.n_paths;
  s.n_reps = run.n_reps;
  s.seed = run.seed;
  s.threads = run.threads;
  s.benchmark = BenchmarkSource::fourier;
  return s;
}

std::vector<ExperimentSpec> option_panels(const CasePreset& p, const BenchRun& run) {
  std::vector<ExperimentSpec> out;
  ExperimentSpec ge = base_spec(p, run);
  for (int K : {0, 1, 2, 4, 8}) {
    ge.configs.push_back({SchemeKind::ge, K, 1, MartingaleMode::price});
    ge.configs.push_back({SchemeKind::pois_ge, K, 1, MartingaleMode::price});
  }
  out.push_back(ge);

  ExperimentSpec ig = base_spec(p, run);
  for (int n : {1, 2, 4, 8}) {
    ig.configs.push_back({SchemeKind::ig, 0, n, MartingaleMode::price});
    ig.configs.push_back({SchemeKind::pois_ge, 0, n, MartingaleMode::price});
  }
  out.push_back(ig);

  ExperimentSpec td = base_spec(p, run);
  for (int n : td_steps_for(p.name)) {
    td.configs.push_back({SchemeKind::qem, 0, n, MartingaleMode::price});
    td.configs.push_back({SchemeKind::pois_td, 0, n, MartingaleMode::price});
  }
  out.push_back(td);
  return out;
}

std::vector<ExperimentSpec> varswap_panels(const CasePreset& p, const BenchRun& run) {
  std::vector<ExperimentSpec> out;
  for (int n : {2, 4, 12, 52}) {
    ExperimentSpec s = base_spec(p, run);
    s.product = {ProductKind::variance_swap, 0.0, n};
    s.benchmark = BenchmarkSource::varswap_closed_form;
    s.configs.push_back({SchemeKind::qem, 0, n, MartingaleMode::price});
    s.configs.push_back({SchemeKind::pois_td, 0, n, MartingaleMode::return_variance});
    out.push_back(s);
  }
  return out;
}

}  // namespace

std::vector<ExperimentSpec> bench_specs(std::string_view table, const BenchRun& run) {
  if (table == "opt1") return option_panels(case_preset("I"), run);
  if (table == "opt2") return option_panels(case_preset("II"), run);
  if (table == "opt3") return option_panels(case_preset("III"), run);
  if (table == "opt4") return option_panels(case_preset("IV"), run);
  if (table == "var3") return varswap_panels(case_preset("III"), run);
  if (table == "var4") return varswap_panels(case_preset("IV"), run);
  throw ConfigError("unknown table '" + std::string(table) +
                    "' (expected opt1..opt4, var3, var4 or grid4)");
}

GridSpec grid4_spec(const BenchRun& run) {
  const CasePreset& p = case_preset("IV");
  GridSpec g;
  g.case_name = p.name;
  g.base = p.model;
  g.maturity = p.maturity;
  g.configs = {
      {SchemeKind::ge, 1, 1, MartingaleMode::price},
      {SchemeKind::pois_ge, 1, 1, MartingaleMode::price},
      {SchemeKind::ig, 0, 2, MartingaleMode::price},
      {SchemeKind::pois_ge, 0, 2, MartingaleMode::price},
      {SchemeKind::qem, 0, 4, MartingaleMode::price},
      {SchemeKind::pois_td, 0, 4, MartingaleMode::price},
  };
  g.n_paths = run.n_paths;
  g.n_reps = run.n_reps;
  g.seed = run.seed;
  g.threads = run.threads;
  return g;
}

}  // namespace heston::cli
