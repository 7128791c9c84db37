#include "heston/harness.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "heston/analytic.hpp"
#include "heston/errors.hpp"
#include "heston/pricing.hpp"

namespace heston {

std::string to_string(ProductKind kind) {
  return kind == ProductKind::european_call ? "european_call" : "variance_swap";
}

std::string to_string(BenchmarkSource source) {
  switch (source) {
    case BenchmarkSource::fourier: return "fourier";
    case BenchmarkSource::varswap_closed_form: return "varswap_closed_form";
    case BenchmarkSource::none: return "none";
  }
  return "none";
}

ProductKind parse_product(const std::string& text) {
  if (text == "european_call" || text == "call") return ProductKind::european_call;
  if (text == "variance_swap" || text == "varswap") return ProductKind::variance_swap;
  throw ConfigError("unknown product '" + text + "' (expected european_call or variance_swap)");
}

BenchmarkSource parse_benchmark(const std::string& text) {
  if (text == "fourier") return BenchmarkSource::fourier;
  if (text == "varswap_closed_form") return BenchmarkSource::varswap_closed_form;
  if (text == "none") return BenchmarkSource::none;
  throw ConfigError("unknown benchmark '" + text +
                    "' (expected fourier, varswap_closed_form or none)");
}

TableFormat parse_format(const std::string& text) {
  if (text == "csv") return TableFormat::csv;
  if (text == "md" || text == "markdown") return TableFormat::markdown;
  throw ConfigError("unknown format '" + text + "' (expected csv or md)");
}

namespace {

void check_case_name(const std::string& name) {
  if (name.empty()) throw ConfigError("case name must not be empty");
  if (name.find_first_of(",\"\n\r") != std::string::npos) {
    throw ConfigError("case name must not contain commas, quotes or newlines");
  }
}

}  // namespace

void ExperimentSpec::validate() const {
  check_case_name(case_name);
  model.validate();
  if (!(maturity > 0.0)) throw ParameterError("maturity must be positive");
  if (n_paths < 1) throw ParameterError("n_paths must be at least 1");
  if (n_reps < 1) throw ParameterError("n_reps must be at least 1");
  if (threads < 0) throw ParameterError("threads must be nonnegative");
  if (configs.empty()) throw ConfigError("at least one scheme config is required");
  for (const auto& cfg : configs) cfg.validate();

  if (product.kind == ProductKind::european_call) {
    if (!(product.strike > 0.0)) throw ParameterError("product.strike must be positive");
    if (benchmark == BenchmarkSource::varswap_closed_form) {
      throw ConfigError("varswap_closed_form benchmark requires a variance swap product");
    }
    for (const auto& cfg : configs) {
      if (cfg.martingale == MartingaleMode::return_variance) {
        throw ConfigError("return_variance correction applies to variance swaps only");
      }
    }
  } else {
    if (product.periods < 1) throw ParameterError("product.periods must be at least 1");
    if (benchmark == BenchmarkSource::fourier) {
      throw ConfigError("fourier benchmark requires a european call product");
    }
    for (const auto& cfg : configs) {
      if (!is_time_discretization(cfg.kind)) {
        throw ConfigError("variance swaps are priced with QEM or POIS-TD only, got " +
                          to_string(cfg.kind));
      }
      if (cfg.n_steps != product.periods) {
        throw ConfigError("variance swap configs must use n_steps equal to product.periods");
      }
    }
  }
}

RepSummary summarize_reps(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

std::optional<double> compute_benchmark(const ExperimentSpec& spec) {
  switch (spec.benchmark) {
    case BenchmarkSource::fourier:
      return price_european_exact(spec.model, spec.maturity, spec.product.strike);
    case BenchmarkSource::varswap_closed_form:
      return varswap_strike_discrete(spec.model, spec.maturity,
                                     spec.maturity / spec.product.periods);
    case BenchmarkSource::none: return std::nullopt;
  }
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

// Stream id of warm-up runs, disjoint from any rep index.
constexpr std::uint64_t kWarmupExperiment = std::numeric_limits<std::uint64_t>::max();

struct RepValue {
  double estimate;
  double spot;
};

RepValue run_one(const ExperimentSpec& spec, const SchemeConfig& cfg, const RunControl& run) {
  if (spec.product.kind == ProductKind::european_call) {
    const auto e = price_european_cmc(spec.model, spec.maturity, spec.product.strike, cfg, run);
    return {e.price.value, e.spot.value};
  }
  return {varswap_fair_strike_mc(spec.model, spec.maturity, cfg, run).value,
          std::numeric_limits<double>::quiet_NaN()};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::optional<double> bench = compute_benchmark(spec);
  ExperimentResult out;
  out.case_name = spec.case_name;
  out.product = spec.product.kind;
  out.maturity = spec.maturity;

  for (const auto& cfg : spec.configs) {
    RunControl run{spec.n_paths, spec.seed, 0, spec.threads};
    if (spec.warmup) {
      RunControl warm = run;
      warm.n_paths = std::min(spec.n_paths, kBatchPaths);
      warm.experiment_id = kWarmupExperiment;
      run_one(spec, cfg, warm);
    }
    ConfigResult cr;
    cr.config = cfg;
    const auto t0 = Clock::now();
    for (int rep = 0; rep < spec.n_reps; ++rep) {
      run.experiment_id = static_cast<std::uint64_t>(rep);
      const RepValue v = run_one(spec, cfg, run);
      cr.rep_estimates.push_back(v.estimate);
      if (spec.product.kind == ProductKind::european_call) cr.rep_spots.push_back(v.spot);
    }
    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();

    const RepSummary s = summarize_reps(cr.rep_estimates);
    TableRow& row = cr.row;
    row.case_name = spec.case_name;
    row.scheme = to_string(cfg.kind);
    row.n_steps = cfg.n_steps;
    if (uses_truncation(cfg.kind)) row.K = cfg.K;
    row.paths = spec.n_paths;
    row.reps = spec.n_reps;
    row.estimate = s.mean;
    row.benchmark = bench;
    if (bench) row.bias = s.mean - *bench;
    row.se = s.sd;
    row.wall_seconds = wall;
    if (!cr.rep_spots.empty()) {
      const RepSummary sp = summarize_reps(cr.rep_spots);
      cr.spot_bias = sp.mean - spec.model.s0;
      cr.spot_se = sp.sd;
    }
    out.configs.push_back(std::move(cr));
  }
  return out;
}

ExperimentResult merge_results(const std::vector<ExperimentResult>& parts) {
  if (parts.empty()) throw ConfigError("merge_results: nothing to merge");
  ExperimentResult out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto& p = parts[i];
    if (p.case_name != out.case_name || p.product != out.product || p.maturity != out.maturity) {
      throw ConfigError("merge_results: parts differ in case or product");
    }
    out.configs.insert(out.configs.end(), p.configs.begin(), p.configs.end());
  }
  return out;
}

void GridSpec::validate() const {
  check_case_name(case_name);
  base.validate();
  if (!(maturity > 0.0)) throw ParameterError("maturity must be positive");
  if (strikes.empty() || xi_values.empty() || kappa_values.empty()) {
    throw ConfigError("grid needs at least one strike, xi and kappa value");
  }
  for (double k : strikes) {
    if (!(k > 0.0)) throw ParameterError("strike must be positive");
  }
  if (n_paths < 1) throw ParameterError("n_paths must be at least 1");
  if (n_reps < 1) throw ParameterError("n_reps must be at least 1");
  if (configs.empty()) throw ConfigError("at least one scheme config is required");
  for (const auto& cfg : configs) {
    cfg.validate();
    if (cfg.martingale == MartingaleMode::return_variance) {
      throw ConfigError("return_variance correction applies to variance swaps only");
    }
  }
  for (double xi : xi_values) {
    for (double kappa : kappa_values) {
      ModelParams m = base;
      m.xi = xi;
      m.kappa = kappa;
      m.validate();
    }
  }
}

GridResult run_grid(const GridSpec& spec) {
  spec.validate();
  GridResult out;
  out.case_name = spec.case_name;
  out.strikes = spec.strikes;
  out.paths = spec.n_paths;
  out.reps = spec.n_reps;
  for (double xi : spec.xi_values) {
    for (double kappa : spec.kappa_values) {
      ModelParams m = spec.base;
      m.xi = xi;
      m.kappa = kappa;
      std::vector<double> exact;
      for (double k : spec.strikes) exact.push_back(price_european_exact(m, spec.maturity, k));

      for (const auto& cfg : spec.configs) {
        RunControl run{spec.n_paths, spec.seed, 0, spec.threads};
        RunControl warm = run;
        warm.n_paths = std::min(spec.n_paths, kBatchPaths);
        warm.experiment_id = kWarmupExperiment;
        price_european_strip_cmc(m, spec.maturity, spec.strikes, cfg, warm);

        std::vector<std::vector<double>> per_strike(spec.strikes.size());
        const auto t0 = Clock::now();
        for (int rep = 0; rep < spec.n_reps; ++rep) {
          run.experiment_id = static_cast<std::uint64_t>(rep);
          const auto strip = price_european_strip_cmc(m, spec.maturity, spec.strikes, cfg, run);
          for (std::size_t k = 0; k < strip.prices.size(); ++k) {
            per_strike[k].push_back(strip.prices[k].value);
          }
        }
        GridCell cell;
        cell.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        cell.xi = xi;
        cell.kappa = kappa;
        cell.config = cfg;
        for (std::size_t k = 0; k < per_strike.size(); ++k) {
          const RepSummary s = summarize_reps(per_strike[k]);
          cell.strike_estimate.push_back(s.mean);
          cell.strike_benchmark.push_back(exact[k]);
          cell.strike_bias.push_back(s.mean - exact[k]);
          cell.strike_se.push_back(s.sd);
          cell.abs_bias_sum += std::abs(s.mean - exact[k]);
        }
        out.cells.push_back(std::move(cell));
      }
    }
  }
  return out;
}

}  // namespace heston
