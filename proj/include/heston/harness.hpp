#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heston/model.hpp"
#include "heston/schemes.hpp"

namespace heston {

enum class ProductKind { european_call, variance_swap };
enum class BenchmarkSource { fourier, varswap_closed_form, none };

std::string to_string(ProductKind kind);
std::string to_string(BenchmarkSource source);
ProductKind parse_product(const std::string& text);
BenchmarkSource parse_benchmark(const std::string& text);

struct Product {
  ProductKind kind = ProductKind::european_call;
  double strike = 100.0;  // european_call
  int periods = 0;        // variance_swap: monitoring dates, must equal each config's n_steps

  friend bool operator==(const Product&, const Product&) = default;
};

struct ExperimentSpec {
  std::string case_name = "custom";
  ModelParams model;
  double maturity = 1.0;
  Product product;
  std::vector<SchemeConfig> configs;
  std::int64_t n_paths = 160'000;
  int n_reps = 200;
  std::uint64_t seed = 1;
  BenchmarkSource benchmark = BenchmarkSource::fourier;
  int threads = 0;     // 0: default_thread_count()
  bool warmup = true;  // one small untimed run per config before timing

  /// Throws ConfigError or ParameterError.
  void validate() const;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// One summary line; exactly the CSV columns.
struct TableRow {
  std::string case_name;
  std::string scheme;
  int n_steps = 1;
  std::optional<int> K;  // only for truncated schemes
  std::int64_t paths = 0;
  int reps = 0;
  double estimate = 0.0;
  std::optional<double> benchmark;
  std::optional<double> bias;
  double se = 0.0;
  double wall_seconds = 0.0;

  friend bool operator==(const TableRow&, const TableRow&) = default;
};

struct ConfigResult {
  SchemeConfig config;
  TableRow row;
  std::vector<double> rep_estimates;
  std::vector<double> rep_spots;  // option runs only
  std::optional<double> spot_bias;
  std::optional<double> spot_se;
};

struct ExperimentResult {
  std::string case_name;
  ProductKind product = ProductKind::european_call;
  double maturity = 1.0;
  std::vector<ConfigResult> configs;
};

/// Mean and population standard deviation of per-rep estimates.
struct RepSummary {
  double mean = 0.0;
  double sd = 0.0;
};
RepSummary summarize_reps(const std::vector<double>& estimates);

/// Benchmark value for the spec's product, or nullopt for BenchmarkSource::none.
std::optional<double> compute_benchmark(const ExperimentSpec& spec);

/// Rep r of every config uses experiment id r, so configs share random streams.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Concatenates results of the same case and product into one table.
ExperimentResult merge_results(const std::vector<ExperimentResult>& parts);

enum class TableFormat { csv, markdown };
TableFormat parse_format(const std::string& text);

std::string emit_table(const ExperimentResult& result, TableFormat format);
/// Long-format per-rep estimates: case, scheme, N, K, rep, estimate, spot.
std::string emit_rep_csv(const ExperimentResult& result);
std::vector<TableRow> parse_csv(const std::string& text);

/// Volatility-of-variance by mean-reversion sweep around a base case, each
/// cell priced for several strikes on shared paths and scored by the sum of
/// absolute biases.
struct GridSpec {
  std::string case_name = "IV";
  ModelParams base;
  double maturity = 1.0;
  std::vector<double> strikes{100.0, 110.0, 120.0};
  std::vector<double> xi_values{1.0, 0.25, 0.1};
  std::vector<double> kappa_values{4.0, 1.0, 0.1};
  std::vector<SchemeConfig> configs;
  std::int64_t n_paths = 160'000;
  int n_reps = 200;
  std::uint64_t seed = 1;
  int threads = 0;

  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct GridCell {
  double xi = 0.0;
  double kappa = 0.0;
  SchemeConfig config;
  double abs_bias_sum = 0.0;
  std::vector<double> strike_estimate;
  std::vector<double> strike_benchmark;
  std::vector<double> strike_bias;
  std::vector<double> strike_se;
  double wall_seconds = 0.0;
};

struct GridResult {
  std::string case_name;
  std::vector<double> strikes;
  std::int64_t paths = 0;
  int reps = 0;
  std::vector<GridCell> cells;
};

GridResult run_grid(const GridSpec& spec);

/// CSV rows use the standard columns: case "IV xi=.. kappa=..", estimate and
/// benchmark summed over strikes, bias the sum of absolute biases, se the
/// root sum of squares.
std::string emit_grid(const GridResult& result, TableFormat format);

}  // namespace heston
