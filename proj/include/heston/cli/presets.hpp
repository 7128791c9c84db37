#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "heston/harness.hpp"
#include "heston/model.hpp"

namespace heston::cli {

/// A named benchmark parameter set. Rates are decimals (0.0319, not 3.19).
struct CasePreset {
  std::string name;
  ModelParams model;
  double maturity = 1.0;
  double strike = 100.0;
};

/// Cases "I".."IV"; throws ConfigError for anything else.
const CasePreset& case_preset(std::string_view name);
const std::vector<CasePreset>& all_presets();

/// Discretization step counts of the time-stepping panel of each option table.
std::vector<int> td_steps_for(std::string_view case_name);

struct BenchRun {
  std::int64_t n_paths = 160'000;
  int n_reps = 200;
  std::uint64_t seed = 1;
  int threads = 0;
};

/// Experiments behind a named table, one per rendered panel
/// (opt1..opt4 have three, var3/var4 one per monitoring frequency).
std::vector<ExperimentSpec> bench_specs(std::string_view table, const BenchRun& run);

GridSpec grid4_spec(const BenchRun& run);

}  // namespace heston::cli
