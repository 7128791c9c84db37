#pragma once

#include <map>
#include <string>

#include "heston/harness.hpp"

namespace heston::cli {

/// Flat key/value settings, keys like "model.v0" or "run.scheme".
///
/// Text format: one `key = value` per line, `#` starts a comment, and a
/// `[section]` line prefixes the following bare keys with "section.".
/// Recognized keys:
///   case                                  preset I..IV used as the base
///   model.s0 v0 kappa theta xi rho r q    rates as decimals (0.0319)
///   product.type                          european_call | variance_swap
///   product.strike product.maturity product.periods
///   run.scheme                            comma list of ge, pois-ge, ig, qem, pois-td
///   run.K run.steps                       comma lists, crossed with the schemes
///   run.martingale                        none | price | return_variance
///   run.paths run.reps run.seed run.threads run.benchmark run.name run.warmup
///   grid.xi grid.kappa grid.strikes       comma lists for the sweep
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

/// Later maps win.
ConfigMap overlay(ConfigMap base, const ConfigMap& top);

struct ModelCase {
  std::string name = "custom";
  ModelParams model;
  double maturity = 1.0;
  double strike = 100.0;
};

ModelCase model_case_from_config(const ConfigMap& cfg);
ExperimentSpec experiment_from_config(const ConfigMap& cfg);
GridSpec grid_from_config(const ConfigMap& cfg);

}  // namespace heston::cli
