#include "heston/cli/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "heston/cli/presets.hpp"
#include "heston/errors.hpp"

namespace heston::cli {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "case",          "model.s0",      "model.v0",        "model.kappa",    "model.theta",
      "model.xi",      "model.rho",     "model.r",         "model.q",        "product.type",
      "product.strike", "product.maturity", "product.periods", "run.scheme",  "run.K",
      "run.steps",     "run.martingale", "run.paths",      "run.reps",       "run.seed",
      "run.threads",   "run.benchmark", "run.name",        "run.warmup",     "grid.xi",
      "grid.kappa",    "grid.strikes"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const ConfigMap& cfg, const std::string& key) {
  const std::string& s = cfg.at(key);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  }
  return v;
}

long long to_int(const std::string& key, const std::string& s) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ConfigError(key + ": expected an integer, got '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> double_list(const ConfigMap& cfg, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(cfg.at(key))) {
    ConfigMap one{{key, item}};
    out.push_back(to_double(one, key));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<int> int_list(const ConfigMap& cfg, const std::string& key) {
  std::vector<int> out;
  for (const auto& item : split_list(cfg.at(key))) out.push_back(static_cast<int>(to_int(key, item)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

template <class T>
void maybe(const ConfigMap& cfg, const std::string& key, T& field) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return;
  if constexpr (std::is_same_v<T, double>) {
    field = to_double(cfg, key);
  } else {
    field = static_cast<T>(to_int(key, it->second));
  }
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    if (!known_keys().contains(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

ConfigMap overlay(ConfigMap base, const ConfigMap& top) {
  for (const auto& [k, v] : top) {
    if (!known_keys().contains(k)) throw ConfigError("unknown key '" + k + "'");
    base[k] = v;
  }
  return base;
}

ModelCase model_case_from_config(const ConfigMap& cfg) {
  ModelCase mc;
  if (const auto it = cfg.find("case"); it != cfg.end()) {
    const CasePreset& p = case_preset(it->second);
    mc.name = p.name;
    mc.model = p.model;
    mc.maturity = p.maturity;
    mc.strike = p.strike;
  }
  maybe(cfg, "model.s0", mc.model.s0);
  maybe(cfg, "model.v0", mc.model.v0);
  maybe(cfg, "model.kappa", mc.model.kappa);
  maybe(cfg, "model.theta", mc.model.theta);
  maybe(cfg, "model.xi", mc.model.xi);
  maybe(cfg, "model.rho", mc.model.rho);
  maybe(cfg, "model.r", mc.model.r);
  maybe(cfg, "model.q", mc.model.q);
  maybe(cfg, "product.strike", mc.strike);
  maybe(cfg, "product.maturity", mc.maturity);
  if (const auto it = cfg.find("run.name"); it != cfg.end()) mc.name = it->second;
  mc.model.validate();
  if (!(mc.maturity > 0.0)) throw ParameterError("product.maturity must be positive");
  return mc;
}

ExperimentSpec experiment_from_config(const ConfigMap& cfg) {
  const ModelCase mc = model_case_from_config(cfg);
  ExperimentSpec s;
  s.case_name = mc.name;
  s.model = mc.model;
  s.maturity = mc.maturity;
  if (const auto it = cfg.find("product.type"); it != cfg.end()) s.product.kind = parse_product(it->second);
  s.product.strike = mc.strike;
  const bool swap = s.product.kind == ProductKind::variance_swap;

  std::vector<int> steps;
  if (cfg.contains("run.steps")) steps = int_list(cfg, "run.steps");
  if (swap) {
    if (cfg.contains("product.periods")) {
      s.product.periods = static_cast<int>(to_int("product.periods", cfg.at("product.periods")));
      if (steps.empty()) steps = {s.product.periods};
    } else if (steps.size() == 1) {
      s.product.periods = steps.front();
    } else {
      throw ConfigError("variance swap needs product.periods");
    }
  }
  if (steps.empty()) steps = {1};

  if (!cfg.contains("run.scheme")) throw ConfigError("run.scheme is required");
  std::vector<SchemeKind> kinds;
  for (const auto& name : split_list(cfg.at("run.scheme"))) kinds.push_back(parse_scheme(name));
  if (kinds.empty()) throw ConfigError("run.scheme: empty list");
  std::vector<int> ks{0};
  const bool has_k = cfg.contains("run.K");
  if (has_k) ks = int_list(cfg, "run.K");

  std::optional<MartingaleMode> mode;
  if (const auto it = cfg.find("run.martingale"); it != cfg.end()) mode = parse_martingale_mode(it->second);

  for (int n : steps) {
    for (SchemeKind kind : kinds) {
      if (has_k && !uses_truncation(kind)) {
        for (int k : ks) {
          if (k != 0) throw ConfigError("run.K applies to ge and pois-ge only, not " + to_string(kind));
        }
      }
      const std::vector<int> kind_ks = uses_truncation(kind) ? ks : std::vector<int>{0};
      for (int k : kind_ks) {
        MartingaleMode m = MartingaleMode::price;
        if (mode) {
          m = *mode;
        } else if (swap && kind == SchemeKind::pois_td) {
          m = MartingaleMode::return_variance;
        }
        s.configs.push_back({kind, k, n, m});
      }
    }
  }

  s.benchmark = swap ? BenchmarkSource::varswap_closed_form : BenchmarkSource::fourier;
  if (const auto it = cfg.find("run.benchmark"); it != cfg.end()) s.benchmark = parse_benchmark(it->second);
  maybe(cfg, "run.paths", s.n_paths);
  maybe(cfg, "run.reps", s.n_reps);
  long long seed = static_cast<long long>(s.seed);
  maybe(cfg, "run.seed", seed);
  if (seed < 0) throw ParameterError("run.seed must be nonnegative");
  s.seed = static_cast<std::uint64_t>(seed);
  maybe(cfg, "run.threads", s.threads);
  if (const auto it = cfg.find("run.warmup"); it != cfg.end()) {
    if (it->second == "true" || it->second == "1") {
      s.warmup = true;
    } else if (it->second == "false" || it->second == "0") {
      s.warmup = false;
    } else {
      throw ConfigError("run.warmup: expected true or false");
    }
  }
  s.validate();
  return s;
}

GridSpec grid_from_config(const ConfigMap& cfg) {
  const ModelCase mc = model_case_from_config(cfg);
  GridSpec g;
  g.case_name = mc.name;
  g.base = mc.model;
  g.maturity = mc.maturity;
  if (cfg.contains("grid.xi")) g.xi_values = double_list(cfg, "grid.xi");
  if (cfg.contains("grid.kappa")) g.kappa_values = double_list(cfg, "grid.kappa");
  if (cfg.contains("grid.strikes")) g.strikes = double_list(cfg, "grid.strikes");
  ConfigMap runcfg = cfg;
  runcfg.erase("product.type");
  runcfg.erase("product.periods");
  runcfg.erase("run.benchmark");
  if (runcfg.contains("run.scheme")) {
    const ExperimentSpec s = experiment_from_config(runcfg);
    g.configs = s.configs;
    g.n_paths = s.n_paths;
    g.n_reps = s.n_reps;
    g.seed = s.seed;
    g.threads = s.threads;
  } else {
    throw ConfigError("run.scheme is required");
  }
  g.validate();
  return g;
}

}  // namespace heston::cli
