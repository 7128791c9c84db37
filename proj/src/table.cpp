// Rendering and parsing of harness results.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "heston/errors.hpp"
#include "heston/harness.hpp"

namespace heston {

namespace {

constexpr const char* kCsvHeader =
    "case,scheme,N,K,paths,reps,estimate,benchmark,bias,se,wall_seconds";

std::string exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fixed3(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string bias_se(double bias, double se) { return fixed3(bias) + " (" + fixed3(se) + ")"; }

std::string step_label(double T, int n) {
  const double h = T / n;
  if (std::abs(h - std::round(h)) < 1e-12) return std::to_string(static_cast<long long>(std::round(h)));
  const double inv = n / T;
  if (std::abs(inv - std::round(inv)) < 1e-9) {
    return "1/" + std::to_string(static_cast<long long>(std::round(inv)));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", h);
  return buf;
}

std::string csv_line(const TableRow& r) {
  std::string s = r.case_name + "," + r.scheme + "," + std::to_string(r.n_steps) + ",";
  if (r.K) s += std::to_string(*r.K);
  s += "," + std::to_string(r.paths) + "," + std::to_string(r.reps) + "," + exact(r.estimate) + ",";
  if (r.benchmark) s += exact(*r.benchmark);
  s += ",";
  if (r.bias) s += exact(*r.bias);
  s += "," + exact(r.se) + "," + exact(r.wall_seconds) + "\n";
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double parse_double(const std::string& s, const char* field) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ConfigError(std::string("csv: bad number in column ") + field + ": '" + s + "'");
  }
  return v;
}

long long parse_int(const std::string& s, const char* field) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ConfigError(std::string("csv: bad integer in column ") + field + ": '" + s + "'");
  }
  return v;
}

// Row key inside a two-scheme panel: (N, K) when every config is truncated, N otherwise.
struct PanelLayout {
  bool by_k = true;
  std::vector<std::string> schemes;
  std::vector<std::pair<int, int>> keys;
};

std::pair<int, int> key_of(const ConfigResult& c, bool by_k) {
  return {c.config.n_steps, by_k ? c.config.K : 0};
}

PanelLayout layout(const ExperimentResult& res) {
  PanelLayout p;
  for (const auto& c : res.configs) {
    if (!uses_truncation(c.config.kind)) p.by_k = false;
  }
  for (const auto& c : res.configs) {
    bool seen = false;
    for (const auto& s : p.schemes) seen = seen || s == c.row.scheme;
    if (!seen) p.schemes.push_back(c.row.scheme);
    const auto k = key_of(c, p.by_k);
    seen = false;
    for (const auto& x : p.keys) seen = seen || x == k;
    if (!seen) p.keys.push_back(k);
  }
  return p;
}

const ConfigResult* find(const ExperimentResult& res, const std::string& scheme,
                         std::pair<int, int> key, bool by_k) {
  for (const auto& c : res.configs) {
    if (c.row.scheme == scheme && key_of(c, by_k) == key) return &c;
  }
  return nullptr;
}

std::string markdown(const ExperimentResult& res) {
  const bool swap = res.product == ProductKind::variance_swap;
  const PanelLayout p = layout(res);
  std::ostringstream os;
  os << "**Case " << res.case_name << "**";
  if (!res.configs.empty()) {
    os << " (" << res.configs.front().row.paths << " paths x " << res.configs.front().row.reps
       << " reps)";
  }
  os << "\n\n| N | " << (p.by_k ? "K" : "h");
  if (swap) os << " | Benchmark (x1e-2)";
  std::string rule = "|---|---";
  if (swap) rule += "|---";
  bool any_bench = false;
  for (const auto& c : res.configs) any_bench = any_bench || c.row.benchmark.has_value();
  const std::string value_head = any_bench ? "Bias (SE)" : "Estimate (SE)";
  for (const auto& s : p.schemes) {
    os << " | " << s << " Time (sec) | " << s << (swap ? " " + value_head + " (x1e-2)" : " Option " + value_head);
    rule += "|---|---";
    if (!swap) {
      os << " | " << s << " Spot Bias (SE)";
      rule += "|---";
    }
  }
  os << " |\n" << rule << "|\n";

  for (const auto& key : p.keys) {
    os << "| " << key.first << " | ";
    if (p.by_k) {
      os << key.second;
    } else {
      os << step_label(res.maturity, key.first);
    }
    if (swap) {
      std::string b;
      for (const auto& s : p.schemes) {
        const auto* c = find(res, s, key, p.by_k);
        if (c && c->row.benchmark && b.empty()) b = fixed3(*c->row.benchmark * 100.0);
      }
      os << " | " << b;
    }
    for (const auto& s : p.schemes) {
      const auto* c = find(res, s, key, p.by_k);
      if (!c) {
        os << (swap ? " |  | " : " |  |  | ");
        continue;
      }
      const double scale = swap ? 100.0 : 1.0;
      const double value = c->row.bias ? *c->row.bias : c->row.estimate;
      os << " | " << fixed3(c->row.wall_seconds) << " | " << bias_se(value * scale, c->row.se * scale);
      if (!swap) {
        os << " | ";
        if (c->spot_bias) os << bias_se(*c->spot_bias, *c->spot_se);
      }
    }
    os << " |\n";
  }
  return os.str();
}

std::string config_label(const SchemeConfig& c) {
  std::string s = to_string(c.kind) + " (N=" + std::to_string(c.n_steps);
  if (uses_truncation(c.kind)) s += ", K=" + std::to_string(c.K);
  return s + ")";
}

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

std::string emit_table(const ExperimentResult& result, TableFormat format) {
  if (result.configs.empty()) throw ConfigError("emit_table: empty result");
  if (format == TableFormat::markdown) return markdown(result);
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& c : result.configs) out += csv_line(c.row);
  return out;
}

std::string emit_rep_csv(const ExperimentResult& result) {
  std::string out = "case,scheme,N,K,rep,estimate,spot\n";
  for (const auto& c : result.configs) {
    for (std::size_t i = 0; i < c.rep_estimates.size(); ++i) {
      out += c.row.case_name + "," + c.row.scheme + "," + std::to_string(c.row.n_steps) + ",";
      if (c.row.K) out += std::to_string(*c.row.K);
      out += "," + std::to_string(i) + "," + exact(c.rep_estimates[i]) + ",";
      if (i < c.rep_spots.size()) out += exact(c.rep_spots[i]);
      out += "\n";
    }
  }
  return out;
}

std::vector<TableRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv: empty document");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ConfigError("csv: unexpected header '" + line + "'");
  std::vector<TableRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 11) throw ConfigError("csv: expected 11 fields, got " + std::to_string(f.size()));
    TableRow r;
    r.case_name = f[0];
    r.scheme = f[1];
    r.n_steps = static_cast<int>(parse_int(f[2], "N"));
    if (!f[3].empty()) r.K = static_cast<int>(parse_int(f[3], "K"));
    r.paths = parse_int(f[4], "paths");
    r.reps = static_cast<int>(parse_int(f[5], "reps"));
    r.estimate = parse_double(f[6], "estimate");
    if (!f[7].empty()) r.benchmark = parse_double(f[7], "benchmark");
    if (!f[8].empty()) r.bias = parse_double(f[8], "bias");
    r.se = parse_double(f[9], "se");
    r.wall_seconds = parse_double(f[10], "wall_seconds");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string emit_grid(const GridResult& result, TableFormat format) {
  if (result.cells.empty()) throw ConfigError("emit_grid: empty result");
  if (format == TableFormat::csv) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& cell : result.cells) {
      TableRow r;
      r.case_name = result.case_name + " xi=" + short_num(cell.xi) + " kappa=" + short_num(cell.kappa);
      r.scheme = to_string(cell.config.kind);
      r.n_steps = cell.config.n_steps;
      if (uses_truncation(cell.config.kind)) r.K = cell.config.K;
      r.paths = result.paths;
      r.reps = result.reps;
      double est = 0.0, bench = 0.0, var = 0.0;
      for (std::size_t k = 0; k < cell.strike_bias.size(); ++k) {
        est += cell.strike_estimate[k];
        bench += cell.strike_benchmark[k];
        var += cell.strike_se[k] * cell.strike_se[k];
      }
      r.estimate = est;
      r.benchmark = bench;
      r.bias = cell.abs_bias_sum;
      r.se = std::sqrt(var);
      r.wall_seconds = cell.wall_seconds;
      out += csv_line(r);
    }
    return out;
  }

  // distinct configs in order, one Time/Bias column pair each
  std::vector<SchemeConfig> configs;
  for (const auto& cell : result.cells) {
    bool seen = false;
    for (const auto& c : configs) seen = seen || c == cell.config;
    if (!seen) configs.push_back(cell.config);
  }
  std::ostringstream os;
  os << "**Case " << result.case_name << " grid** (sum of absolute biases over strikes";
  for (double k : result.strikes) os << " " << short_num(k);
  os << "; " << result.paths << " paths x " << result.reps << " reps)\n\n| xi | kappa";
  std::string rule = "|---|---";
  for (const auto& c : configs) {
    os << " | " << config_label(c) << " Time | " << config_label(c) << " Bias";
    rule += "|---|---";
  }
  os << " |\n" << rule << "|\n";
  for (std::size_t i = 0; i < result.cells.size();) {
    const double xi = result.cells[i].xi;
    const double kappa = result.cells[i].kappa;
    os << "| " << short_num(xi) << " | " << short_num(kappa);
    for (const auto& c : configs) {
      const GridCell* hit = nullptr;
      for (const auto& cell : result.cells) {
        if (cell.xi == xi && cell.kappa == kappa && cell.config == c) hit = &cell;
      }
      if (hit) {
        os << " | " << fixed3(hit->wall_seconds) << " | " << fixed3(hit->abs_bias_sum);
      } else {
        os << " |  | ";
      }
    }
    os << " |\n";
    while (i < result.cells.size() && result.cells[i].xi == xi && result.cells[i].kappa == kappa) ++i;
  }
  return os.str();
}

}  // namespace heston
