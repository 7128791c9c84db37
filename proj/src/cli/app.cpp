#include "heston/cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "heston/analytic.hpp"
#include "heston/cli/presets.hpp"
#include "heston/errors.hpp"
#include "heston/pricing.hpp"

namespace heston::cli {

namespace {

struct Flags {
  std::string case_name, params, scheme, martingale, format = "md", out, reps_out, table;
  std::string K, steps;
  std::optional<double> strike, maturity;
  std::optional<long long> paths, seed;
  std::optional<int> reps, periods, threads;
};

void add_model_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--case", f.case_name, "Preset I, II, III or IV");
  sub->add_option("--params", f.params, "Config file (key = value)");
  sub->add_option("--strike", f.strike, "Strike override");
  sub->add_option("--maturity", f.maturity, "Maturity override (years)");
}

void add_run_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--paths", f.paths, "Paths per estimate");
  sub->add_option("--reps", f.reps, "Repetitions");
  sub->add_option("--seed", f.seed, "Root seed");
  sub->add_option("--threads", f.threads, "Worker threads (default: HESTON_THREADS or all cores)");
  sub->add_option("--out", f.out, "Write the table here instead of stdout");
  sub->add_option("--format", f.format, "csv or md")->check(CLI::IsMember({"csv", "md", "markdown"}));
}

void add_scheme_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--scheme", f.scheme, "Scheme(s), comma separated (or run.scheme in --params)");
  sub->add_option("--martingale", f.martingale, "none, price or return_variance");
  sub->add_option("--reps-out", f.reps_out, "Write per-rep estimates (CSV) here");
}

ConfigMap fold(const Flags& f) {
  ConfigMap cfg;
  if (!f.params.empty()) cfg = load_config_file(f.params);
  ConfigMap top;
  if (!f.case_name.empty()) top["case"] = f.case_name;
  if (!f.scheme.empty()) top["run.scheme"] = f.scheme;
  if (!f.K.empty()) top["run.K"] = f.K;
  if (!f.steps.empty()) top["run.steps"] = f.steps;
  if (!f.martingale.empty()) top["run.martingale"] = f.martingale;
  const auto num = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  if (f.strike) top["product.strike"] = num(*f.strike);
  if (f.maturity) top["product.maturity"] = num(*f.maturity);
  if (f.periods) top["product.periods"] = std::to_string(*f.periods);
  if (f.paths) top["run.paths"] = std::to_string(*f.paths);
  if (f.reps) top["run.reps"] = std::to_string(*f.reps);
  if (f.seed) top["run.seed"] = std::to_string(*f.seed);
  if (f.threads) top["run.threads"] = std::to_string(*f.threads);
  return overlay(std::move(cfg), top);
}

// CLI11 parses a reversed argument vector.
void parse_args(CLI::App& app, const std::vector<std::string>& args) {
  std::vector<std::string> rev(args.rbegin(), args.rend());
  app.parse(rev);
}

struct Built {
  CLI::App app{"Heston Monte Carlo engine with Poisson-conditioned schemes", "heston_mc"};
  Flags f;
  CLI::App* exact = nullptr;
  CLI::App* price = nullptr;
  CLI::App* varswap = nullptr;
  CLI::App* bench = nullptr;
};

void build(Built& b) {
  auto& app = b.app;
  auto& f = b.f;
  app.require_subcommand(1);
  b.exact = app.add_subcommand("exact", "Fourier call price and average-variance moments");
  add_model_flags(b.exact, f);

  b.price = app.add_subcommand("price", "Monte Carlo European call with bias/SE table");
  add_model_flags(b.price, f);
  add_scheme_flags(b.price, f);
  b.price->add_option("--K", f.K, "Truncation level(s) for ge/pois-ge, comma separated");
  b.price->add_option("--steps", f.steps, "Time steps N, comma separated");
  add_run_flags(b.price, f);

  b.varswap = app.add_subcommand("varswap", "Monte Carlo discrete variance swap fair strike");
  add_model_flags(b.varswap, f);
  add_scheme_flags(b.varswap, f);
  b.varswap->add_option("--periods", f.periods, "Monitoring dates N (or product.periods in --params)");
  add_run_flags(b.varswap, f);

  b.bench = app.add_subcommand("bench", "Reproduce a named benchmark table");
  b.bench->add_option("--table", f.table, "opt1..opt4, var3, var4 or grid4")
      ->required()
      ->check(CLI::IsMember({"opt1", "opt2", "opt3", "opt4", "var3", "var4", "grid4"}));
  b.bench->add_option("--reps-out", f.reps_out, "Write per-rep estimates (CSV) here");
  add_run_flags(b.bench, f);
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  file << text;
}

int run_exact(const ParsedCommand& cmd, std::ostream& out) {
  const ModelCase mc = model_case_from_config(cmd.config);
  const double price = price_european_exact(mc.model, mc.maturity, mc.strike);
  const VarianceMoments avg = avg_variance_moments(mc.model, mc.maturity);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "case: %s\nmaturity: %g\nstrike: %g\ncall_price: %.8f\nE(R): %.6f\nVar(R): %.6f\n",
                mc.name.c_str(), mc.maturity, mc.strike, price, avg.mean, avg.variance);
  out << buf;
  return kExitOk;
}

int run_mc(const ParsedCommand& cmd, std::ostream& out) {
  const ExperimentSpec spec = experiment_from_config(cmd.config);
  const ExperimentResult res = run_experiment(spec);
  write_output(emit_table(res, cmd.format), cmd.out_path, out);
  if (!cmd.reps_out_path.empty()) write_output(emit_rep_csv(res), cmd.reps_out_path, out);
  return kExitOk;
}

int run_bench(const ParsedCommand& cmd, std::ostream& out) {
  // bench tables take only run.* overrides; presets define everything else
  const ConfigMap& c = cmd.config;
  BenchRun run;
  const auto get = [&](const char* key, auto& field) {
    if (const auto it = c.find(key); it != c.end()) {
      field = static_cast<std::remove_reference_t<decltype(field)>>(std::stoll(it->second));
    }
  };
  get("run.paths", run.n_paths);
  get("run.reps", run.n_reps);
  get("run.seed", run.seed);
  get("run.threads", run.threads);

  if (cmd.table == "grid4") {
    const GridResult g = run_grid(grid4_spec(run));
    write_output(emit_grid(g, cmd.format), cmd.out_path, out);
    return kExitOk;
  }
  const auto specs = bench_specs(cmd.table, run);
  std::vector<ExperimentResult> parts;
  for (const auto& s : specs) parts.push_back(run_experiment(s));

  std::string text;
  std::string reps;
  if (cmd.table.starts_with("var")) {
    const ExperimentResult merged = merge_results(parts);
    text = emit_table(merged, cmd.format);
    reps = emit_rep_csv(merged);
  } else if (cmd.format == TableFormat::csv) {
    // panels share the CSV header; keep one
    text = emit_table(merge_results(parts), cmd.format);
    reps = emit_rep_csv(merge_results(parts));
  } else {
    for (const auto& p : parts) {
      if (!text.empty()) text += "\n";
      text += emit_table(p, cmd.format);
    }
    reps = emit_rep_csv(merge_results(parts));
  }
  write_output(text, cmd.out_path, out);
  if (!cmd.reps_out_path.empty()) write_output(reps, cmd.reps_out_path, out);
  return kExitOk;
}

}  // namespace

ParsedCommand parse_command(const std::vector<std::string>& args) {
  Built b;
  build(b);
  ParsedCommand cmd;
  try {
    parse_args(b.app, args);
  } catch (const CLI::CallForHelp&) {
    cmd.help = true;
    cmd.help_text = b.app.help("", CLI::AppFormatMode::All);
    return cmd;
  } catch (const CLI::CallForAllHelp&) {
    cmd.help = true;
    cmd.help_text = b.app.help("", CLI::AppFormatMode::All);
    return cmd;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  const Flags& f = b.f;
  if (b.exact->parsed()) {
    cmd.command = "exact";
    if (f.case_name.empty() && f.params.empty()) throw ConfigError("exact needs --case or --params");
  } else if (b.price->parsed()) {
    cmd.command = "price";
  } else if (b.varswap->parsed()) {
    cmd.command = "varswap";
  } else {
    cmd.command = "bench";
    cmd.table = f.table;
  }
  cmd.config = fold(f);
  if (cmd.command == "price") cmd.config["product.type"] = "european_call";
  if (cmd.command == "varswap") cmd.config["product.type"] = "variance_swap";
  if ((cmd.command == "price" || cmd.command == "varswap") && f.case_name.empty() &&
      f.params.empty()) {
    throw ConfigError(cmd.command + " needs --case or --params");
  }
  cmd.out_path = f.out;
  cmd.reps_out_path = f.reps_out;
  cmd.format = parse_format(f.format);
  return cmd;
}

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ParsedCommand cmd;
  try {
    cmd = parse_command(args);
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }
  if (cmd.help) {
    out << cmd.help_text;
    return kExitOk;
  }
  try {
    if (cmd.command == "exact") return run_exact(cmd, out);
    if (cmd.command == "bench") return run_bench(cmd, out);
    return run_mc(cmd, out);
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "invalid parameter: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace heston::cli
