#include "heston/pricing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "heston/analytic.hpp"
#include "heston/errors.hpp"

namespace heston {

void RunningStats::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double d = o.mean_ - mean_;
  mean_ += d * nb / n;
  m2_ += o.m2_ + d * d * na * nb / n;
  n_ += o.n_;
}

double RunningStats::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

Estimate RunningStats::estimate() const {
  return {mean_, n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0, n_};
}

int default_thread_count() {
  if (const char* env = std::getenv("HESTON_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<RunningStats> run_batches(
    std::int64_t n_paths, int threads,
    const std::function<std::vector<RunningStats>(std::int64_t, std::int64_t)>& body) {
  if (n_paths < 1) throw ParameterError("n_paths must be at least 1");
  const std::int64_t n_batches = (n_paths + kBatchPaths - 1) / kBatchPaths;
  std::vector<std::vector<RunningStats>> per_batch(static_cast<std::size_t>(n_batches));
  const auto paths_in = [&](std::int64_t b) {
    return std::min(kBatchPaths, n_paths - b * kBatchPaths);
  };

  const int workers =
      static_cast<int>(std::min<std::int64_t>(threads > 0 ? threads : default_thread_count(), n_batches));
  if (workers <= 1) {
    for (std::int64_t b = 0; b < n_batches; ++b) per_batch[b] = body(b, paths_in(b));
  } else {
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::int64_t b = next++; b < n_batches; b = next++) {
          try {
            per_batch[b] = body(b, paths_in(b));
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n_batches;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  std::vector<RunningStats> merged = per_batch.front();
  for (std::int64_t b = 1; b < n_batches; ++b) {
    for (std::size_t i = 0; i < merged.size(); ++i) merged[i].merge(per_batch[b][i]);
  }
  return merged;
}

PathBatch simulate_paths(const ModelParams& model, double T, const SchemeConfig& cfg,
                         std::int64_t n_paths, RngStream& rng, bool sample_returns) {
  if (!(T > 0.0)) throw ParameterError("T must be positive");
  if (n_paths < 1) throw ParameterError("n_paths must be at least 1");
  cfg.validate();
  const double h = T / cfg.n_steps;
  const StepKernel kernel(model, h, cfg);

  PathBatch out;
  out.log_forward.setZero(n_paths);
  out.total_iv.setZero(n_paths);
  if (sample_returns) out.realized_variance.setZero(n_paths);

  for (std::int64_t p = 0; p < n_paths; ++p) {
    double v = model.v0;
    double log_f = 0.0;
    double iv_sum = 0.0;
    double rv = 0.0;
    for (int i = 0; i < cfg.n_steps; ++i) {
      const StepResult s = kernel.step(v, rng);
      if (sample_returns) {
        const double ret = sample_log_return(v, s.v_next, s.iv, h, model, rng.normal(), s.mart_price);
        rv += ret * ret + s.mart_retvar;
      }
      log_f += log_forward_increment(v, s.v_next, s.iv, h, model, s.mart_price);
      iv_sum += s.iv;
      v = s.v_next;
    }
    out.log_forward[p] = log_f;
    out.total_iv[p] = iv_sum;
    if (sample_returns) out.realized_variance[p] = rv;
  }
  return out;
}

Estimate reconstruct_spot(const ModelParams& model, double T, const PathBatch& paths) {
  RunningStats stats;
  const double scale = model.s0 * std::exp((model.q - model.r) * T);
  for (Eigen::Index i = 0; i < paths.log_forward.size(); ++i) {
    stats.add(scale * std::exp(paths.log_forward[i]));
  }
  return stats.estimate();
}

StripEstimate price_european_strip_cmc(const ModelParams& model, double T,
                                       std::span<const double> strikes, const SchemeConfig& cfg,
                                       const RunControl& run) {
  model.validate();
  cfg.validate();
  if (strikes.empty()) throw ParameterError("at least one strike is required");
  for (double k : strikes) {
    if (!(k > 0.0)) throw ParameterError("strike must be positive");
  }
  if (cfg.martingale == MartingaleMode::return_variance) {
    throw ConfigError("return_variance correction applies to variance swaps only");
  }
  const double discount = std::exp(-model.r * T);
  const double spot_scale = std::exp((model.q - model.r) * T);
  const double resid = 1.0 - model.rho * model.rho;
  const std::size_t n_strikes = strikes.size();

  const auto merged = run_batches(run.n_paths, run.threads, [&](std::int64_t b, std::int64_t n) {
    RngStream rng(run.seed, run.experiment_id, static_cast<std::uint64_t>(b));
    const PathBatch paths = simulate_paths(model, T, cfg, n, rng);
    const Eigen::ArrayXd forward = model.s0 * paths.log_forward.exp();
    const Eigen::ArrayXd sigma = (resid * paths.total_iv / T).sqrt();
    std::vector<RunningStats> stats(n_strikes + 1);
    for (Eigen::Index i = 0; i < forward.size(); ++i) {
      for (std::size_t k = 0; k < n_strikes; ++k) {
        stats[k].add(discount * bs_call_undiscounted(forward[i], sigma[i], T, strikes[k]));
      }
      stats[n_strikes].add(spot_scale * forward[i]);
    }
    return stats;
  });
  StripEstimate out;
  for (std::size_t k = 0; k < n_strikes; ++k) out.prices.push_back(merged[k].estimate());
  out.spot = merged[n_strikes].estimate();
  return out;
}

EuropeanEstimate price_european_cmc(const ModelParams& model, double T, double strike,
                                    const SchemeConfig& cfg, const RunControl& run) {
  const double strikes[] = {strike};
  const auto strip = price_european_strip_cmc(model, T, strikes, cfg, run);
  return {strip.prices.front(), strip.spot};
}

Estimate varswap_fair_strike_mc(const ModelParams& model, double T, const SchemeConfig& cfg,
                                const RunControl& run) {
  model.validate();
  cfg.validate();
  if (!is_time_discretization(cfg.kind)) {
    throw ConfigError("variance swaps are priced with QEM or POIS-TD only");
  }
  const auto merged = run_batches(run.n_paths, run.threads, [&](std::int64_t b, std::int64_t n) {
    RngStream rng(run.seed, run.experiment_id, static_cast<std::uint64_t>(b));
    const PathBatch paths = simulate_paths(model, T, cfg, n, rng, true);
    std::vector<RunningStats> stats(1);
    for (Eigen::Index i = 0; i < paths.realized_variance.size(); ++i) {
      stats[0].add(paths.realized_variance[i] / T);
    }
    return stats;
  });
  return merged[0].estimate();
}

namespace {

void check_factors(std::span<const ModelParams> factors) {
  if (factors.empty()) throw ParameterError("multifactor: at least one factor is required");
  for (const auto& f : factors) {
    f.validate();
    const auto& a = factors.front();
    if (f.s0 != a.s0 || f.r != a.r || f.q != a.q) {
      throw ParameterError("multifactor: factors must share s0, r and q");
    }
  }
}

}  // namespace

MultifactorSample simulate_multifactor_terminal(std::span<const ModelParams> factors, double T,
                                                int K, RngStream& rng) {
  check_factors(factors);
  const ModelParams& lead = factors.front();
  double drift = (lead.r - lead.q) * T;
  double leverage = 0.0;  // sum of the rho-driven terms shared by return and forward
  double iv_half = 0.0;
  double rho2_half = 0.0;
  double sigma2 = 0.0;
  for (const auto& f : factors) {
    const StepResult s = step_pois_ge(f.v0, T, K, f, rng);
    leverage += (f.rho / f.xi) * (s.v_next - f.v0 + f.kappa * (s.iv - f.theta * T));
    iv_half += 0.5 * s.iv;
    rho2_half += 0.5 * f.rho * f.rho * s.iv;
    sigma2 += (1.0 - f.rho * f.rho) * s.iv;
  }
  MultifactorSample out;
  out.total_sigma = std::sqrt(sigma2);
  out.log_return = drift - iv_half + leverage + out.total_sigma * rng.normal();
  out.cond_forward = lead.s0 * std::exp(drift - rho2_half + leverage);
  return out;
}

EuropeanEstimate price_multifactor_cmc(std::span<const ModelParams> factors, double T,
                                       double strike, int K, const RunControl& run) {
  check_factors(factors);
  if (!(strike > 0.0) || !(T > 0.0)) throw ParameterError("strike and T must be positive");
  const ModelParams& lead = factors.front();
  const double discount = std::exp(-lead.r * T);
  const double spot_scale = std::exp((lead.q - lead.r) * T);
  const auto merged = run_batches(run.n_paths, run.threads, [&](std::int64_t b, std::int64_t n) {
    RngStream rng(run.seed, run.experiment_id, static_cast<std::uint64_t>(b));
    std::vector<RunningStats> stats(2);
    for (std::int64_t p = 0; p < n; ++p) {
      const auto s = simulate_multifactor_terminal(factors, T, K, rng);
      stats[0].add(discount *
                   bs_call_undiscounted(s.cond_forward, s.total_sigma / std::sqrt(T), T, strike));
      stats[1].add(spot_scale * s.cond_forward);
    }
    return stats;
  });
  return {merged[0].estimate(), merged[1].estimate()};
}

}  // namespace heston
