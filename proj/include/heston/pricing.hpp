#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include <Eigen/Core>

#include "heston/model.hpp"
#include "heston/rng.hpp"
#include "heston/schemes.hpp"

namespace heston {

/// Paths per RNG substream; also the unit of parallel work.
inline constexpr std::int64_t kBatchPaths = 10'000;

/// Per-path terminal state of a batch.
struct PathBatch {
  Eigen::ArrayXd log_forward;         // ln(F_T / S_0), corrections included
  Eigen::ArrayXd total_iv;            // integrated variance over [0, T]
  Eigen::ArrayXd realized_variance;   // sum of squared log returns (+ corrections), if sampled
};

/// Simulates n_paths paths of cfg.n_steps steps each from one stream.
/// With sample_returns, one normal per step is drawn after the step to
/// build the realized variance.
PathBatch simulate_paths(const ModelParams& model, double T, const SchemeConfig& cfg,
                         std::int64_t n_paths, RngStream& rng, bool sample_returns = false);

/// Mean of a payoff with its Monte Carlo standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t count = 0;
};

/// Streaming mean/variance with a deterministic pairwise merge.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Sample variance (n - 1 denominator); 0 for fewer than two points.
  double variance() const;
  Estimate estimate() const;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Addressing and parallelism of one Monte Carlo estimator. Batch b of
/// experiment e uses RngStream(seed, e, b); results do not depend on threads.
struct RunControl {
  std::int64_t n_paths = 160'000;
  std::uint64_t seed = 1;
  std::uint64_t experiment_id = 0;
  int threads = 0;  // 0: default_thread_count()
};

/// HESTON_THREADS if set and positive, else the hardware concurrency.
int default_thread_count();

/// Runs body(batch_index, batch_paths) for every batch on a worker pool and
/// returns the per-batch stats merged in batch order.
std::vector<RunningStats> run_batches(std::int64_t n_paths, int threads,
                                      const std::function<std::vector<RunningStats>(
                                          std::int64_t batch, std::int64_t paths)>& body);

struct EuropeanEstimate {
  Estimate price;  // conditional Monte Carlo call price
  Estimate spot;   // e^{(q - r) T} F_T, should recover S_0
};

/// Conditional Monte Carlo: discounted mean of the Black call on the
/// conditional forward with volatility sqrt((1 - rho^2) I / T).
EuropeanEstimate price_european_cmc(const ModelParams& model, double T, double strike,
                                    const SchemeConfig& cfg, const RunControl& run);

/// Several strikes priced on the same paths. prices[i] matches strikes[i].
struct StripEstimate {
  std::vector<Estimate> prices;
  Estimate spot;
};
StripEstimate price_european_strip_cmc(const ModelParams& model, double T,
                                       std::span<const double> strikes, const SchemeConfig& cfg,
                                       const RunControl& run);

/// e^{(q - r) T} times the mean of the simulated forwards.
Estimate reconstruct_spot(const ModelParams& model, double T, const PathBatch& paths);

/// Fair strike of the discretely monitored variance swap with cfg.n_steps
/// monitoring dates over [0, T]. QEM and POIS-TD only.
Estimate varswap_fair_strike_mc(const ModelParams& model, double T, const SchemeConfig& cfg,
                                const RunControl& run);

struct MultifactorSample {
  double log_return = 0.0;    // ln(S_T / S_0)
  double cond_forward = 0.0;  // F_T
  double total_sigma = 0.0;   // sqrt(sum_m (1 - rho_m^2) I_m)
};

/// One terminal draw of the multifactor model, one POIS-GE step per factor
/// followed by a single normal for the combined diffusion term.
MultifactorSample simulate_multifactor_terminal(std::span<const ModelParams> factors, double T,
                                                int K, RngStream& rng);

EuropeanEstimate price_multifactor_cmc(std::span<const ModelParams> factors, double T,
                                       double strike, int K, const RunControl& run);

}  // namespace heston
