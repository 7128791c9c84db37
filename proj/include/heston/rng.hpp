#pragma once

#include <cstdint>
#include <random>

namespace heston {

/// Random stream addressed by (root seed, experiment id, batch id).
///
/// The three indices are mixed through a splitmix64 chain into the seed
/// sequence of a 64-bit Mersenne twister, so a substream's output depends
/// only on its address and never on which thread consumes it. A single
/// instance must not be shared across concurrent callers.
class RngStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RngStream(std::uint64_t root_seed, std::uint64_t experiment_id = 0,
                     std::uint64_t batch_id = 0);

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_(engine_); }

  std::uint64_t next_u64() { return engine_(); }

  engine_type& engine() { return engine_; }

  std::uint64_t root_seed() const { return root_seed_; }
  std::uint64_t experiment_id() const { return experiment_id_; }
  std::uint64_t batch_id() const { return batch_id_; }

 private:
  std::uint64_t root_seed_;
  std::uint64_t experiment_id_;
  std::uint64_t batch_id_;
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// splitmix64 finalizer, exposed for tests and for deriving child seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace heston
