#include "heston/rng.hpp"

#include <array>

namespace heston {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t root, std::uint64_t experiment,
                              std::uint64_t batch) {
  // Counter-style key: each index is folded in with its own tag so that
  // (a, b) and (b, a) land on different streams.
  std::uint64_t key = mix64(root ^ 0x5eedULL);
  key = mix64(key ^ mix64(experiment + 0x1000000000000001ULL));
  key = mix64(key ^ mix64(batch + 0x2000000000000003ULL));

  std::array<std::uint32_t, 8> words{};
  std::uint64_t counter = key;
  for (std::size_t i = 0; i < words.size(); i += 2) {
    const std::uint64_t w = mix64(counter++);
    words[i] = static_cast<std::uint32_t>(w);
    words[i + 1] = static_cast<std::uint32_t>(w >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t root_seed, std::uint64_t experiment_id,
                     std::uint64_t batch_id)
    : root_seed_(root_seed),
      experiment_id_(experiment_id),
      batch_id_(batch_id),
      engine_(seeded_engine(root_seed, experiment_id, batch_id)) {}

}  // namespace heston
