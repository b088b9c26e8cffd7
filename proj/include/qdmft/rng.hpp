#pragma once

#include <cstdint>
#include <initializer_list>

namespace qdmft {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for a labelled sub-stream of a root seed. Every random draw in
// the pipeline descends from one root through chains of these labels.
inline constexpr std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> labels) {
  std::uint64_t s = splitmix64(root);
  for (auto l : labels) s = splitmix64(s ^ splitmix64(l + 0x632be59bd9b4e019ULL));
  return s;
}

// Counter-based generator: draw k of stream (seed, stream) is a pure function
// SplitMix64(key + k * gamma), so results do not depend on draw scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(derive_seed(seed, {stream})) {}

  std::uint64_t operator()() { return splitmix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qdmft
