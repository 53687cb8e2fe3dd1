#pragma once

#include <cstdint>
#include <random>

namespace netvis {

/// Names one independent random stream of an experiment.
///
/// Stream 0 is reserved for growing the shared base graph; replica r of an
/// ensemble draws from stream r + 1 (see replica_stream()).
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t replica_index = 0;

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

inline constexpr std::uint64_t kBaseStream = 0;

inline RngStream base_stream(std::uint64_t seed) { return {seed, kBaseStream}; }
inline RngStream replica_stream(std::uint64_t seed, std::uint64_t replica) {
  return {seed, replica + 1};
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64 has a standardized output sequence, and the uniforms below are
// built from raw bits, so trajectories are identical across standard libraries.
class Rng {
 public:
  explicit Rng(RngStream stream)
      : engine_(splitmix64(splitmix64(stream.master_seed) ^ splitmix64(~stream.replica_index))) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_open_low() { return 1.0 - uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace netvis
