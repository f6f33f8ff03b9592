// Deterministic random streams.  Every randomized stage derives its own
// substream from the single run seed, so results are reproducible regardless
// of the order in which stages execute.  Doubles are produced by an explicit
// bit construction rather than std::uniform_real_distribution, whose output
// is implementation defined.
#pragma once

#include <cstdint>

namespace kirchpass {

/// splitmix64 step; used both as a generator and as a seed scrambler.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Small deterministic generator with a jumpable substream structure.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so that nearby seeds decorrelate.
    splitmix64(state_);
  }

  /// Substream for a named stage: mixes a tag and two indices into the seed.
  static Rng substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a,
                       std::uint64_t b) {
    std::uint64_t s = seed;
    splitmix64(s);
    s ^= 0x517cc1b727220a95ULL * (tag + 1);
    splitmix64(s);
    s ^= 0x2545f4914f6cdd1dULL * (a + 1);
    splitmix64(s);
    s ^= 0x9e3779b97f4a7c15ULL * (b + 1);
    return Rng(s);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (-1, 1).
  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

 private:
  std::uint64_t state_;
};

}  // namespace kirchpass
