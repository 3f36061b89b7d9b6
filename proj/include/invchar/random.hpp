#pragma once

#include <cstdint>
#include <random>

namespace invchar {

/// Deterministic, platform-independent random stream. One master seed can
/// feed several independent streams; the draws are fully specified
/// (mt19937_64 plus a fixed 53-bit mapping), so a seed reproduces the same
/// values everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi); returns lo exactly when lo == hi.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

// Stream ids: each consumer of the master seed gets its own stream so the
// draws stay independent of evaluation order elsewhere.
inline constexpr std::uint64_t kTestcaseSelectionStream = 1;
inline constexpr std::uint64_t kDelayValidationStream = 2;

}  // namespace invchar
