#pragma once

#include <cstdint>

namespace bandforge {

// Deterministic splitmix64 stream. Substreams are derived from (seed, index...)
// key material only, never from another stream's position, so every replicate,
// study, and second-level resample draws from its own stream and results do
// not depend on execution order or thread count.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0,1): 53-bit mantissa, offset half a step so
  // 0 and 1 are unreachable (safe to feed through the normal quantile).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal();

  // Uniform on {0,...,n-1} by 128-bit multiply-shift. The bias is below n/2^64,
  // irrelevant at simulation sample sizes, and the draw count per call is fixed,
  // which keeps substreams aligned.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

std::uint64_t mix_fold(std::uint64_t h, std::uint64_t w);

// Stream keys for (seed, domain), (seed, domain, i), (seed, domain, i, j).
// The domain word separates uses (data generation vs. resampling vs. ...).
RngStream substream(std::uint64_t seed, std::uint64_t domain);
RngStream substream(std::uint64_t seed, std::uint64_t domain, std::uint64_t i);
RngStream substream(std::uint64_t seed, std::uint64_t domain, std::uint64_t i,
                    std::uint64_t j);

// Domain tags (arbitrary distinct constants).
namespace rng_domain {
inline constexpr std::uint64_t kDataset = 0x11;
inline constexpr std::uint64_t kBootstrap = 0x22;
inline constexpr std::uint64_t kSecondLevel = 0x33;
inline constexpr std::uint64_t kDensity = 0x44;
inline constexpr std::uint64_t kStudy = 0x55;
}  // namespace rng_domain

}  // namespace bandforge
