#include "bandforge/rng.hpp"

#include "bandforge/normal.hpp"

namespace bandforge {

namespace {
std::uint64_t fmix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xFF51AFD7ED558CCDULL;
  z ^= z >> 33;
  z *= 0xC4CEB9FE1A85EC53ULL;
  z ^= z >> 33;
  return z;
}
}  // namespace

double RngStream::next_normal() { return norm_quantile(next_unit()); }

std::uint64_t mix_fold(std::uint64_t h, std::uint64_t w) {
  return fmix64(h ^ (w + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
}

RngStream substream(std::uint64_t seed, std::uint64_t domain) {
  return RngStream(mix_fold(fmix64(seed), domain));
}

RngStream substream(std::uint64_t seed, std::uint64_t domain, std::uint64_t i) {
  return RngStream(mix_fold(mix_fold(fmix64(seed), domain), i));
}

RngStream substream(std::uint64_t seed, std::uint64_t domain, std::uint64_t i,
                    std::uint64_t j) {
  return RngStream(mix_fold(mix_fold(mix_fold(fmix64(seed), domain), i), j));
}

}  // namespace bandforge
