#include "tailfuse/rng.hpp"

#include <bit>

namespace tailfuse {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Increment derivation as in SplittableRandom: force the increment odd and
// reject weak bit patterns.
std::uint64_t make_increment(std::uint64_t z) {
  z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
  z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
  z = (z ^ (z >> 33)) | 1ULL;
  if (std::popcount(z ^ (z >> 1)) < 24) z ^= 0xaaaaaaaaaaaaaaaaULL;
  return z;
}

}  // namespace

RandomStream seed_stream(std::uint64_t master, std::uint64_t stream_index) {
  const std::uint64_t base = mix64(master + kGolden * (stream_index + 1));
  return RandomStream(base, make_increment(mix64(base + kGolden)));
}

std::uint64_t derive_key(std::uint64_t master, std::uint64_t salt) {
  return mix64(master ^ mix64(salt + kGolden));
}

}  // namespace tailfuse
