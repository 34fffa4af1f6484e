#pragma once

#include <cstdint>

namespace tailfuse {

// Finalizer from MurmurHash3 (Stafford mix 13).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Counter-based stream in the SplittableRandom style: the state is a counter
// advanced by a per-stream odd increment and every output is a strong mix of
// the counter. Streams with distinct (state, increment) pairs are
// statistically independent, so chunked Monte Carlo runs merge to the same
// result for any worker count.
class RandomStream {
 public:
  RandomStream(std::uint64_t state, std::uint64_t increment)
      : state_(state), increment_(increment | 1ULL) {}

  std::uint64_t next_u64() { return mix64(state_ += increment_); }

  // Uniform on the open interval (0,1): (k + 1/2) / 2^53.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
  std::uint64_t increment_;
};

// Stream for one work chunk. Identical (master, stream_index) pairs yield
// identical streams; distinct pairs yield independent ones.
RandomStream seed_stream(std::uint64_t master, std::uint64_t stream_index);

// Derives a sub-master key, used to give every sweep cell its own family of
// chunk streams.
std::uint64_t derive_key(std::uint64_t master, std::uint64_t salt);

}  // namespace tailfuse
