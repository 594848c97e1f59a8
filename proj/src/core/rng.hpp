#pragma once

#include <cmath>
#include <cstdint>

namespace gsa {

// splitmix64 finalizer; also the documented sub-stream hash. Results are
// platform-independent, so a (base_seed, index) pair replays bit-identically
// anywhere.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Sub-stream seed for (base_seed, index): two splitmix64 rounds over the pair.
inline std::uint64_t substream_seed(std::uint64_t base_seed, std::uint64_t index) {
  std::uint64_t s = base_seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  return splitmix64(s);
}

// xoshiro256++ stream with Box-Muller normals. Deliberately not std::mt19937 +
// std::normal_distribution: the stdlib distributions are not specified
// bit-exactly across implementations and the output here must replay across
// machines.
class Rng {
public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
    have_spare_ = false;
  }

  // Derive an independent stream keyed by `tag` without consuming this one.
  Rng fork(std::uint64_t tag) const { return Rng(substream_seed(seed_of_state(), tag)); }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on (0,1): 53-bit mantissa, never exactly 0.
  double uniform() {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  // Standard normal via Box-Muller (pair cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  // Stable key for fork(): mix the current state words. fork() is normally
  // called on a freshly seeded stream, before any draws.
  std::uint64_t seed_of_state() const {
    std::uint64_t s = state_[0];
    s ^= state_[1] + 0x9E3779B97F4A7C15ULL;
    s ^= state_[2] + (s << 6);
    s ^= state_[3] + (s >> 2);
    return s;
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_;
};

}  // namespace gsa
