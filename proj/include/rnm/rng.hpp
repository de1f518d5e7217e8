#pragma once

#include <cmath>
#include <cstdint>

namespace rnm {

// splitmix64 step (Vigna); used to derive per-path seeds from (master, index)
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256++ with all draw transforms pinned in this header, so streams are
// bit-identical across platforms and independent of draw-site scheduling.
// Each path gets its own stream keyed by (master_seed, path_index).
class Rng {
 public:
  Rng(std::uint64_t master_seed, std::uint64_t stream_index) {
    std::uint64_t sm = master_seed ^ (0x6c62272e07bb0142ull * (stream_index + 1));
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on (0,1); never returns 0 so logs are safe
  double uniform() {
    const double u = (next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double exponential() { return -std::log(uniform()); }

  // Box-Muller pair of independent standard normals
  void normal_pair(double& n1, double& n2) {
    const double r = std::sqrt(2.0 * exponential());
    const double th = 2.0 * M_PI * uniform();
    n1 = r * std::cos(th);
    n2 = r * std::sin(th);
  }

  double normal() {
    double n1, n2;
    normal_pair(n1, n2);
    return n1;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace rnm
