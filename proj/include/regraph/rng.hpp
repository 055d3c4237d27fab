#pragma once

#include <cstdint>
#include <string>

namespace regraph {

// xoshiro256** seeded via splitmix64. Self-contained so draw sequences are
// identical across platforms and standard library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  // uniform in [0, 1)
  double uniform();
  double uniform(double lo, double hi);
  // standard normal via polar Box-Muller (second draw cached)
  double normal();
  // uniform integer in [0, n)
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  bool has_cached_ = false;
  double cached_ = 0.0;
};

// Deterministic sub-seed for a named purpose: FNV-1a over the purpose string
// mixed into the base seed with splitmix64.
std::uint64_t sub_seed(std::uint64_t base_seed, const std::string& purpose);

}  // namespace regraph
