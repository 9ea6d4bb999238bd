#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace hiresim {

// Purpose tag for a draw; keeps the counter space of distinct quantities
// disjoint so adding a draw of one kind never shifts another.
enum class Draw : std::uint32_t {
  Characteristic = 0,  // candidate vector x
  SkillNoise = 1,      // epsilon in y = x'theta + eps
  SignalNoise = 2,     // interview signal eta
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Philox-4x32 block cipher, 10 rounds.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int r = 0; r < 10; ++r) {
    const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
    ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
           std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

inline double to_unit(std::uint64_t bits) {
  // (0,1), never exactly 0 or 1.  With 52 payload bits both the +0.5 and the
  // scaling are exact, so the all-ones input maps to 1 - 2^-53, not 1.0 (the
  // 53-bit variant would round up there).
  return (double(bits >> 12) + 0.5) * 0x1p-52;
}

}  // namespace detail

// Counter-based Gaussian source keyed by (master seed, run index).  Every
// draw is addressed by (round, slot, purpose, index), so draws can be
// generated in any order -- across threads, or lazily -- with identical
// results.
class NormalStream {
 public:
  NormalStream(std::uint64_t master_seed, std::uint32_t run_index) {
    const std::uint64_t k =
        detail::splitmix64(master_seed ^ detail::splitmix64(run_index));
    key_ = {std::uint32_t(k), std::uint32_t(k >> 32)};
  }

  // index enumerates draws within (round, slot, purpose); Box-Muller pairs
  // share a block, so indices 2k and 2k+1 come from one cipher call.
  double normal(std::uint32_t round, std::uint32_t slot, Draw purpose,
                std::uint32_t index) const {
    const auto lanes = detail::philox4x32(
        {round, slot, std::uint32_t(purpose), index >> 1}, key_);
    const double u1 =
        detail::to_unit(std::uint64_t(lanes[0]) | (std::uint64_t(lanes[1]) << 32));
    const double u2 =
        detail::to_unit(std::uint64_t(lanes[2]) | (std::uint64_t(lanes[3]) << 32));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    return (index & 1u) ? r * std::sin(phi) : r * std::cos(phi);
  }

 private:
  std::array<std::uint32_t, 2> key_;
};

}  // namespace hiresim
