#pragma once

// Counter-based random numbers (Philox-4x32-10). Every draw is a pure
// function of (key, counter), so a stream can be addressed by
// (seed, sample index, stream id, position) without any shared state.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace schwinger {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

constexpr Philox4x32Counter philox4x32(Philox4x32Counter ctr, Philox4x32Key key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// Uniform double in (0, 1) from the top 52 of 64 random bits; never 0 or 1.
constexpr double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Random numbers addressed by (seed, sample, stream). Position `i` within the
/// stream yields two uniforms or, via Box-Muller, two standard normals.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t sample, std::uint32_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        sample_(sample),
        stream_(stream) {}

  constexpr std::array<double, 2> uniform_pair(std::uint32_t position) const {
    const auto r = philox4x32({static_cast<std::uint32_t>(sample_), static_cast<std::uint32_t>(sample_ >> 32),
                               stream_, position},
                              key_);
    return {to_unit_open((std::uint64_t{r[0]} << 32) | r[1]), to_unit_open((std::uint64_t{r[2]} << 32) | r[3])};
  }

  std::array<double, 2> normal_pair(std::uint32_t position) const {
    const auto [u1, u2] = uniform_pair(position);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  Philox4x32Key key_;
  std::uint64_t sample_;
  std::uint32_t stream_;
};

/// Sequential convenience wrapper for generating seeded fixtures.
class SequentialRng {
 public:
  SequentialRng(std::uint64_t seed, std::uint32_t stream) : rng_(seed, 0, stream) {}
  double uniform() {
    if (!have_) {
      pending_ = rng_.uniform_pair(position_++);
      have_ = 2;
    }
    return pending_[2 - have_--];
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  CounterRng rng_;
  std::uint32_t position_ = 0;
  std::array<double, 2> pending_{};
  int have_ = 0;
};

}  // namespace schwinger
