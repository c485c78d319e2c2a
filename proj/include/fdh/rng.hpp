#pragma once

// Counter-based normal variates. Every draw is a pure function of
// (seed, stream, path, step, mode), so trajectories do not depend on how
// paths are scheduled across threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fdh {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept {
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
};

/// Independent stream families sharing one seed.
enum class Stream : std::uint32_t {
  Dynamics = 0,
  ConditionSampling = 1,
};

class NormalSource {
 public:
  NormalSource(std::uint64_t seed, std::uint64_t path_index, Stream stream = Stream::Dynamics) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_lo_(static_cast<std::uint32_t>(path_index)),
        tag_((static_cast<std::uint32_t>(stream) << 24) ^ static_cast<std::uint32_t>(path_index >> 32)) {}

  /// Raw 128 random bits for (step, block).
  Philox4x32::Counter raw(std::uint64_t step, std::uint32_t block) const noexcept {
    return Philox4x32::generate(
        {static_cast<std::uint32_t>(step), block ^ (static_cast<std::uint32_t>(step >> 32) << 16), path_lo_, tag_},
        key_);
  }

  /// Two standard normals for (step, pair); pair k covers modes 2k and 2k+1.
  std::array<double, 2> pair(std::uint64_t step, std::uint32_t pair_index) const noexcept {
    const auto out = raw(step, pair_index);
    const std::uint64_t a = (std::uint64_t{out[0]} << 32) | out[1];
    const std::uint64_t b = (std::uint64_t{out[2]} << 32) | out[3];
    // u1 in (0, 1], u2 in [0, 1).
    const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  /// Fills out[0..n) with standard normals for `step`.
  template <typename Out>
  void fill(std::uint64_t step, Out& out) const noexcept {
    const auto n = static_cast<std::uint32_t>(out.size());
    for (std::uint32_t k = 0; 2 * k < n; ++k) {
      const auto z = pair(step, k);
      out[2 * k] = z[0];
      if (2 * k + 1 < n) out[2 * k + 1] = z[1];
    }
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t path_lo_;
  std::uint32_t tag_;
};

}  // namespace fdh
