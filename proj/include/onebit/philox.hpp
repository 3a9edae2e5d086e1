#pragma once

// Counter-based pseudo-random number generation (Philox4x32-10) with named,
// independently addressable streams.
//
// Monte Carlo reproducibility contract: every random quantity in the library
// is drawn from a stream identified by (seed, stream, purpose). Streams are
// stateless functions of that triple, so a trial's draws do not depend on
// scheduling, worker count, or evaluation order of other trials.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

#include "onebit/common.hpp"

namespace onebit {

/// Philox4x32 with 10 rounds. Maps a 128-bit counter and 64-bit key to four
/// 32-bit words; distinct (counter, key) inputs give independent outputs.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

/// Purpose tags keep draws for different model components statistically
/// independent even when they share a seed and trial index.
namespace purpose {
inline constexpr std::uint32_t kChannel = 1;
inline constexpr std::uint32_t kPilotNoise = 2;
inline constexpr std::uint32_t kDataNoise = 3;
inline constexpr std::uint32_t kDataSymbols = 4;
inline constexpr std::uint32_t kBoundDraw = 5;
inline constexpr std::uint32_t kPilotBook = 6;
inline constexpr std::uint32_t kOracle = 7;
}  // namespace purpose

/// A deterministic random stream addressed by (seed, stream, purpose).
///
/// Uniforms carry 53 bits and lie in (0, 1]; normals use the Box-Muller
/// transform; complex normals are CN(0, 1) (variance 1/2 per real part).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream, std::uint32_t purpose)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        prefix2_(static_cast<std::uint32_t>(stream)),
        prefix3_(static_cast<std::uint32_t>(stream >> 32) ^
                 (purpose * 0x9E3779B9u)) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  /// Uniform in (0, 1] with 53 random bits.
  double u01() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = u01();
    const double u2 = u01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * kPi * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  /// Circularly symmetric complex normal CN(0, 1).
  cxd cnormal() {
    const double re = normal();
    const double im = normal();
    return {re * kInvSqrt2, im * kInvSqrt2};
  }

  /// Fill a matrix with i.i.d. CN(0, 1), column-major element order.
  void fill_cnormal(MatC& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = cnormal();
  }

  void fill_normal(MatR& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = normal();
  }

 private:
  void refill() {
    buf_ = Philox4x32::block({static_cast<std::uint32_t>(block_),
                              static_cast<std::uint32_t>(block_ >> 32),
                              prefix2_, prefix3_},
                             key_);
    ++block_;
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t prefix2_;
  std::uint32_t prefix3_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace onebit
