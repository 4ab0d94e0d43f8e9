#pragma once
//
// Counter-based random streams (Philox4x32-10).
//
// A stream is identified by (seed, stream tag, substream). The 64-bit seed is
// the Philox key; the counter is (block_lo, block_hi, tag, substream), so
// distinct tags/substreams never share counter space. Each block yields four
// 32-bit words consumed in order.
//
//   uniform()        : ((w0 << 32 | w1) >> 11) + 0.5) * 2^-53, in (0, 1)
//   normal()         : Box-Muller cos branch on two fresh uniforms
//   complex_normal() : both Box-Muller branches scaled by 1/sqrt(2), CN(0, 1)
//

#include <array>
#include <complex>
#include <cstdint>

namespace fplinq::rng {

enum class Stream : std::uint32_t {
  Instance = 1,   // positions, associations, shadowing
  Fading = 2,     // small-scale fading
  Scheduler = 3,  // tie-breaks and randomized choices inside schedulers
};

using Block = std::array<std::uint32_t, 4>;

/// One Philox4x32-10 block for the given counter and key.
Block philox4x32_10(Block counter, std::array<std::uint32_t, 2> key);

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, Stream stream, std::uint32_t substream = 0);

  std::uint32_t next_u32();
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::complex<double> complex_normal();
  /// Uniform integer in [0, n) by rejection.
  std::uint32_t below(std::uint32_t n);

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t block_ = 0;
  std::uint32_t tag_;
  std::uint32_t substream_;
  Block buffer_{};
  int used_ = 4;
};

}  // namespace fplinq::rng
