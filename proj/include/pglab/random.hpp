#pragma once

#include <cstdint>
#include <string_view>

namespace pglab {

/// Seeded pseudo-random stream used by every simulator in the library.
///
/// Algorithm (stream format "pglab-xoshiro256pp-v1"): the 64-bit seed and a
/// purpose tag are mixed with SplitMix64 to fill the 256-bit state of
/// xoshiro256++. Uniforms take the top 53 bits of each output. Gaussians use
/// the Box-Muller transform, producing values in pairs; the second value of a
/// pair is served by the next gaussian() call. All arithmetic is specified
/// exactly, so streams are identical across platforms up to libm rounding of
/// log/sqrt/sin/cos.
class RandomStream {
 public:
  static constexpr std::string_view kAlgorithm = "pglab-xoshiro256pp-v1";

  explicit RandomStream(std::uint64_t seed, std::uint64_t purpose = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_pos();
  double gaussian();

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Purpose tags that keep independent sub-streams for the same seed apart.
namespace stream_tag {
inline constexpr std::uint64_t kDiscrete = 0x6469736372657465ULL;
inline constexpr std::uint64_t kContinuous = 0x636f6e74696e7573ULL;
inline constexpr std::uint64_t kScalarSde = 0x7363616c61727364ULL;
inline constexpr std::uint64_t kVerify = 0x7665726966790000ULL;
}  // namespace stream_tag

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace pglab
