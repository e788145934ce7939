#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace sace {

/// Philox4x64-10 counter-based block cipher (Random123 constants, same
/// convention as numpy's Philox bit generator). Pure function of
/// (counter, key); no state.
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key);

/// Draw-purpose tags keep distinct sampling contexts on disjoint counters.
enum class DrawTag : std::uint64_t {
  convolution_increment = 0,
  stationary_sample = 1,
  generic = 2,
};

/// A reproducible Gaussian stream keyed by (master_seed, stream_id).
/// Draws are pure functions of (seed, stream, tag, index, slot): the same
/// key always yields bit-identical values, independent of call order or
/// thread schedule. One stream per Monte Carlo sample.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed), stream_id_(stream_id) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  RngStream substream(std::uint64_t stream_id) const {
    return RngStream(master_seed_, stream_id);
  }

  /// Fill out with independent standard normals. out[i] depends only on
  /// (seed, stream, tag, index, i); a block of four normals comes from one
  /// Philox call, so prefixes are consistent across different lengths.
  void fill_gaussians(DrawTag tag, std::uint64_t index, std::span<double> out) const;

  /// Single uniform in [0,1) addressed by (tag, index, slot in 0..3).
  double uniform(DrawTag tag, std::uint64_t index, int slot) const;

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
};

}  // namespace sace
