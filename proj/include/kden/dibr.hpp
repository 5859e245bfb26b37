#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "kden/image.hpp"

namespace kden {

// Quarter-pel phases of the HEVC luma grid.
enum class SubpelPhase { Full = 0, Quarter = 1, Half = 2, ThreeQuarter = 3 };

// HEVC luma interpolation taps, applied to samples at offsets -3..+4 around
// the integer position. Each row sums to 64.
inline constexpr std::array<std::array<int, 8>, 4> kLumaTaps = {{
    {0, 0, 0, 64, 0, 0, 0, 0},
    {-1, 4, -10, 58, 17, -5, 1, 0},
    {-1, 4, -11, 40, 40, -11, 4, -1},
    {0, 1, -5, 17, 58, -10, 4, -1},
}};

// Interpolated value between samples[3] and samples[4]. No clipping.
double interp_subpel(std::span<const double, 8> samples, SubpelPhase phase);

// Per-pixel horizontal disparity in target-view coordinates, in stored units;
// WarpParams::disparity_scale converts to pixels.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  DepthMap() = default;
  DepthMap(int w, int h, double fill = 0.0);

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

// LeftToRight: the source is the left view and the target the right view,
// u' = u + s d. RightToLeft: u' = u - s d.
enum class WarpDirection { LeftToRight, RightToLeft };

struct WarpParams {
  double disparity_scale = 1.0;
  WarpDirection direction = WarpDirection::LeftToRight;
};

// Instrumentation counters.
struct WarpStats {
  std::size_t integer_samples = 0;
  std::size_t fractional_samples = 0;
  std::size_t out_of_range = 0;
  std::size_t occluded = 0;
};

struct WarpResult {
  ImageGray guide;
  HoleMask mask;
  WarpStats stats;
};

// Backward warp of `source` into the target view. Source positions are
// quantized to quarter pel; positions outside [0, width-1] and occluded
// pixels become holes (guide value 0).
//
// Occlusion: pixel u is occluded when another pixel in the same row, with a
// disparity larger by more than 1 px, maps within 0.75 px of the same source
// position.
WarpResult warp_guide(const ImageGray& source, const DepthMap& depth, const WarpParams& params);

// Replaces each hole with the median of its non-hole 3x3 neighbours in `img`
// (lower middle for even counts). Holes without such neighbours keep their
// value; non-holes are untouched.
ImageGray median_fill(const ImageGray& img, const HoleMask& mask);

}  // namespace kden
