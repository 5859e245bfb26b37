#pragma once

#include <cstdint>

#include "kden/dibr.hpp"
#include "kden/image.hpp"

namespace kden {

// Procedural rectified stereo pair: a textured background plane at disparity
// 4.0 px and a textured foreground rectangle at 10.5 px. The left view is the
// high-quality source, the right view is the target; depth is given in
// right-view coordinates as stored 16-bit units (disparity * 16).
struct StereoScene {
  ImageGray left;
  ImageGray right;
  DepthMap depth;
  double disparity_scale = 1.0 / 16.0;
};

inline constexpr int kSceneSize = 256;
inline constexpr double kBackgroundDisparity = 4.0;
inline constexpr double kForegroundDisparity = 10.5;

// Deterministic per seed; images hold 8-bit integer values.
StereoScene make_synthetic_scene(std::uint64_t seed);

}  // namespace kden
