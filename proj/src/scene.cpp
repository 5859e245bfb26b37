#include "kden/scene.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace kden {

namespace {

constexpr int kForegroundX0 = 80;
constexpr int kForegroundX1 = 176;
constexpr int kForegroundY0 = 64;
constexpr int kForegroundY1 = 192;
constexpr int kBlockSize = 24;
constexpr double kDepthUnits = 16.0;

// Uniform in [0, 1) from the top 53 bits; avoids implementation-defined
// distribution classes.
double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * (1.0 / 9007199254740992.0);
}

class Textures {
 public:
  explicit Textures(std::uint64_t seed) : gen_(seed) {
    for (double& p : phase_) p = 2.0 * std::numbers::pi * uniform01(gen_);
    const int blocks = kSceneSize / kBlockSize + 2;
    levels_.resize(static_cast<std::size_t>(blocks * blocks));
    for (double& v : levels_) v = 50.0 * uniform01(gen_) - 25.0;
    blocks_per_row_ = blocks;
  }

  // Background texture in right-view coordinates; x may be fractional.
  double background(double x, double y) const {
    const int bx = static_cast<int>(std::floor((x + kBlockSize) / kBlockSize));
    const int by = static_cast<int>(std::floor((y + kBlockSize) / kBlockSize));
    const double block = levels_[static_cast<std::size_t>(by * blocks_per_row_ + bx)];
    return 95.0 + block +
           30.0 * std::sin(2.0 * std::numbers::pi * x / 61.0 + phase_[0]) *
               std::sin(2.0 * std::numbers::pi * y / 47.0 + phase_[1]);
  }

  // Foreground texture in right-view coordinates.
  double foreground(double x, double y) const {
    const double cx = 0.5 * (kForegroundX0 + kForegroundX1);
    const double cy = 0.5 * (kForegroundY0 + kForegroundY1);
    const double dist = std::hypot(x - cx, y - cy);
    const double disc = 0.5 * (std::tanh((30.0 - dist) / 1.5) + 1.0);
    return 160.0 + 20.0 * std::cos(2.0 * std::numbers::pi * (x + y) / 29.0 + phase_[2]) +
           40.0 * disc;
  }

 private:
  std::mt19937_64 gen_;
  double phase_[3] = {};
  std::vector<double> levels_;
  int blocks_per_row_ = 0;
};

bool in_foreground(double x, int y) {
  return x >= kForegroundX0 && x < kForegroundX1 && y >= kForegroundY0 && y < kForegroundY1;
}

double to_8bit(double v) { return static_cast<double>(quantize_8bit(v)); }

}  // namespace

StereoScene make_synthetic_scene(std::uint64_t seed) {
  const Textures tex(seed);
  StereoScene scene;
  scene.left = ImageGray(kSceneSize, kSceneSize);
  scene.right = ImageGray(kSceneSize, kSceneSize);
  scene.depth = DepthMap(kSceneSize, kSceneSize);

  for (int y = 0; y < kSceneSize; ++y) {
    for (int x = 0; x < kSceneSize; ++x) {
      const bool fg = in_foreground(x, y);
      scene.right.at(x, y) = to_8bit(fg ? tex.foreground(x, y) : tex.background(x, y));
      scene.depth.values[scene.right.index(x, y)] =
          (fg ? kForegroundDisparity : kBackgroundDisparity) * kDepthUnits;

      // A right-view point at u appears at u + d in the left view; the
      // foreground wins wherever it lands.
      const double fx = x - kForegroundDisparity;
      scene.left.at(x, y) =
          to_8bit(in_foreground(fx, y) ? tex.foreground(fx, y)
                                       : tex.background(x - kBackgroundDisparity, y));
    }
  }
  scene.disparity_scale = 1.0 / kDepthUnits;
  return scene;
}

}  // namespace kden
