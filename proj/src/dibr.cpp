#include "kden/dibr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kden {

namespace {

constexpr double kOcclusionRadius = 0.75;
constexpr double kOcclusionDisparityGap = 1.0;

}  // namespace

double interp_subpel(std::span<const double, 8> samples, SubpelPhase phase) {
  if (phase == SubpelPhase::Full) return samples[3];
  const auto& taps = kLumaTaps[static_cast<std::size_t>(phase)];
  double acc = 0.0;
  for (std::size_t t = 0; t < 8; ++t) acc += taps[t] * samples[t];
  return acc / 64.0;
}

DepthMap::DepthMap(int w, int h, double fill) : width(w), height(h) {
  if (w < 1 || h < 1) throw DimensionError("depth map dimensions must be positive");
  values.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

WarpResult warp_guide(const ImageGray& source, const DepthMap& depth, const WarpParams& params) {
  require_same_size(source.width, source.height, depth.width, depth.height, "warp_guide");
  if (!std::isfinite(params.disparity_scale)) {
    throw std::invalid_argument("warp_guide: disparity_scale must be finite");
  }
  const int w = source.width;
  const int h = source.height;
  const double sign = params.direction == WarpDirection::LeftToRight ? 1.0 : -1.0;

  WarpResult out{ImageGray(w, h), HoleMask(w, h), {}};

  std::vector<double> disparity(static_cast<std::size_t>(w));
  std::vector<long long> qpos(static_cast<std::size_t>(w));  // source position in quarter pel
  std::array<double, 8> window{};

  for (int y = 0; y < h; ++y) {
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = -dmin;
    for (int x = 0; x < w; ++x) {
      const double d = params.disparity_scale * depth.at(x, y);
      if (!std::isfinite(d)) throw std::invalid_argument("warp_guide: non-finite disparity");
      disparity[x] = d;
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
      qpos[x] = static_cast<long long>(std::floor((x + sign * d) * 4.0 + 0.5));
    }

    for (int x = 0; x < w; ++x) {
      const long long q = qpos[x];
      if (q < 0 || q > 4LL * (w - 1)) {
        out.mask.set(x, y, true);
        ++out.stats.out_of_range;
        continue;
      }

      // Candidate occluders satisfy |x2 + sign d2 - u'| <= r with d2 > d + gap,
      // which bounds x2 by the row's disparity range.
      const double src = static_cast<double>(q) / 4.0;
      const double lo = sign > 0 ? src - kOcclusionRadius - dmax : src - kOcclusionRadius + dmin;
      const double hi = sign > 0 ? src + kOcclusionRadius - dmin : src + kOcclusionRadius + dmax;
      const int x_lo = std::max(0, static_cast<int>(std::floor(lo)) - 1);
      const int x_hi = std::min(w - 1, static_cast<int>(std::ceil(hi)) + 1);
      bool occluded = false;
      for (int x2 = x_lo; x2 <= x_hi && !occluded; ++x2) {
        if (x2 == x) continue;
        if (disparity[x2] > disparity[x] + kOcclusionDisparityGap &&
            std::abs(static_cast<double>(qpos[x2] - q)) / 4.0 <= kOcclusionRadius) {
          occluded = true;
        }
      }
      if (occluded) {
        out.mask.set(x, y, true);
        ++out.stats.occluded;
        continue;
      }

      const long long ipos = q >= 0 ? q / 4 : -((-q + 3) / 4);
      const auto phase = static_cast<SubpelPhase>(q - 4 * ipos);
      if (phase == SubpelPhase::Full) {
        out.guide.at(x, y) = source.at(static_cast<int>(ipos), y);
        ++out.stats.integer_samples;
      } else {
        for (int t = 0; t < 8; ++t) {
          const long long sx = std::clamp<long long>(ipos - 3 + t, 0, w - 1);
          window[static_cast<std::size_t>(t)] = source.at(static_cast<int>(sx), y);
        }
        out.guide.at(x, y) = interp_subpel(window, phase);
        ++out.stats.fractional_samples;
      }
    }
  }
  return out;
}

ImageGray median_fill(const ImageGray& img, const HoleMask& mask) {
  require_same_size(img.width, img.height, mask.width, mask.height, "median_fill");
  ImageGray out = img;
  std::vector<double> vals;
  vals.reserve(8);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (!mask.hole(x, y)) continue;
      vals.clear();
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= img.width || ny >= img.height) continue;
          if (!mask.hole(nx, ny)) vals.push_back(img.at(nx, ny));
        }
      }
      if (vals.empty()) continue;
      const auto mid = vals.begin() + static_cast<std::ptrdiff_t>((vals.size() - 1) / 2);
      std::nth_element(vals.begin(), mid, vals.end());
      out.at(x, y) = *mid;
    }
  }
  return out;
}

}  // namespace kden
