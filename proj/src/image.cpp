#include "kden/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kden {

namespace {

void check_dims(int w, int h) {
  if (w < 1 || h < 1) {
    throw DimensionError("image dimensions must be positive, got " +
                         std::to_string(w) + "x" + std::to_string(h));
  }
}

void check_crop(int width, int height, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > width || y0 + h > height) {
    throw DimensionError("crop region out of bounds");
  }
}

}  // namespace

ImageGray::ImageGray(int w, int h, double fill) : width(w), height(h) {
  check_dims(w, h);
  samples.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

HoleMask::HoleMask(int w, int h, bool fill) : width(w), height(h) {
  check_dims(w, h);
  flags.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h),
               fill ? 1 : 0);
}

std::size_t HoleMask::count() const {
  return static_cast<std::size_t>(
      std::count_if(flags.begin(), flags.end(), [](std::uint8_t f) { return f != 0; }));
}

void require_same_size(int w0, int h0, int w1, int h1, const std::string& what) {
  if (w0 != w1 || h0 != h1) {
    throw DimensionError(what + ": dimension mismatch (" + std::to_string(w0) + "x" +
                         std::to_string(h0) + " vs " + std::to_string(w1) + "x" +
                         std::to_string(h1) + ")");
  }
}

ImageGray crop(const ImageGray& img, int x0, int y0, int w, int h) {
  check_crop(img.width, img.height, x0, y0, w, h);
  ImageGray out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.at(x, y) = img.at(x0 + x, y0 + y);
  }
  return out;
}

HoleMask crop(const HoleMask& mask, int x0, int y0, int w, int h) {
  check_crop(mask.width, mask.height, x0, y0, w, h);
  HoleMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.set(x, y, mask.hole(x0 + x, y0 + y));
  }
  return out;
}

std::uint8_t quantize_8bit(double v) {
  if (std::isnan(v)) return 0;
  const double r = std::round(v);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

}  // namespace kden
