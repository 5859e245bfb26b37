#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kden {

// Error categories. The CLI maps these onto exit codes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grayscale image with real-valued samples, row-major. Nominal range is
// [0, 255]; values are not clamped until written to an 8-bit file.
struct ImageGray {
  int width = 0;
  int height = 0;
  std::vector<double> samples;

  ImageGray() = default;
  ImageGray(int w, int h, double fill = 0.0);

  std::size_t size() const { return samples.size(); }
  double& at(int x, int y) { return samples[index(x, y)]; }
  double at(int x, int y) const { return samples[index(x, y)]; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }

  bool operator==(const ImageGray&) const = default;
};

// One flag per pixel; nonzero marks a hole.
struct HoleMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> flags;

  HoleMask() = default;
  HoleMask(int w, int h, bool fill = false);

  std::size_t size() const { return flags.size(); }
  bool hole(int x, int y) const {
    return flags[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(x)] != 0;
  }
  void set(int x, int y, bool value) {
    flags[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
          static_cast<std::size_t>(x)] = value ? 1 : 0;
  }
  std::size_t count() const;

  bool operator==(const HoleMask&) const = default;
};

// Throws DimensionError with `what` as context unless sizes agree.
void require_same_size(int w0, int h0, int w1, int h1, const std::string& what);

ImageGray crop(const ImageGray& img, int x0, int y0, int w, int h);
HoleMask crop(const HoleMask& mask, int x0, int y0, int w, int h);

// Round half away from zero, then clamp to [0, 255].
std::uint8_t quantize_8bit(double v);

}  // namespace kden
