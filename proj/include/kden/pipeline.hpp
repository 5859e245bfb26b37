#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kden/filters.hpp"
#include "kden/graph.hpp"
#include "kden/image.hpp"

namespace kden {

// Zero-mean Gaussian noise. Generator: std::mt19937_64 seeded with `seed`,
// Box-Muller on pairs of 53-bit uniforms, samples consumed in row-major order.
struct NoiseSpec {
  double sigma = 10.0;
  std::uint64_t seed = 1;
};

ImageGray add_gaussian_noise(const ImageGray& img, const NoiseSpec& spec);

struct PatchRect {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;

  bool operator==(const PatchRect&) const = default;
};

// Disjoint row-major tiling; edge patches may be smaller.
struct PatchGrid {
  int patch_size = 64;
  int image_width = 0;
  int image_height = 0;
  std::vector<PatchRect> patches;
};

inline constexpr int kMinPatchSize = 8;

PatchGrid split_patches(const ImageGray& img, int patch_size);
std::vector<ImageGray> extract_patches(const ImageGray& img, const PatchGrid& grid);
ImageGray merge_patches(const PatchGrid& grid, std::span<const ImageGray> patches);

// 10 log10(peak^2 / MSE); +inf when the images are identical.
double psnr(const ImageGray& a, const ImageGray& b, double peak = 255.0);

struct DenoiseOptions {
  FilterSpec filter;
  WeightParams weights;
  int patch_size = 64;
  unsigned threads = 1;  // never changes the output
};

struct DenoiseReport {
  DenoiseOptions options;
  std::optional<NoiseSpec> noise;
  std::optional<double> psnr_noisy_db;
  std::optional<double> psnr_denoised_db;
  std::size_t hole_pixels = 0;
  std::size_t patch_count = 0;
  std::size_t early_terminations = 0;
  std::vector<double> patch_seconds;  // wall clock, not serialized to CSV
};

struct DenoiseResult {
  ImageGray image;
  DenoiseReport report;
};

struct PatchOutput {
  ImageGray image;
  bool early_termination = false;
};

// Builds the graph for one patch from the guide/mask restriction and filters
// the noisy patch. No median pass.
PatchOutput denoise_patch(const ImageGray& noisy, const ImageGray& guide, const HoleMask& mask,
                          const PatchRect& rect, const DenoiseOptions& options);

// Patchwise graph filtering followed by the 3x3 median on hole pixels.
DenoiseResult denoise(const ImageGray& noisy, const ImageGray& guide, const HoleMask& mask,
                      const DenoiseOptions& options);

// Fills the PSNR fields against a clean reference.
void score_report(DenoiseReport& report, const ImageGray& clean, const ImageGray& noisy,
                  const ImageGray& denoised);

// `metric,value` rows; deterministic (no timings).
void write_report_csv(std::ostream& os, const DenoiseReport& report);
void write_report_text(std::ostream& os, const DenoiseReport& report);

// Formats a dB value with 2 decimals, or "inf".
std::string format_db(double db);

}  // namespace kden
