#include "kden/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "kden/dibr.hpp"

namespace kden {

ImageGray add_gaussian_noise(const ImageGray& img, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw std::invalid_argument("noise sigma must be finite and nonnegative");
  }
  ImageGray out = img;
  if (spec.sigma == 0.0) return out;

  std::mt19937_64 gen(spec.seed);
  constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; i += 2) {
    const double u1 = (static_cast<double>(gen() >> 11) + 1.0) * kInv53;  // (0, 1]
    const double u2 = static_cast<double>(gen() >> 11) * kInv53;          // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out.samples[i] += spec.sigma * radius * std::cos(angle);
    if (i + 1 < n) out.samples[i + 1] += spec.sigma * radius * std::sin(angle);
  }
  return out;
}

PatchGrid split_patches(const ImageGray& img, int patch_size) {
  if (patch_size < kMinPatchSize) {
    throw std::invalid_argument("patch size must be at least " + std::to_string(kMinPatchSize));
  }
  PatchGrid grid;
  grid.patch_size = patch_size;
  grid.image_width = img.width;
  grid.image_height = img.height;
  for (int y0 = 0; y0 < img.height; y0 += patch_size) {
    for (int x0 = 0; x0 < img.width; x0 += patch_size) {
      grid.patches.push_back({x0, y0, std::min(patch_size, img.width - x0),
                              std::min(patch_size, img.height - y0)});
    }
  }
  return grid;
}

std::vector<ImageGray> extract_patches(const ImageGray& img, const PatchGrid& grid) {
  require_same_size(img.width, img.height, grid.image_width, grid.image_height, "extract_patches");
  std::vector<ImageGray> out;
  out.reserve(grid.patches.size());
  for (const auto& p : grid.patches) out.push_back(crop(img, p.x0, p.y0, p.width, p.height));
  return out;
}

ImageGray merge_patches(const PatchGrid& grid, std::span<const ImageGray> patches) {
  if (patches.size() != grid.patches.size()) {
    throw DimensionError("merge_patches: patch count does not match grid");
  }
  ImageGray out(grid.image_width, grid.image_height);
  for (std::size_t k = 0; k < patches.size(); ++k) {
    const auto& r = grid.patches[k];
    require_same_size(patches[k].width, patches[k].height, r.width, r.height, "merge_patches");
    for (int y = 0; y < r.height; ++y) {
      for (int x = 0; x < r.width; ++x) out.at(r.x0 + x, r.y0 + y) = patches[k].at(x, y);
    }
  }
  return out;
}

double psnr(const ImageGray& a, const ImageGray& b, double peak) {
  require_same_size(a.width, a.height, b.width, b.height, "psnr");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.samples[i] - b.samples[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

PatchOutput denoise_patch(const ImageGray& noisy, const ImageGray& guide, const HoleMask& mask,
                          const PatchRect& rect, const DenoiseOptions& options) {
  const ImageGray g = crop(guide, rect.x0, rect.y0, rect.width, rect.height);
  const HoleMask m = crop(mask, rect.x0, rect.y0, rect.width, rect.height);
  const ImageGray in = crop(noisy, rect.x0, rect.y0, rect.width, rect.height);

  const PixelGraph graph = build_graph(g, m, options.weights);
  const NormalizedLaplacian lap(graph);
  const GraphSignal b = Eigen::Map<const GraphSignal>(in.samples.data(),
                                                      static_cast<Eigen::Index>(in.size()));
  FilterResult res = apply_filter(options.filter, lap, graph, b);

  PatchOutput out{ImageGray(rect.width, rect.height), res.early_termination};
  for (std::size_t i = 0; i < out.image.size(); ++i) {
    out.image.samples[i] = res.signal[static_cast<Eigen::Index>(i)];
  }
  return out;
}

DenoiseResult denoise(const ImageGray& noisy, const ImageGray& guide, const HoleMask& mask,
                      const DenoiseOptions& options) {
  require_same_size(noisy.width, noisy.height, guide.width, guide.height, "denoise (guide)");
  require_same_size(noisy.width, noisy.height, mask.width, mask.height, "denoise (mask)");
  options.filter.validate();
  options.weights.validate();

  const PatchGrid grid = split_patches(noisy, options.patch_size);
  const std::size_t n = grid.patches.size();
  std::vector<ImageGray> filtered(n);
  std::vector<std::uint8_t> early(n, 0);
  std::vector<double> seconds(n, 0.0);

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        const auto t0 = std::chrono::steady_clock::now();
        PatchOutput po = denoise_patch(noisy, guide, mask, grid.patches[k], options);
        seconds[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        filtered[k] = std::move(po.image);
        early[k] = po.early_termination ? 1 : 0;
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  DenoiseResult result;
  result.image = median_fill(merge_patches(grid, filtered), mask);
  auto& rep = result.report;
  rep.options = options;
  rep.hole_pixels = mask.count();
  rep.patch_count = n;
  for (auto e : early) rep.early_terminations += e;
  rep.patch_seconds = std::move(seconds);
  return result;
}

void score_report(DenoiseReport& report, const ImageGray& clean, const ImageGray& noisy,
                  const ImageGray& denoised) {
  report.psnr_noisy_db = psnr(clean, noisy);
  report.psnr_denoised_db = psnr(clean, denoised);
}

std::string format_db(double db) {
  if (std::isinf(db)) return db > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::fixed << std::setprecision(2) << db;
  return os.str();
}

namespace {

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void write_report_csv(std::ostream& os, const DenoiseReport& r) {
  std::ostringstream b;
  b.imbue(std::locale::classic());
  const auto& f = r.options.filter;
  b << "metric,value\n";
  b << "filter," << to_string(f.kind) << '\n';
  b << "k," << f.k << '\n';
  b << "l," << format_real(f.l) << '\n';
  b << "rho," << format_real(f.rho) << '\n';
  b << "sigma_r," << format_real(r.options.weights.sigma_r) << '\n';
  b << "sigma_s," << format_real(r.options.weights.sigma_s) << '\n';
  b << "patch_size," << r.options.patch_size << '\n';
  if (r.noise) {
    b << "noise_sigma," << format_real(r.noise->sigma) << '\n';
    b << "noise_seed," << r.noise->seed << '\n';
  }
  b << "patches," << r.patch_count << '\n';
  b << "hole_pixels," << r.hole_pixels << '\n';
  b << "cg_early_terminations," << r.early_terminations << '\n';
  if (r.psnr_noisy_db) b << "psnr_noisy_db," << format_real(*r.psnr_noisy_db) << '\n';
  if (r.psnr_denoised_db) b << "psnr_denoised_db," << format_real(*r.psnr_denoised_db) << '\n';
  os << b.str();
}

void write_report_text(std::ostream& os, const DenoiseReport& r) {
  const auto& f = r.options.filter;
  os << "filter:          " << to_string(f.kind) << " (k=" << f.k << ", l=" << f.l
     << ", rho=" << f.rho << ")\n";
  os << "weights:         sigma_r=" << r.options.weights.sigma_r << '\n';
  os << "patches:         " << r.patch_count << " of " << r.options.patch_size << "x"
     << r.options.patch_size << '\n';
  if (r.noise) os << "noise:           sigma=" << r.noise->sigma << " seed=" << r.noise->seed << '\n';
  os << "hole pixels:     " << r.hole_pixels << '\n';
  os << "cg early stops:  " << r.early_terminations << '\n';
  if (r.psnr_noisy_db) os << "PSNR noisy:      " << format_db(*r.psnr_noisy_db) << " dB\n";
  if (r.psnr_denoised_db) os << "PSNR denoised:   " << format_db(*r.psnr_denoised_db) << " dB\n";
}

}  // namespace kden
