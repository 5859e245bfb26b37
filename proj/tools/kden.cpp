// kden: command-line front end for graph-guided stereo denoising.
//
//   kden synth --out DIR [--seed N]
//   kden warp --source left.pgm --depth depth.pgm --scale S --out DIR
//   kden denoise (--noisy F | --clean F --sigma S --seed N) --guide F --mask F
//                [--filter cg] [--k 3] [--l 0.5] [--rho 2] [--sigma-r 10]
//                [--patch 64] [--threads N] --out DIR
//   kden psnr A.pgm B.pgm
//   kden spectral-response --guide F --mask F --input F [filter flags] --out F.csv
//
// Exit codes: 0 ok, 2 usage, 3 I/O, 4 numeric failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kden/dibr.hpp"
#include "kden/filters.hpp"
#include "kden/graph.hpp"
#include "kden/io.hpp"
#include "kden/pipeline.hpp"
#include "kden/scene.hpp"
#include "kden/spectral.hpp"

namespace fs = std::filesystem;
using namespace kden;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;
constexpr int kMaxResponseSide = 32;

struct FilterFlags {
  std::string filter = "cg";
  int k = 3;
  double l = 0.5;
  double rho = 2.0;
  double sigma_r = 10.0;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--filter", filter, "jbf, gbjbf, poly, cheb, cg or cg0")
        ->check(CLI::IsMember({"jbf", "gbjbf", "poly", "cheb", "cg", "cg0"}))
        ->capture_default_str();
    cmd.add_option("--k", k, "degree / iterations")->check(CLI::Range(1, 1000))->capture_default_str();
    cmd.add_option("--l", l, "k-CHEB stop-band start in (0,2)")->capture_default_str();
    cmd.add_option("--rho", rho, "GBJBF / k-POLY regularization")->capture_default_str();
    cmd.add_option("--sigma-r", sigma_r, "intensity kernel width")->capture_default_str();
  }

  FilterSpec spec() const {
    FilterSpec s;
    s.kind = *parse_filter_kind(filter);
    s.k = k;
    s.l = l;
    s.rho = rho;
    s.validate();
    return s;
  }

  WeightParams weights() const {
    WeightParams w;
    w.sigma_r = sigma_r;
    w.validate();
    return w;
  }
};

std::string format_meta(double scale, std::uint64_t seed) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << "disparity_scale=" << scale << "\n"
     << "direction=left_to_right\n"
     << "seed=" << seed << "\n";
  return os.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

int run_synth(const fs::path& out, std::uint64_t seed) {
  ensure_dir(out);
  const StereoScene scene = make_synthetic_scene(seed);
  AtomicWriter w;
  w.stage(out / "left.pgm", encode_pgm8(scene.left));
  w.stage(out / "right.pgm", encode_pgm8(scene.right));
  ImageGray depth(scene.depth.width, scene.depth.height);
  depth.samples = scene.depth.values;
  w.stage(out / "depth.pgm", encode_pgm16(depth));
  w.stage(out / "scene.meta", format_meta(scene.disparity_scale, seed));
  w.commit();
  std::cout << "wrote left.pgm right.pgm depth.pgm scene.meta to " << out.string() << "\n";
  return 0;
}

int run_warp(const fs::path& source_path, const fs::path& depth_path, double scale,
             const std::string& direction, const fs::path& out) {
  const PgmData source = read_pgm(source_path);
  const PgmData depth_img = read_pgm(depth_path);
  DepthMap depth(depth_img.image.width, depth_img.image.height);
  depth.values = depth_img.image.samples;

  WarpParams params;
  params.disparity_scale = scale;
  params.direction = direction == "r2l" ? WarpDirection::RightToLeft : WarpDirection::LeftToRight;
  const WarpResult res = warp_guide(source.image, depth, params);

  ensure_dir(out);
  AtomicWriter w;
  w.stage(out / "guide.pgm", encode_pgm8(res.guide));
  w.stage(out / "mask.pbm", encode_pbm(res.mask));
  w.commit();
  std::cout << "holes: " << res.mask.count() << " (out of range " << res.stats.out_of_range
            << ", occluded " << res.stats.occluded << ")\n";
  return 0;
}

struct DenoiseArgs {
  std::string noisy, clean, reference, guide, mask, out;
  double sigma = 10.0;
  std::uint64_t seed = 1;
  int patch = 64;
  unsigned threads = 1;
  FilterFlags flags;
};

int run_denoise(const DenoiseArgs& a) {
  if (a.noisy.empty() == a.clean.empty()) {
    throw std::invalid_argument("exactly one of --noisy or --clean is required");
  }
  DenoiseOptions opt;
  opt.filter = a.flags.spec();
  opt.weights = a.flags.weights();
  opt.patch_size = a.patch;
  opt.threads = a.threads;

  const ImageGray guide = read_pgm(a.guide).image;
  const HoleMask mask = read_pbm(a.mask);

  std::optional<ImageGray> clean;
  std::optional<NoiseSpec> noise;
  ImageGray noisy;
  if (!a.clean.empty()) {
    clean = read_pgm(a.clean).image;
    noise = NoiseSpec{a.sigma, a.seed};
    noisy = add_gaussian_noise(*clean, *noise);
  } else {
    noisy = read_pgm(a.noisy).image;
    if (!a.reference.empty()) clean = read_pgm(a.reference).image;
  }

  const auto t0 = std::chrono::steady_clock::now();
  DenoiseResult res = denoise(noisy, guide, mask, opt);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.report.noise = noise;
  if (clean) score_report(res.report, *clean, noisy, res.image);

  std::ostringstream csv, text;
  write_report_csv(csv, res.report);
  write_report_text(text, res.report);

  const fs::path out(a.out);
  ensure_dir(out);
  AtomicWriter w;
  w.stage(out / "denoised.pgm", encode_pgm8(res.image));
  if (noise) w.stage(out / "noisy.pgm", encode_pgm8(noisy));
  w.stage(out / "report.csv", csv.str());
  w.stage(out / "report.txt", text.str());
  w.commit();

  std::cout << text.str();
  std::cerr << "filtering time: " << std::fixed << std::setprecision(3) << seconds << " s\n";
  return 0;
}

int run_psnr(const fs::path& a, const fs::path& b) {
  std::cout << format_db(psnr(read_pgm(a).image, read_pgm(b).image)) << "\n";
  return 0;
}

struct ResponseArgs {
  std::string guide, mask, input, out;
  int x0 = 0, y0 = 0, width = 0, height = 0;
  FilterFlags flags;
};

int run_response(const ResponseArgs& a) {
  const FilterSpec spec = a.flags.spec();
  const WeightParams weights = a.flags.weights();
  const ImageGray guide_full = read_pgm(a.guide).image;
  const HoleMask mask_full = read_pbm(a.mask);
  const ImageGray input_full = read_pgm(a.input).image;
  require_same_size(guide_full.width, guide_full.height, mask_full.width, mask_full.height, "mask");
  require_same_size(guide_full.width, guide_full.height, input_full.width, input_full.height, "input");

  const int w = a.width > 0 ? a.width : guide_full.width - a.x0;
  const int h = a.height > 0 ? a.height : guide_full.height - a.y0;
  if (w > kMaxResponseSide || h > kMaxResponseSide) {
    throw std::invalid_argument("spectral-response region must be at most 32x32, got " +
                                std::to_string(w) + "x" + std::to_string(h));
  }
  const ImageGray guide = crop(guide_full, a.x0, a.y0, w, h);
  const HoleMask mask = crop(mask_full, a.x0, a.y0, w, h);
  const ImageGray input = crop(input_full, a.x0, a.y0, w, h);

  const PixelGraph graph = build_graph(guide, mask, weights);
  const NormalizedLaplacian lap(graph);
  const EigenDecomposition eig = dense_eig(lap);
  GraphSignal b = normalize_signal(
      graph, Eigen::Map<const GraphSignal>(input.samples.data(), static_cast<Eigen::Index>(input.size())));
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (graph.isolated(static_cast<std::size_t>(i))) b[i] = 0.0;
  }
  const SpectralResponse resp = measure_response(normalized_filter(spec, lap), eig, b);

  std::ostringstream csv;
  write_response_csv(csv, resp);
  AtomicWriter wr;
  wr.stage(a.out, csv.str());
  wr.commit();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph spectral denoising of a noisy stereo view guided by a warped high-quality view"};
  app.require_subcommand(1);

  std::string synth_out;
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand("synth", "Write the procedural stereo test scene");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", synth_seed, "scene seed")->capture_default_str();

  std::string warp_source, warp_depth, warp_out, warp_dir = "l2r";
  double warp_scale = 1.0;
  auto* warp = app.add_subcommand("warp", "Warp the high-quality view into the target view");
  warp->add_option("--source", warp_source, "high-quality view (PGM)")->required();
  warp->add_option("--depth", warp_depth, "target-view disparity map (16-bit PGM)")->required();
  warp->add_option("--scale", warp_scale, "disparity units to pixels")->capture_default_str();
  warp->add_option("--direction", warp_dir, "l2r or r2l")
      ->check(CLI::IsMember({"l2r", "r2l"}))
      ->capture_default_str();
  warp->add_option("--out", warp_out, "output directory")->required();

  DenoiseArgs dn;
  auto* den = app.add_subcommand("denoise", "Denoise the target view");
  den->add_option("--noisy", dn.noisy, "noisy input (PGM)");
  den->add_option("--clean", dn.clean, "clean input; noise is synthesized from --sigma/--seed");
  den->add_option("--reference", dn.reference, "clean reference for PSNR when --noisy is given");
  den->add_option("--sigma", dn.sigma, "noise standard deviation")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  den->add_option("--seed", dn.seed, "noise seed")->capture_default_str();
  den->add_option("--guide", dn.guide, "warped guide (PGM)")->required();
  den->add_option("--mask", dn.mask, "hole mask (PBM)")->required();
  den->add_option("--patch", dn.patch, "patch size")->check(CLI::Range(kMinPatchSize, 4096))->capture_default_str();
  den->add_option("--threads", dn.threads, "worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();
  den->add_option("--out", dn.out, "output directory")->required();
  dn.flags.add_to(*den);

  std::string psnr_a, psnr_b;
  auto* ps = app.add_subcommand("psnr", "PSNR between two images (dB, 2 decimals)");
  ps->add_option("a", psnr_a)->required();
  ps->add_option("b", psnr_b)->required();

  ResponseArgs rs;
  auto* resp = app.add_subcommand("spectral-response", "Measured spectral response of a filter on one patch");
  resp->add_option("--guide", rs.guide, "guide (PGM)")->required();
  resp->add_option("--mask", rs.mask, "hole mask (PBM)")->required();
  resp->add_option("--input", rs.input, "input signal image (PGM)")->required();
  resp->add_option("--x0", rs.x0, "region left")->check(CLI::NonNegativeNumber);
  resp->add_option("--y0", rs.y0, "region top")->check(CLI::NonNegativeNumber);
  resp->add_option("--width", rs.width, "region width (default: to image edge)")->check(CLI::PositiveNumber);
  resp->add_option("--height", rs.height, "region height (default: to image edge)")->check(CLI::PositiveNumber);
  resp->add_option("--out", rs.out, "output CSV")->required();
  rs.flags.add_to(*resp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*synth) return run_synth(synth_out, synth_seed);
    if (*warp) return run_warp(warp_source, warp_depth, warp_scale, warp_dir, warp_out);
    if (*den) return run_denoise(dn);
    if (*ps) return run_psnr(psnr_a, psnr_b);
    if (*resp) return run_response(rs);
  } catch (const NumericError& e) {
    std::cerr << "kden: numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const IoError& e) {
    std::cerr << "kden: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "kden: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "kden: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
