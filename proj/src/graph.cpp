#include "kden/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kden {

namespace {

void require_dim(std::size_t expected, Eigen::Index got, const char* what) {
  if (static_cast<std::size_t>(got) != expected) {
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(expected) + ", got " + std::to_string(got));
  }
}

}  // namespace

void WeightParams::validate() const {
  if (!(sigma_r > 0.0) || !std::isfinite(sigma_r)) {
    throw std::invalid_argument("sigma_r must be a positive finite number");
  }
  if (!(sigma_s > 0.0) || !std::isfinite(sigma_s)) {
    throw std::invalid_argument("sigma_s must be a positive finite number");
  }
}

PixelGraph PixelGraph::from_edges(std::size_t n_nodes, std::vector<Edge> edges) {
  for (auto& e : edges) {
    if (e.i >= n_nodes || e.j >= n_nodes || e.i == e.j) {
      throw std::invalid_argument("edge endpoints out of range or self loop");
    }
    if (!(e.w >= 0.0) || !std::isfinite(e.w)) {
      throw std::invalid_argument("edge weights must be finite and nonnegative");
    }
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j) {
      throw std::invalid_argument("duplicate edge");
    }
  }

  PixelGraph g;
  g.degrees_.assign(n_nodes, 0.0);
  for (const auto& e : edges) {
    g.degrees_[e.i] += e.w;
    g.degrees_[e.j] += e.w;
  }
  g.edges_ = std::move(edges);
  return g;
}

GraphSignal PixelGraph::sqrt_degrees() const {
  GraphSignal v(static_cast<Eigen::Index>(degrees_.size()));
  for (std::size_t i = 0; i < degrees_.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = std::sqrt(degrees_[i]);
  }
  return v;
}

PixelGraph build_graph(const ImageGray& guide, const HoleMask& mask,
                       const WeightParams& params) {
  require_same_size(guide.width, guide.height, mask.width, mask.height, "build_graph");
  params.validate();

  const double inv_two_var = 1.0 / (2.0 * params.sigma_r * params.sigma_r);
  auto weight = [&](std::size_t a, std::size_t b) {
    const double d = guide.samples[a] - guide.samples[b];
    return std::exp(-d * d * inv_two_var);
  };

  // Row-major scan emitting (i, right) before (i, below) yields sorted (i, j).
  std::vector<Edge> edges;
  edges.reserve(2 * guide.size());
  for (int y = 0; y < guide.height; ++y) {
    for (int x = 0; x < guide.width; ++x) {
      if (mask.hole(x, y)) continue;
      const std::size_t i = guide.index(x, y);
      if (x + 1 < guide.width && !mask.hole(x + 1, y)) {
        edges.push_back({i, i + 1, weight(i, i + 1)});
      }
      if (y + 1 < guide.height && !mask.hole(x, y + 1)) {
        const std::size_t j = guide.index(x, y + 1);
        edges.push_back({i, j, weight(i, j)});
      }
    }
  }
  return PixelGraph::from_edges(guide.size(), std::move(edges));
}

NormalizedLaplacian::NormalizedLaplacian(const PixelGraph& graph) {
  const std::size_t n = graph.num_nodes();
  const auto& deg = graph.degrees();

  std::vector<double> inv_sqrt(n, 0.0);
  diag_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (deg[i] > 0.0) {
      inv_sqrt[i] = 1.0 / std::sqrt(deg[i]);
      diag_[i] = 1.0;
    }
  }

  std::vector<std::size_t> count(n, 0);
  for (const auto& e : graph.edges()) {
    if (e.w == 0.0) continue;
    ++count[e.i];
    ++count[e.j];
  }
  row_ptr_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) row_ptr_[i + 1] = row_ptr_[i] + count[i];
  cols_.resize(row_ptr_[n]);
  vals_.resize(row_ptr_[n]);

  // Both mirrored entries receive the identical product so L is exactly
  // symmetric. Edges are sorted by (i, j), so every row fills in column order.
  std::vector<std::size_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
  for (const auto& e : graph.edges()) {
    if (e.w == 0.0) continue;
    const double a = e.w * (inv_sqrt[e.i] * inv_sqrt[e.j]);
    cols_[fill[e.i]] = e.j;
    vals_[fill[e.i]++] = a;
    cols_[fill[e.j]] = e.i;
    vals_[fill[e.j]++] = a;
  }
}

void NormalizedLaplacian::apply(const GraphSignal& x, GraphSignal& y) const {
  require_dim(size(), x.size(), "apply_laplacian");
  y.resize(x.size());
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      off += vals_[k] * x[static_cast<Eigen::Index>(cols_[k])];
    }
    const auto ii = static_cast<Eigen::Index>(i);
    y[ii] = diag_[i] * x[ii] - off;
  }
}

GraphSignal NormalizedLaplacian::apply(const GraphSignal& x) const {
  GraphSignal y;
  apply(x, y);
  return y;
}

Eigen::MatrixXd NormalizedLaplacian::dense() const {
  const std::size_t n = size();
  if (n > kDenseMaxNodes) {
    throw DimensionError("dense Laplacian limited to " + std::to_string(kDenseMaxNodes) +
                         " nodes, got " + std::to_string(n));
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    m(ii, ii) = diag_[i];
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      m(ii, static_cast<Eigen::Index>(cols_[k])) = -vals_[k];
    }
  }
  return m;
}

GraphSignal apply_laplacian(const NormalizedLaplacian& L, const GraphSignal& x) {
  return L.apply(x);
}

GraphSignal normalize_signal(const PixelGraph& g, const GraphSignal& xhat) {
  require_dim(g.num_nodes(), xhat.size(), "normalize_signal");
  GraphSignal x = xhat;
  const auto& deg = g.degrees();
  for (std::size_t i = 0; i < deg.size(); ++i) {
    if (deg[i] > 0.0) x[static_cast<Eigen::Index>(i)] *= std::sqrt(deg[i]);
  }
  return x;
}

GraphSignal denormalize_signal(const PixelGraph& g, const GraphSignal& x) {
  require_dim(g.num_nodes(), x.size(), "denormalize_signal");
  GraphSignal xhat = x;
  const auto& deg = g.degrees();
  for (std::size_t i = 0; i < deg.size(); ++i) {
    if (deg[i] > 0.0) xhat[static_cast<Eigen::Index>(i)] /= std::sqrt(deg[i]);
  }
  return xhat;
}

}  // namespace kden
