#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "kden/image.hpp"

namespace kden {

// One value per graph node.
using GraphSignal = Eigen::VectorXd;

// Largest graph that may be materialized densely.
inline constexpr std::size_t kDenseMaxNodes = 8192;

// Bilateral weight parameters. The spatial term is constant on a 4-connected
// grid, so sigma_s does not enter the weights.
struct WeightParams {
  double sigma_r = 10.0;
  double sigma_s = 1.0;

  void validate() const;
};

struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double w = 0.0;

  bool operator==(const Edge&) const = default;
};

// Weighted undirected graph. Each edge is stored once with i < j, sorted by
// (i, j).
class PixelGraph {
 public:
  PixelGraph() = default;

  // General constructor. Validates indices and weights, canonicalizes the
  // edge orientation and order, and accumulates degrees. Duplicate pairs are
  // rejected.
  static PixelGraph from_edges(std::size_t n_nodes, std::vector<Edge> edges);

  std::size_t num_nodes() const { return degrees_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& degrees() const { return degrees_; }
  bool isolated(std::size_t i) const { return degrees_[i] == 0.0; }

  // sqrt(degree) per node, the nullspace direction of the normalized Laplacian.
  GraphSignal sqrt_degrees() const;

 private:
  std::vector<Edge> edges_;
  std::vector<double> degrees_;
};

// 4-connected graph over the guide image. Pairs touching a hole are skipped;
// w = exp(-(g_i - g_j)^2 / (2 sigma_r^2)).
PixelGraph build_graph(const ImageGray& guide, const HoleMask& mask,
                       const WeightParams& params);

// L = I - D^{-1/2} W D^{-1/2} in compressed-row form. Rows and columns of
// degree-0 nodes are identically zero.
class NormalizedLaplacian {
 public:
  NormalizedLaplacian() = default;
  explicit NormalizedLaplacian(const PixelGraph& graph);

  std::size_t size() const { return diag_.size(); }
  bool isolated(std::size_t i) const { return diag_[i] == 0.0; }

  // y = L x. x and y must not alias.
  void apply(const GraphSignal& x, GraphSignal& y) const;
  GraphSignal apply(const GraphSignal& x) const;

  // Dense copy, only for n <= kDenseMaxNodes.
  Eigen::MatrixXd dense() const;

 private:
  std::vector<double> diag_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;  // magnitudes of the off-diagonal entries
};

GraphSignal apply_laplacian(const NormalizedLaplacian& L, const GraphSignal& x);

// x = D^{1/2} xhat and xhat = D^{-1/2} x; identity on degree-0 nodes.
GraphSignal normalize_signal(const PixelGraph& g, const GraphSignal& xhat);
GraphSignal denormalize_signal(const PixelGraph& g, const GraphSignal& x);

}  // namespace kden
