#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "kden/graph.hpp"

namespace kden {

// Dense spectral reference for small graphs. Everything here is O(n^3) and
// exists to check the vertex-domain filters.

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, first nonzero entry positive

  Eigen::Index size() const { return eigenvalues.size(); }
};

// Throws DimensionError above kDenseMaxNodes, NumericError if the solver does
// not converge.
EigenDecomposition dense_eig(const NormalizedLaplacian& L);

// U h(Lambda) U^T b.
GraphSignal exact_filter(const EigenDecomposition& eig,
                         const std::function<double(double)>& h,
                         const GraphSignal& b);

// Solves (I + rho L^2) x = b by conjugate gradients on the SPD operator until
// the true residual satisfies ||b - Ax|| <= 1e-12 ||b||. rho = 0 returns b.
GraphSignal gbjbf_exact(const NormalizedLaplacian& L, double rho, const GraphSignal& b);

struct ResponseSample {
  double lambda = 0.0;
  double h = 0.0;
  bool valid = false;
};

struct SpectralResponse {
  std::vector<ResponseSample> samples;
};

// Per-eigenvector gain <u_i, filter(b)> / <u_i, b>. Samples whose input
// coefficient is below 1e-9 ||b|| are kept but flagged invalid.
SpectralResponse measure_response(
    const std::function<GraphSignal(const GraphSignal&)>& filter,
    const EigenDecomposition& eig, const GraphSignal& b);

// Header `lambda,h,valid`, 17 significant digits, LF endings, empty h for
// invalid samples.
void write_response_csv(std::ostream& os, const SpectralResponse& response);

}  // namespace kden
