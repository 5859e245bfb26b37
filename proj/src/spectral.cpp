#include "kden/spectral.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace kden {

namespace {

constexpr double kSignThreshold = 1e-10;
constexpr double kGbjbfTolerance = 1e-12;
constexpr double kResponseFloor = 1e-9;

}  // namespace

EigenDecomposition dense_eig(const NormalizedLaplacian& L) {
  const Eigen::MatrixXd dense = L.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericError("dense_eig: symmetric eigensolver did not converge");
  }

  EigenDecomposition eig{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < eig.eigenvectors.cols(); ++c) {
    auto col = eig.eigenvectors.col(c);
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      if (std::abs(col[r]) > kSignThreshold) {
        if (col[r] < 0.0) col *= -1.0;
        break;
      }
    }
  }
  return eig;
}

GraphSignal exact_filter(const EigenDecomposition& eig,
                         const std::function<double(double)>& h,
                         const GraphSignal& b) {
  if (b.size() != eig.size()) {
    throw DimensionError("exact_filter: signal length does not match decomposition");
  }
  GraphSignal coeff = eig.eigenvectors.transpose() * b;
  for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff[i] *= h(eig.eigenvalues[i]);
  return eig.eigenvectors * coeff;
}

GraphSignal gbjbf_exact(const NormalizedLaplacian& L, double rho, const GraphSignal& b) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("gbjbf_exact: rho must be finite and nonnegative");
  }
  if (static_cast<std::size_t>(b.size()) != L.size()) {
    throw DimensionError("gbjbf_exact: signal length does not match Laplacian");
  }
  if (rho == 0.0) return b;

  GraphSignal tmp(b.size());
  auto apply_a = [&](const GraphSignal& v, GraphSignal& out) {
    L.apply(v, tmp);
    L.apply(tmp, out);
    out = v + rho * out;
  };

  const double bnorm = b.norm();
  if (bnorm == 0.0) return b;
  const double target = kGbjbfTolerance * bnorm;

  GraphSignal x = b;
  GraphSignal r(b.size()), p, q(b.size());
  apply_a(x, q);
  r = b - q;

  // The spectrum of I + rho L^2 lies in [1, 1 + 4 rho], so convergence is
  // fast; the cap only guards against pathological input.
  const long max_iter = 10 * static_cast<long>(b.size()) + 1000;
  long iter = 0;
  while (r.norm() > target) {
    p = r;
    double rr = r.squaredNorm();
    // Inner CG on the current residual; restarted from the true residual
    // whenever the recursive one claims convergence.
    while (iter < max_iter) {
      apply_a(p, q);
      const double alpha = rr / p.dot(q);
      x += alpha * p;
      r -= alpha * q;
      ++iter;
      const double rr_new = r.squaredNorm();
      if (std::sqrt(rr_new) <= 0.5 * target) break;
      p = r + (rr_new / rr) * p;
      rr = rr_new;
    }
    apply_a(x, q);
    r = b - q;
    if (iter >= max_iter && r.norm() > target) {
      throw NumericError("gbjbf_exact: conjugate gradients did not reach tolerance");
    }
  }
  return x;
}

SpectralResponse measure_response(
    const std::function<GraphSignal(const GraphSignal&)>& filter,
    const EigenDecomposition& eig, const GraphSignal& b) {
  if (b.size() != eig.size()) {
    throw DimensionError("measure_response: signal length does not match decomposition");
  }
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    throw std::invalid_argument("measure_response: input signal is zero");
  }
  const GraphSignal y = filter(b);
  if (y.size() != b.size()) {
    throw DimensionError("measure_response: filter changed the signal length");
  }
  const GraphSignal cin = eig.eigenvectors.transpose() * b;
  const GraphSignal cout = eig.eigenvectors.transpose() * y;

  SpectralResponse resp;
  resp.samples.reserve(static_cast<std::size_t>(b.size()));
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    ResponseSample s;
    s.lambda = eig.eigenvalues[i];
    s.valid = std::abs(cin[i]) >= kResponseFloor * bnorm;
    if (s.valid) s.h = cout[i] / cin[i];
    resp.samples.push_back(s);
  }
  return resp;
}

void write_response_csv(std::ostream& os, const SpectralResponse& response) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(17);
  buf << "lambda,h,valid\n";
  for (const auto& s : response.samples) {
    buf << s.lambda << ',';
    if (s.valid) buf << s.h;
    buf << ',' << (s.valid ? 1 : 0) << '\n';
  }
  os << buf.str();
}

}  // namespace kden
