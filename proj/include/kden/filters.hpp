#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "kden/graph.hpp"

namespace kden {

enum class FilterKind { Jbf, Gbjbf, KPoly, KCheb, KCg, KCg0 };

// CLI names: jbf, gbjbf, poly, cheb, cg, cg0.
std::string_view to_string(FilterKind kind);
std::optional<FilterKind> parse_filter_kind(std::string_view name);

struct FilterSpec {
  FilterKind kind = FilterKind::KCg;
  int k = 3;         // degree / iterations (KPoly, KCheb, KCg, KCg0)
  double l = 0.5;    // stop-band start (KCheb)
  double rho = 2.0;  // regularization (Gbjbf, KPoly)

  void validate() const;
};

// Low-pass polynomial r0 * prod(r_i - lambda) whose roots are the Chebyshev
// nodes mapped onto the stop band [l, 2]; r0 fixes the response at 0 to 1.
struct ChebDesign {
  int k = 0;
  double l = 0.0;
  std::vector<double> roots;  // descending
  double scale = 1.0;

  double response(double lambda) const;
};

ChebDesign cheb_design(int k, double l);

// Truncated Chebyshev series sum_j c_j T_j(lambda - 1) on [0, 2].
struct PolyExpansion {
  int k = 0;
  double rho = 0.0;
  std::vector<double> coeffs;

  double response(double lambda) const;
};

// Series coefficients of h on [0, 2] by Gauss-Chebyshev quadrature with
// max(64, 8k) nodes under lambda = 1 + cos(theta).
PolyExpansion chebyshev_expand(const std::function<double(double)>& h, int k);

// k-POLY: expansion of 1 / (1 + rho lambda^2). rho = 0 is accepted.
PolyExpansion poly_expand_gbjbf(int k, double rho);

// The raw filters below act on normalized signals.

// b - L b.
GraphSignal jbf(const NormalizedLaplacian& L, const GraphSignal& b);

// x^0 = r0 b, x^i = r_i x^{i-1} - L x^{i-1}, roots in descending order.
// Nodes with zero Laplacian rows return b exactly.
GraphSignal cheb_filter(const NormalizedLaplacian& L, const GraphSignal& b,
                        const ChebDesign& design);

// Three-term recurrence in t = L - I; exactly k Laplacian applications.
GraphSignal poly_filter(const NormalizedLaplacian& L, const GraphSignal& b,
                        const PolyExpansion& p);

enum class CgVariant {
  Cg,   // x^0 = b, f = b
  Cg0,  // x^0 = b, f = 0
};

struct CgResult {
  GraphSignal x;
  int iterations = 0;
  bool early_termination = false;
};

// k steps of conjugate gradients on x^T L x - 2 x^T f. Stops early, returning
// the current iterate, once p^T L p <= 1e-14 ||p||^2.
CgResult cg_filter(const NormalizedLaplacian& L, const GraphSignal& b, int k,
                   CgVariant variant);

struct FilterResult {
  GraphSignal signal;
  bool early_termination = false;
};

// The selected filter as a map on normalized signals. GBJBF routes to
// gbjbf_exact.
std::function<GraphSignal(const GraphSignal&)> normalized_filter(
    const FilterSpec& spec, const NormalizedLaplacian& L);

// Full filter on an unnormalized signal: normalize, filter, denormalize.
// Degree-0 nodes are excluded from the filter and returned bit-identical.
FilterResult apply_filter(const FilterSpec& spec, const NormalizedLaplacian& L,
                          const PixelGraph& graph, const GraphSignal& b_hat);

}  // namespace kden
