#include "kden/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kden/spectral.hpp"

namespace kden {

namespace {

constexpr double kCgBreakdown = 1e-14;

void require_dim(const NormalizedLaplacian& L, const GraphSignal& b, const char* what) {
  if (static_cast<std::size_t>(b.size()) != L.size()) {
    throw DimensionError(std::string(what) + ": signal length " + std::to_string(b.size()) +
                         " does not match Laplacian size " + std::to_string(L.size()));
  }
}

void require_degree(int k, const char* what) {
  if (k < 1) throw std::invalid_argument(std::string(what) + ": k must be at least 1");
}

}  // namespace

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::Jbf: return "jbf";
    case FilterKind::Gbjbf: return "gbjbf";
    case FilterKind::KPoly: return "poly";
    case FilterKind::KCheb: return "cheb";
    case FilterKind::KCg: return "cg";
    case FilterKind::KCg0: return "cg0";
  }
  return "unknown";
}

std::optional<FilterKind> parse_filter_kind(std::string_view name) {
  for (auto kind : {FilterKind::Jbf, FilterKind::Gbjbf, FilterKind::KPoly,
                    FilterKind::KCheb, FilterKind::KCg, FilterKind::KCg0}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

void FilterSpec::validate() const {
  switch (kind) {
    case FilterKind::Jbf:
      break;
    case FilterKind::Gbjbf:
      if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be > 0");
      break;
    case FilterKind::KPoly:
      require_degree(k, "poly");
      if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be > 0");
      break;
    case FilterKind::KCheb:
      require_degree(k, "cheb");
      if (!(l > 0.0 && l < 2.0)) throw std::invalid_argument("l must lie in (0, 2)");
      break;
    case FilterKind::KCg:
    case FilterKind::KCg0:
      require_degree(k, "cg");
      break;
  }
}

double ChebDesign::response(double lambda) const {
  double h = scale;
  for (double r : roots) h *= r - lambda;
  return h;
}

ChebDesign cheb_design(int k, double l) {
  require_degree(k, "cheb_design");
  if (!(l > 0.0 && l < 2.0)) {
    throw std::invalid_argument("cheb_design: stop-band start must lie in (0, 2)");
  }
  ChebDesign d;
  d.k = k;
  d.l = l;
  d.roots.reserve(static_cast<std::size_t>(k));
  const double half_width = (2.0 - l) / 2.0;
  const double center = (2.0 + l) / 2.0;
  double prod = 1.0;
  for (int i = 1; i <= k; ++i) {
    const double node = std::cos(std::numbers::pi * (2.0 * i - 1.0) / (2.0 * k));
    const double r = half_width * node + center;
    d.roots.push_back(r);
    prod *= r;
  }
  // cos is decreasing on [0, pi], so the roots are already descending.
  d.scale = 1.0 / prod;
  return d;
}

double PolyExpansion::response(double lambda) const {
  // Clenshaw on t = lambda - 1.
  const double t = lambda - 1.0;
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t j = coeffs.size(); j-- > 1;) {
    const double b0 = 2.0 * t * b1 - b2 + coeffs[j];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + (coeffs.empty() ? 0.0 : coeffs[0]);
}

PolyExpansion chebyshev_expand(const std::function<double(double)>& h, int k) {
  require_degree(k, "chebyshev_expand");
  const int m = std::max(64, 8 * k);
  std::vector<double> theta(static_cast<std::size_t>(m));
  std::vector<double> f(static_cast<std::size_t>(m));
  for (int q = 0; q < m; ++q) {
    theta[q] = std::numbers::pi * (q + 0.5) / m;
    f[q] = h(1.0 + std::cos(theta[q]));
  }
  PolyExpansion p;
  p.k = k;
  p.coeffs.assign(static_cast<std::size_t>(k) + 1, 0.0);
  for (int j = 0; j <= k; ++j) {
    double s = 0.0;
    for (int q = 0; q < m; ++q) s += f[q] * std::cos(j * theta[q]);
    p.coeffs[j] = (j == 0 ? 1.0 : 2.0) * s / m;
  }
  return p;
}

PolyExpansion poly_expand_gbjbf(int k, double rho) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("poly_expand_gbjbf: rho must be finite and nonnegative");
  }
  PolyExpansion p = chebyshev_expand([rho](double lam) { return 1.0 / (1.0 + rho * lam * lam); }, k);
  p.rho = rho;
  return p;
}

GraphSignal jbf(const NormalizedLaplacian& L, const GraphSignal& b) {
  require_dim(L, b, "jbf");
  return b - L.apply(b);
}

GraphSignal cheb_filter(const NormalizedLaplacian& L, const GraphSignal& b,
                        const ChebDesign& design) {
  require_dim(L, b, "cheb_filter");
  GraphSignal x = design.scale * b;
  GraphSignal lx(b.size());
  for (double r : design.roots) {
    L.apply(x, lx);
    x = r * x - lx;
  }
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (L.isolated(static_cast<std::size_t>(i))) x[i] = b[i];
  }
  return x;
}

GraphSignal poly_filter(const NormalizedLaplacian& L, const GraphSignal& b,
                        const PolyExpansion& p) {
  require_dim(L, b, "poly_filter");
  if (p.coeffs.empty()) throw std::invalid_argument("poly_filter: empty expansion");

  GraphSignal out = p.coeffs[0] * b;
  if (p.coeffs.size() == 1) return out;

  // t = L - I
  GraphSignal prev = b;
  GraphSignal cur = L.apply(b) - b;
  out += p.coeffs[1] * cur;
  GraphSignal lcur(b.size());
  for (std::size_t j = 2; j < p.coeffs.size(); ++j) {
    L.apply(cur, lcur);
    GraphSignal next = 2.0 * (lcur - cur) - prev;
    out += p.coeffs[j] * next;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return out;
}

CgResult cg_filter(const NormalizedLaplacian& L, const GraphSignal& b, int k,
                   CgVariant variant) {
  require_dim(L, b, "cg_filter");
  require_degree(k, "cg_filter");

  CgResult res;
  res.x = b;
  GraphSignal lx = L.apply(res.x);
  GraphSignal r = variant == CgVariant::Cg ? GraphSignal(b - lx) : GraphSignal(-lx);
  GraphSignal p = r;
  GraphSignal lp(b.size());
  double rr = r.squaredNorm();

  for (int it = 0; it < k; ++it) {
    L.apply(p, lp);
    const double curvature = p.dot(lp);
    if (!(curvature > kCgBreakdown * p.squaredNorm())) {
      res.early_termination = true;
      break;
    }
    const double alpha = rr / curvature;
    res.x += alpha * p;
    r -= alpha * lp;
    ++res.iterations;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  return res;
}

std::function<GraphSignal(const GraphSignal&)> normalized_filter(
    const FilterSpec& spec, const NormalizedLaplacian& L) {
  spec.validate();
  switch (spec.kind) {
    case FilterKind::Jbf:
      return [&L](const GraphSignal& b) { return jbf(L, b); };
    case FilterKind::Gbjbf:
      return [&L, rho = spec.rho](const GraphSignal& b) { return gbjbf_exact(L, rho, b); };
    case FilterKind::KPoly:
      return [&L, p = poly_expand_gbjbf(spec.k, spec.rho)](const GraphSignal& b) {
        return poly_filter(L, b, p);
      };
    case FilterKind::KCheb:
      return [&L, d = cheb_design(spec.k, spec.l)](const GraphSignal& b) {
        return cheb_filter(L, b, d);
      };
    case FilterKind::KCg:
    case FilterKind::KCg0: {
      const auto variant = spec.kind == FilterKind::KCg ? CgVariant::Cg : CgVariant::Cg0;
      return [&L, k = spec.k, variant](const GraphSignal& b) {
        return cg_filter(L, b, k, variant).x;
      };
    }
  }
  throw std::invalid_argument("unknown filter kind");
}

FilterResult apply_filter(const FilterSpec& spec, const NormalizedLaplacian& L,
                          const PixelGraph& graph, const GraphSignal& b_hat) {
  spec.validate();
  require_dim(L, b_hat, "apply_filter");
  if (graph.num_nodes() != L.size()) {
    throw DimensionError("apply_filter: graph and Laplacian sizes differ");
  }

  GraphSignal b = normalize_signal(graph, b_hat);
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (graph.isolated(static_cast<std::size_t>(i))) b[i] = 0.0;
  }

  FilterResult out;
  GraphSignal x;
  switch (spec.kind) {
    case FilterKind::Jbf:
      x = jbf(L, b);
      break;
    case FilterKind::Gbjbf:
      x = gbjbf_exact(L, spec.rho, b);
      break;
    case FilterKind::KPoly:
      x = poly_filter(L, b, poly_expand_gbjbf(spec.k, spec.rho));
      break;
    case FilterKind::KCheb:
      x = cheb_filter(L, b, cheb_design(spec.k, spec.l));
      break;
    case FilterKind::KCg:
    case FilterKind::KCg0: {
      auto res = cg_filter(L, b, spec.k,
                           spec.kind == FilterKind::KCg ? CgVariant::Cg : CgVariant::Cg0);
      out.early_termination = res.early_termination;
      x = std::move(res.x);
      break;
    }
  }

  out.signal = denormalize_signal(graph, x);
  for (Eigen::Index i = 0; i < b_hat.size(); ++i) {
    if (graph.isolated(static_cast<std::size_t>(i))) out.signal[i] = b_hat[i];
  }
  return out;
}

}  // namespace kden
