#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "kden/filters.hpp"
#include "kden/spectral.hpp"
#include "test_support.hpp"

using namespace kden;
using namespace kden::testing;
using Catch::Matchers::WithinAbs;

namespace {

const GraphSignal kE0 = Eigen::Vector2d(1, 0);

PixelGraph edgeless(std::size_t n) { return PixelGraph::from_edges(n, {}); }

struct Patch {
  PixelGraph graph;
  NormalizedLaplacian lap;
};

Patch random_patch(std::mt19937_64& rng, int side, double hole_p = 0.0) {
  const auto guide = random_guide(rng, side, side);
  const auto mask = random_mask(rng, side, side, hole_p);
  Patch p{build_graph(guide, mask, {}), {}};
  p.lap = NormalizedLaplacian(p.graph);
  return p;
}

double objective(const NormalizedLaplacian& L, const GraphSignal& x, const GraphSignal& f) {
  return x.dot(L.apply(x)) - 2.0 * x.dot(f);
}

// Minimizer of x^T L x - 2 x^T f over x0 + span{r0, L r0, ..., L^{k-1} r0},
// using an explicitly orthonormalized basis and a dense projected solve.
GraphSignal krylov_minimizer(const NormalizedLaplacian& L, const GraphSignal& x0,
                             const GraphSignal& f, int k) {
  const Eigen::MatrixXd A = L.dense();
  const GraphSignal r0 = f - A * x0;
  std::vector<GraphSignal> basis;
  GraphSignal v = r0;
  const double scale = std::max(r0.norm(), 1e-300);
  for (int j = 0; j < k; ++j) {
    GraphSignal w = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) w -= q.dot(w) * q;
    }
    if (w.norm() > 1e-10 * scale) basis.push_back(w.normalized());
    v = A * v;
  }
  if (basis.empty()) return x0;
  Eigen::MatrixXd Q(x0.size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) Q.col(static_cast<Eigen::Index>(j)) = basis[j];
  const Eigen::MatrixXd H = Q.transpose() * A * Q;
  const Eigen::VectorXd y = H.completeOrthogonalDecomposition().solve(Q.transpose() * r0);
  return x0 + Q * y;
}

// Chebyshev coefficients of h on [0, 2] by composite Simpson in theta with
// 4096 intervals.
std::vector<double> simpson_coefficients(const std::function<double(double)>& h, int k) {
  const int m = 4096;
  std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
  for (int j = 0; j <= k; ++j) {
    double s = 0.0;
    for (int q = 0; q <= m; ++q) {
      const double t = std::numbers::pi * q / m;
      const double wq = (q == 0 || q == m) ? 1.0 : (q % 2 ? 4.0 : 2.0);
      s += wq * h(1.0 + std::cos(t)) * std::cos(j * t);
    }
    s *= std::numbers::pi / (3.0 * m);
    c[static_cast<std::size_t>(j)] = (j == 0 ? 1.0 : 2.0) * s / std::numbers::pi;
  }
  return c;
}

}  // namespace

TEST_CASE("filter names", "[filters]") {
  for (auto kind : {FilterKind::Jbf, FilterKind::Gbjbf, FilterKind::KPoly, FilterKind::KCheb,
                    FilterKind::KCg, FilterKind::KCg0}) {
    CHECK(parse_filter_kind(to_string(kind)) == kind);
  }
  CHECK_FALSE(parse_filter_kind("median").has_value());
}

TEST_CASE("FilterSpec validation", "[filters]") {
  CHECK_NOTHROW(FilterSpec{}.validate());
  CHECK_THROWS(FilterSpec{FilterKind::KCheb, 3, 2.0, 2.0}.validate());
  CHECK_THROWS(FilterSpec{FilterKind::KCheb, 3, 0.0, 2.0}.validate());
  CHECK_THROWS(FilterSpec{FilterKind::KPoly, 0, 0.5, 2.0}.validate());
  CHECK_THROWS(FilterSpec{FilterKind::Gbjbf, 3, 0.5, 0.0}.validate());
  CHECK_THROWS(FilterSpec{FilterKind::KCg0, 0, 0.5, 2.0}.validate());
  CHECK_NOTHROW(FilterSpec{FilterKind::Jbf, 0, 5.0, -1.0}.validate());
}

TEST_CASE("jbf", "[filters]") {
  const NormalizedLaplacian L(two_node_graph());
  CHECK((jbf(L, kE0) - Eigen::Vector2d(0, 1)).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(4);
  const auto p = random_patch(rng, 10, 0.1);
  const GraphSignal s = p.graph.sqrt_degrees();
  CHECK(rel_inf_error(jbf(p.lap, s), s) <= 1e-12);

  const GraphSignal b = random_signal(rng, 6);
  CHECK(jbf(NormalizedLaplacian(edgeless(6)), b) == b);
  CHECK_THROWS_AS(jbf(L, GraphSignal::Ones(3)), DimensionError);
}

TEST_CASE("cheb_design", "[filters]") {
  SECTION("k = 1") {
    const auto d = cheb_design(1, 0.5);
    REQUIRE(d.roots.size() == 1);
    CHECK_THAT(d.roots[0], WithinAbs(1.25, 1e-15));
    CHECK_THAT(d.scale, WithinAbs(0.8, 1e-15));
  }
  SECTION("k = 2") {
    // 0.75 * cos(pi/4) + 1.25 and its mirror; the product is 1.28125.
    const auto d = cheb_design(2, 0.5);
    CHECK_THAT(d.roots[0], WithinAbs(1.7803300858899107, 1e-14));
    CHECK_THAT(d.roots[1], WithinAbs(0.71966991411008935, 1e-14));
    CHECK_THAT(d.scale, WithinAbs(1.0 / 1.28125, 1e-14));
  }
  SECTION("unit response at zero and roots inside the stop band") {
    for (int k = 1; k <= 12; ++k) {
      for (double l : {0.05, 0.3, 0.5, 1.0, 1.7}) {
        const auto d = cheb_design(k, l);
        REQUIRE_THAT(d.response(0.0), WithinAbs(1.0, 1e-12));
        for (double r : d.roots) {
          REQUIRE(r >= l);
          REQUIRE(r <= 2.0);
        }
        REQUIRE(std::is_sorted(d.roots.rbegin(), d.roots.rend()));
      }
    }
  }
  SECTION("bad parameters") {
    CHECK_THROWS(cheb_design(0, 0.5));
    CHECK_THROWS(cheb_design(3, 0.0));
    CHECK_THROWS(cheb_design(3, 2.0));
  }
}

TEST_CASE("Chebyshev stop band is equiripple at the minimax level", "[filters][property]") {
  for (int k : {1, 2, 3, 4, 6}) {
    for (double l : {0.3, 0.5, 1.0}) {
      const auto d = cheb_design(k, l);
      const double z0 = -(2.0 + l) / (2.0 - l);
      const double level = 1.0 / std::abs(std::cosh(k * std::acosh(std::abs(z0))));
      double peak = 0.0;
      for (int s = 0; s <= 10000; ++s) {
        peak = std::max(peak, std::abs(d.response(l + (2.0 - l) * s / 10000.0)));
      }
      REQUIRE_THAT(peak, WithinAbs(level, 1e-10));
    }
  }
}

TEST_CASE("cheb_filter", "[filters]") {
  SECTION("two-node hand value") {
    const GraphSignal x = cheb_filter(NormalizedLaplacian(two_node_graph()), kE0, cheb_design(1, 0.5));
    CHECK_THAT(x[0], WithinAbs(0.2, 1e-15));
    CHECK_THAT(x[1], WithinAbs(0.8, 1e-15));
  }
  SECTION("nullspace vector and edgeless graph") {
    std::mt19937_64 rng(6);
    const auto p = random_patch(rng, 10, 0.1);
    const GraphSignal s = p.graph.sqrt_degrees();
    CHECK(rel_inf_error(cheb_filter(p.lap, s, cheb_design(5, 0.5)), s) <= 1e-10);
    const GraphSignal b = random_signal(rng, 7);
    CHECK(cheb_filter(NormalizedLaplacian(edgeless(7)), b, cheb_design(3, 0.5)) == b);
  }
  SECTION("matches the spectral polynomial and is independent of root order") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
      const auto p = random_patch(rng, 12, 0.05);
      const auto eig = dense_eig(p.lap);
      const GraphSignal b = random_signal(rng, p.lap.size());
      auto d = cheb_design(4, 0.5);
      const GraphSignal x = cheb_filter(p.lap, b, d);
      const GraphSignal ref = exact_filter(eig, [&](double l) { return d.response(l); }, b);
      for (Eigen::Index i = 0; i < b.size(); ++i) {
        if (p.lap.isolated(static_cast<std::size_t>(i))) REQUIRE(x[i] == b[i]);
      }
      REQUIRE(rel_inf_error(x, ref) <= 1e-8);
      std::shuffle(d.roots.begin(), d.roots.end(), rng);
      REQUIRE(rel_inf_error(cheb_filter(p.lap, b, d), x) <= 1e-8);
    }
  }
}

TEST_CASE("poly_expand_gbjbf", "[filters]") {
  SECTION("constant target") {
    const auto p = chebyshev_expand([](double) { return 2.5; }, 5);
    CHECK_THAT(p.coeffs[0], WithinAbs(2.5, 1e-12));
    for (std::size_t j = 1; j < p.coeffs.size(); ++j) CHECK_THAT(p.coeffs[j], WithinAbs(0.0, 1e-12));
    const auto q = poly_expand_gbjbf(4, 0.0);
    CHECK_THAT(q.coeffs[0], WithinAbs(1.0, 1e-12));
    for (std::size_t j = 1; j < q.coeffs.size(); ++j) CHECK_THAT(q.coeffs[j], WithinAbs(0.0, 1e-12));
  }
  SECTION("k = 3, rho = 2 against frozen and independent quadrature") {
    const auto p = poly_expand_gbjbf(3, 2.0);
    REQUIRE(p.coeffs.size() == 4);
    // Adaptive quadrature to 1e-14, computed offline.
    const double frozen[] = {0.4714045207910317, -0.4714045207910316, 0.11438191683587313,
                             0.013876853447538471};
    const auto simpson = simpson_coefficients([](double l) { return 1.0 / (1.0 + 2.0 * l * l); }, 3);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK_THAT(p.coeffs[j], WithinAbs(frozen[j], 1e-10));
      CHECK_THAT(p.coeffs[j], WithinAbs(simpson[j], 1e-10));
    }
    // Truncation leaves the DC gain near, not at, 1.
    CHECK_THAT(p.response(0.0), WithinAbs(1.0433141049703978, 1e-10));
    CHECK(std::abs(p.response(0.0) - 1.0) < 0.15);
  }
  SECTION("higher degrees use more nodes and still match") {
    const auto p = poly_expand_gbjbf(12, 2.0);
    const auto simpson = simpson_coefficients([](double l) { return 1.0 / (1.0 + 2.0 * l * l); }, 12);
    for (std::size_t j = 0; j < p.coeffs.size(); ++j) CHECK_THAT(p.coeffs[j], WithinAbs(simpson[j], 1e-10));
  }
  SECTION("negative rho") { CHECK_THROWS(poly_expand_gbjbf(3, -1.0)); }
}

TEST_CASE("poly_filter", "[filters]") {
  std::mt19937_64 rng(10);
  const auto p = random_patch(rng, 10, 0.05);
  const GraphSignal b = random_signal(rng, p.lap.size());

  PolyExpansion ident{0, 0.0, {1.0}};
  CHECK(poly_filter(p.lap, b, ident) == b);

  PolyExpansion t1{1, 0.0, {0.0, 1.0}};
  CHECK((poly_filter(p.lap, b, t1) - (p.lap.apply(b) - b)).lpNorm<Eigen::Infinity>() <= 1e-14);

  SECTION("matches the truncated series spectrally") {
    for (int trial = 0; trial < 5; ++trial) {
      const auto q = random_patch(rng, 16, 0.05);
      const auto eig = dense_eig(q.lap);
      const GraphSignal x = random_signal(rng, q.lap.size());
      const auto series = poly_expand_gbjbf(3, 2.0);
      REQUIRE(rel_inf_error(poly_filter(q.lap, x, series),
                            exact_filter(eig, [&](double l) { return series.response(l); }, x)) <= 1e-8);
    }
  }
}

TEST_CASE("polynomial filters are linear", "[filters][property]") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  const auto p = random_patch(rng, 12, 0.1);
  const auto design = cheb_design(3, 0.5);
  const auto series = poly_expand_gbjbf(3, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const GraphSignal b1 = random_signal(rng, p.lap.size(), 10.0);
    const GraphSignal b2 = random_signal(rng, p.lap.size(), 10.0);
    const double a = coef(rng), c = coef(rng);
    const GraphSignal mix = a * b1 + c * b2;
    REQUIRE((jbf(p.lap, mix) - (a * jbf(p.lap, b1) + c * jbf(p.lap, b2))).lpNorm<Eigen::Infinity>() <= 1e-9);
    REQUIRE((cheb_filter(p.lap, mix, design) -
             (a * cheb_filter(p.lap, b1, design) + c * cheb_filter(p.lap, b2, design)))
                .lpNorm<Eigen::Infinity>() <= 1e-9);
    REQUIRE((poly_filter(p.lap, mix, series) -
             (a * poly_filter(p.lap, b1, series) + c * poly_filter(p.lap, b2, series)))
                .lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("cg_filter hand values", "[filters][cg]") {
  const NormalizedLaplacian L(two_node_graph());
  SECTION("variant CG, one step") {
    const auto r = cg_filter(L, kE0, 1, CgVariant::Cg);
    CHECK((r.x - Eigen::Vector2d(1, 1)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(r.iterations == 1);
    CHECK_FALSE(r.early_termination);
  }
  SECTION("variant CG0, one step") {
    const auto r = cg_filter(L, kE0, 1, CgVariant::Cg0);
    CHECK((r.x - Eigen::Vector2d(0.5, 0.5)).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SECTION("CG0 on an edgeless graph breaks down immediately") {
    std::mt19937_64 rng(14);
    const GraphSignal b = random_signal(rng, 5);
    const auto r = cg_filter(NormalizedLaplacian(edgeless(5)), b, 3, CgVariant::Cg0);
    CHECK(r.early_termination);
    CHECK(r.iterations == 0);
    CHECK(r.x == b);
  }
  SECTION("CG0 leaves the nullspace vector in place") {
    std::mt19937_64 rng(14);
    const auto p = random_patch(rng, 8);
    const GraphSignal s = p.graph.sqrt_degrees();
    CHECK(rel_inf_error(cg_filter(p.lap, s, 3, CgVariant::Cg0).x, s) <= 1e-10);
  }
  SECTION("errors") {
    CHECK_THROWS_AS(cg_filter(L, GraphSignal::Ones(3), 1, CgVariant::Cg), DimensionError);
    CHECK_THROWS(cg_filter(L, kE0, 0, CgVariant::Cg));
  }
}

TEST_CASE("cg_filter minimizes over the affine Krylov space", "[filters][cg][property]") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_connected_graph(rng, 8);
    const NormalizedLaplacian L(g);
    const GraphSignal b = random_signal(rng, 8);
    for (auto variant : {CgVariant::Cg, CgVariant::Cg0}) {
      const GraphSignal f = variant == CgVariant::Cg ? b : GraphSignal(GraphSignal::Zero(8));
      double prev = objective(L, b, f);
      for (int k = 1; k <= 4; ++k) {
        const auto r = cg_filter(L, b, k, variant);
        const GraphSignal ref = krylov_minimizer(L, b, f, k);
        REQUIRE(rel_inf_error(r.x, ref) <= 1e-8);
        const double obj = objective(L, r.x, f);
        REQUIRE(obj <= prev + 1e-12 * std::abs(prev));
        prev = obj;
      }
    }
  }
}

TEST_CASE("cg_filter structural properties", "[filters][cg][property]") {
  std::mt19937_64 rng(16);
  SECTION("n-1 steps of variant CG solve L x = b for b in the range") {
    for (int trial = 0; trial < 10; ++trial) {
      const auto g = random_connected_graph(rng, 8, 0.5);
      const NormalizedLaplacian L(g);
      // A nullspace component in f makes the objective unbounded, so the
      // input is projected onto the range of L first.
      const GraphSignal s = g.sqrt_degrees().normalized();
      GraphSignal b = random_signal(rng, 8);
      b -= b.dot(s) * s;
      const auto r = cg_filter(L, b, 7, CgVariant::Cg);
      REQUIRE((b - L.apply(r.x)).norm() <= 1e-8 * b.norm());
    }
  }
  SECTION("CG0 preserves the nullspace component") {
    for (int trial = 0; trial < 10; ++trial) {
      const auto p = random_patch(rng, 12, 0.05);
      const GraphSignal b = random_signal(rng, p.lap.size(), 20.0);
      const GraphSignal s = p.graph.sqrt_degrees();
      for (int k : {1, 3, 6}) {
        const auto r = cg_filter(p.lap, b, k, CgVariant::Cg0);
        REQUIRE_THAT(r.x.dot(s), WithinAbs(b.dot(s), 1e-10 * std::max(1.0, std::abs(b.dot(s)))));
      }
    }
  }
}

TEST_CASE("apply_filter", "[filters]") {
  SECTION("JBF keeps a constant image on a uniform-weight graph") {
    const ImageGray guide(8, 8, 120.0);
    HoleMask mask(8, 8);
    mask.set(3, 3, true);
    const auto g = build_graph(guide, mask, {});
    const NormalizedLaplacian L(g);
    const GraphSignal c = GraphSignal::Constant(64, 87.25);
    const auto out = apply_filter({FilterKind::Jbf, 1, 0.5, 2.0}, L, g, c);
    CHECK(rel_inf_error(out.signal, c) <= 1e-10);
  }
  SECTION("K_CHEB dispatch matches cheb_filter") {
    std::mt19937_64 rng(17);
    const auto p = random_patch(rng, 10);
    const GraphSignal bh = random_signal(rng, p.lap.size(), 30.0);
    const auto out = apply_filter({FilterKind::KCheb, 1, 0.5, 2.0}, p.lap, p.graph, bh);
    const GraphSignal ref =
        denormalize_signal(p.graph, cheb_filter(p.lap, normalize_signal(p.graph, bh), cheb_design(1, 0.5)));
    CHECK(rel_inf_error(out.signal, ref) <= 1e-12);
  }
  SECTION("hole pixels are returned bit-identical for every kind") {
    std::mt19937_64 rng(18);
    const auto guide = random_guide(rng, 12, 12);
    const auto mask = random_mask(rng, 12, 12, 0.3);
    const auto g = build_graph(guide, mask, {});
    const NormalizedLaplacian L(g);
    const GraphSignal bh = to_signal(random_image(rng, 12, 12));
    for (auto kind : {FilterKind::Jbf, FilterKind::Gbjbf, FilterKind::KPoly, FilterKind::KCheb,
                      FilterKind::KCg, FilterKind::KCg0}) {
      const auto out = apply_filter({kind, 3, 0.5, 2.0}, L, g, bh);
      for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        if (mask.flags[i]) REQUIRE(out.signal[static_cast<Eigen::Index>(i)] == bh[static_cast<Eigen::Index>(i)]);
      }
    }
  }
  SECTION("dimension mismatch") {
    const auto g = two_node_graph();
    const NormalizedLaplacian L(g);
    CHECK_THROWS_AS(apply_filter({}, L, g, GraphSignal::Ones(3)), DimensionError);
  }
}
