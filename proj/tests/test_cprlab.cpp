#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cpr/cprlab.hpp"
#include "cpr/error.hpp"
#include "fixtures.hpp"

using namespace cpr;

namespace {

CPApproximation identity_approximation(const FiniteMetricSpace& space) {
  const int p = space.size();
  Algebra c = Algebra::abelian(p);
  CPMap psi = CPMap::from_matrix(c, c, Matrix::Identity(p, p), CodomainKind::algebra);
  CPMap phi = CPMap::from_matrix(c, c, Matrix::Identity(p, p), CodomainKind::functions);
  std::vector<int> pts(p);
  std::iota(pts.begin(), pts.end(), 0);
  return {space, 1, psi, phi, pts, std::nullopt};
}

Function coordinate(const FiniteMetricSpace& s, int k = 0) { return s.coords()->col(k); }

}  // namespace

TEST_CASE("builder on the unit interval") {
  FiniteMetricSpace grid = FiniteMetricSpace::interval_grid(101);
  std::vector<Function> a{coordinate(grid)};
  CPApproximation approx = build_cp_approx(grid, a, 0.3);
  ApproxVerification v = verify_cp_approx(approx, a, 0.3);
  CHECK(v.within);
  CHECK(v.max_error <= 0.3);
  CHECK(v.psi_cp);
  CHECK(v.phi_cp);
  CHECK(v.psi_contractive);
  CHECK(v.phi_contractive);
  CHECK(strict_order_abelian(approx.phi) <= 1);
  REQUIRE(approx.build);
  CHECK(approx.build->max_oscillation < 0.2);
  CHECK(strict_order_abelian(approx.phi) <= approx.build->net_order);

  std::vector<Function> constant{Function::Constant(grid.size(), 0.7)};
  CHECK(verify_cp_approx(build_cp_approx(grid, constant, 0.01), constant, 0.01).max_error < 1e-12);
  CHECK_THROWS_AS(build_cp_approx(grid, a, 0.0), PreconditionError);
}

TEST_CASE("builder on two distant points") {
  Eigen::MatrixXd pts(2, 1);
  pts << 0, 10;
  FiniteMetricSpace two = FiniteMetricSpace::euclidean(pts);
  std::vector<Function> a{(Function(2) << 3, -1).finished()};
  CPApproximation approx = build_cp_approx(two, a, 0.01);
  CHECK(approx.F().dimension() == 2);
  CHECK(approx.F().is_abelian());
  CHECK(verify_cp_approx(approx, a, 0.01).max_error == 0.0);
}

TEST_CASE("verification") {
  FiniteMetricSpace grid = FiniteMetricSpace::interval_grid(21);
  CPApproximation id = identity_approximation(grid);
  std::vector<Function> a{coordinate(grid), coordinate(grid).array().square().matrix()};
  ApproxVerification v = verify_cp_approx(id, a, 1e-12);
  for (double e : v.errors) CHECK(e == 0.0);
  CHECK(v.phi_order.upper == 0);

  CPApproximation doubled = id;
  doubled.phi = CPMap::from_matrix(id.phi.domain(), id.phi.codomain(), id.phi.images() * Complex(2, 0),
                                   CodomainKind::functions);
  ApproxVerification d = verify_cp_approx(doubled, a, 0.1);
  CHECK_FALSE(d.phi_contractive);
  CHECK(d.phi_norm == doctest::Approx(2.0));
}

TEST_CASE("tensoring an approximation") {
  FiniteMetricSpace grid = FiniteMetricSpace::interval_grid(51);
  std::vector<Function> a{coordinate(grid)};
  CPApproximation approx = build_cp_approx(grid, a, 0.2);
  CPApproximation one = tensor_approx(approx, 1);
  CHECK(map_distance_units(one.phi, approx.phi) == 0.0);

  CPApproximation t = tensor_approx(approx, 2);
  CHECK(t.matrix_size == 2);
  Rng rng(51);
  Matrix b = random_contraction(Algebra::matrix(2), rng).block(0);
  std::vector<Element> probes{function_tensor(a[0], b)};
  ApproxVerification v = verify_cp_approx(t, probes, 0.2);
  double scalar = verify_cp_approx(approx, a, 0.2).max_error;
  CHECK(v.max_error <= scalar * operator_norm(b) + 1e-12);
  CHECK(v.phi_order.upper <= strict_order_abelian(approx.phi));
}

TEST_CASE("direct sums") {
  FiniteMetricSpace g1 = FiniteMetricSpace::interval_grid(31);
  FiniteMetricSpace g2 = FiniteMetricSpace::interval_grid(41, 0.0, 2.0);
  CPApproximation a1 = build_cp_approx(g1, {coordinate(g1)}, 0.2);
  CPApproximation a2 = build_cp_approx(g2, {coordinate(g2)}, 0.3);
  CPApproximation same = direct_sum_approx(a1, std::nullopt);
  CHECK(map_distance_units(same.phi, a1.phi) == 0.0);

  CPApproximation s = direct_sum_approx(a1, a2);
  CHECK(s.space.size() == 72);
  CHECK(s.space.distance(0, 31) == doctest::Approx(1 + 2.0));
  Function joined(72);
  joined << coordinate(g1), coordinate(g2);
  double e1 = verify_cp_approx(a1, {coordinate(g1)}, 1).max_error;
  double e2 = verify_cp_approx(a2, {coordinate(g2)}, 1).max_error;
  CHECK(verify_cp_approx(s, {joined}, 1).max_error == doctest::Approx(std::max(e1, e2)));
  CHECK(strict_order_abelian(s.phi) == std::max(strict_order_abelian(a1.phi), strict_order_abelian(a2.phi)));
}

TEST_CASE("approximation through 2x2 blocks") {
  FiniteMetricSpace circle = FiniteMetricSpace::circle_grid(31);
  CPApproximation m = matrix_pair_approximation(circle, 5);
  CHECK_FALSE(m.F().is_abelian());
  std::vector<Function> a{coordinate(circle, 0), coordinate(circle, 1)};
  ApproxVerification v = verify_cp_approx(m, a, 1e-9);
  CHECK(v.max_error < 1e-12);
  CHECK(v.psi_cp);
  CHECK(v.phi_cp);
  CHECK(v.phi_order.lower == 1);
  CHECK(v.phi_order.upper == 1);
}

TEST_CASE("extraction constants") {
  for (int n = 0; n <= 3; ++n) {
    ExtractionConstants c = extraction_constants(n);
    CHECK(c.C == doctest::Approx(1.0 / (2 * (n + 1))));
    CHECK(c.beta == doctest::Approx(1.0 / (4 * (n + 1))));
    CHECK(c.eta / c.C <= 1.0 / (n + 2));
    CHECK(c.theta * c.alpha == doctest::Approx(1.0));
    CHECK(c.alpha > 1.0);
    CHECK(c.eta > 0.0);
  }
}

TEST_CASE("extracting a cover on the interval") {
  FiniteMetricSpace grid = FiniteMetricSpace::interval_grid(201);
  Cover u = fx::interval_chain(grid);
  ExtractionSetup setup = extraction_setup(grid, u, 1);
  CHECK(max_member_diameter(grid, setup.fine) < setup.fine_bound);
  CPApproximation approx = approximation_for_setup(grid, setup);
  ExtractionReport r = extract_cover(grid, u, 1, approx, setup);
  CHECK(r.covers);
  CHECK(r.order <= 1);
  CHECK(r.refinement.ok);
  for (const auto& s : r.steps) CHECK_MESSAGE(s.holds, s.name);

  ExtractionReport m = extract_cover(grid, u, 1, matrix_pair_approximation(grid, 3), setup);
  CHECK(m.covers);
  CHECK(m.order <= 1);
  CHECK(m.refinement.ok);
}

TEST_CASE("extracting a cover on the circle") {
  FiniteMetricSpace circle = FiniteMetricSpace::circle_grid(120);
  Cover u = fx::three_arcs(120);
  ExtractionReport r = extract_cover(circle, u, 1, approximation_for_setup(circle, extraction_setup(circle, u, 1)));
  CHECK(r.covers);
  CHECK(r.order <= 1);
  CHECK(r.refinement.ok);
}

TEST_CASE("extraction on a single point") {
  Eigen::MatrixXd pts(1, 1);
  pts << 0;
  FiniteMetricSpace one = FiniteMetricSpace::euclidean(pts);
  Cover u(std::vector<std::vector<int>>{{0}});
  ExtractionReport r = extract_cover(one, u, 1, approximation_for_setup(one, extraction_setup(one, u, 1)));
  CHECK(r.w.members == std::vector<std::vector<int>>{{0}});
}

TEST_CASE("extraction refuses approximations of too large order") {
  FiniteMetricSpace grid = FiniteMetricSpace::interval_grid(41);
  Cover u = fx::interval_chain(grid);
  // phi maps every generator to the constant 1/s: strict order s - 1.
  const int s = 3;
  Algebra f = Algebra::abelian(s);
  Matrix phi_m = Matrix::Constant(grid.size(), s, 1.0 / s);
  Matrix psi_m = Matrix::Zero(s, grid.size());
  for (int k = 0; k < s; ++k) psi_m(k, k) = 1;
  CPApproximation bad{grid, 1, CPMap::from_matrix(Algebra::abelian(grid.size()), f, psi_m),
                      CPMap::from_matrix(f, Algebra::abelian(grid.size()), phi_m, CodomainKind::functions),
                      {0, 1, 2}, std::nullopt};
  CHECK_THROWS_AS(extract_cover(grid, u, 1, bad), PreconditionError);
}

TEST_CASE("a poor approximation fails at a named step") {
  FiniteMetricSpace grid = FiniteMetricSpace::interval_grid(41);
  Cover u = fx::interval_chain(grid);
  ExtractionSetup setup = extraction_setup(grid, u, 1);
  // Half of the identity: phi(1) = 1/2 everywhere.
  CPApproximation half = identity_approximation(grid);
  half.phi = CPMap::from_matrix(half.phi.domain(), half.phi.codomain(), half.phi.images() * Complex(0.5, 0),
                                CodomainKind::functions);
  try {
    extract_cover(grid, u, 1, half, setup);
    FAIL("expected a pipeline error");
  } catch (const PipelineError& e) {
    CHECK(e.step().rfind("linearity", 0) == 0);
  }
}

TEST_CASE("dimension estimates at scale") {
  FiniteMetricSpace grid = FiniteMetricSpace::interval_grid(101);
  CprEstimate line = estimate_cpr_commutative(grid, {0.02, 0.05, 0.1}, {coordinate(grid)});
  CHECK(line.value == 1);
  CHECK(line.scales.size() == 3);

  FiniteMetricSpace circle = FiniteMetricSpace::circle_grid(100);
  CHECK(estimate_cpr_commutative(circle, {0.02, 0.05, 0.1}, {}).value == 1);

  Eigen::MatrixXd pts(6, 1);
  for (int i = 0; i < 6; ++i) pts(i, 0) = 10.0 * i;
  FiniteMetricSpace discrete = FiniteMetricSpace::euclidean(pts);
  CHECK(estimate_cpr_commutative(discrete, {0.5, 1.0}, {}).value == 0);

  FiniteMetricSpace torus = FiniteMetricSpace::torus_grid(12);
  CHECK(estimate_cpr_commutative(torus, {0.15, 0.2}, {}).value == 2);
}
