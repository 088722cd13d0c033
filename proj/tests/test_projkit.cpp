#include <doctest.h>

#include <cmath>

#include "cpr/error.hpp"
#include "cpr/projkit.hpp"
#include "cpr/random.hpp"

using namespace cpr;

namespace {

Element diag(std::initializer_list<double> v) {
  Matrix m = Matrix::Zero(v.size(), v.size());
  int i = 0;
  for (double x : v) m(i, i) = x, ++i;
  return Element::from_matrix(m);
}

Element rank_one(const Vector& v) { return Element::from_matrix(v * v.adjoint() / v.squaredNorm()); }

Matrix rotation(double t) {
  Matrix r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

}  // namespace

TEST_CASE("repair of a diagonal almost-projection") {
  RepairResult r = repair_almost_projection(diag({0.1, 0.9}), 0.1);
  CHECK(norm(r.p - diag({0, 1})) < 1e-14);
  CHECK(r.dist_p_h == doctest::Approx(0.1));
  CHECK(r.dist_p_h < 0.2);
  CHECK(norm(r.c - diag({0, 1 / std::sqrt(0.9)})) < 1e-12);
  CHECK(r.dist_p_c < 0.4);
  CHECK(r.chc_defect < 1e-12);
}

TEST_CASE("repair leaves projections alone") {
  Element h = diag({1, 0, 1});
  RepairResult r = repair_almost_projection(h, 0.05);
  CHECK(norm(r.p - h) < 1e-14);
  CHECK(norm(r.c - h) < 1e-12);
}

TEST_CASE("repair commutes with unitary conjugation") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix u = random_unitary(2, rng);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 0.05;
    d(1, 1) = 0.95;
    RepairResult r = repair_almost_projection(Element::from_matrix(u * d * u.adjoint()), 0.1);
    Matrix expect = u.col(1) * u.col(1).adjoint();
    CHECK((Matrix(r.p.block(0)) - expect).norm() < 1e-12);
  }
}

TEST_CASE("repair rejects eps outside the admissible range") {
  CHECK_THROWS_AS(repair_almost_projection(diag({0.3, 0.9}), 0.1), PreconditionError);
  CHECK_THROWS_AS(repair_almost_projection(diag({0.1, 0.9}), 0.3), PreconditionError);
}

TEST_CASE("pair orthogonalization in closed form") {
  const double s = 0.02, c = std::sqrt(1 - s * s);
  Vector e1(2), v(2), w(2);
  e1 << 1, 0;
  v << s, c;
  w << c, -s;  // unit vector in span(e1, v) orthogonal to v
  Element p = rank_one(e1), q = rank_one(v);
  PairResult r = orthogonalize_pair(p, q, s);
  CHECK(norm(r.p_tilde - rank_one(w)) < 1e-12);
  CHECK(r.residual < 1e-12);
  CHECK(r.deviation == doctest::Approx(s).epsilon(1e-9));
  CHECK(r.deviation <= 0.28);

  Element zero(Algebra::matrix(2));
  CHECK(norm(orthogonalize_pair(p, zero, 0.0).p_tilde - p) < 1e-14);
  CHECK(norm(orthogonalize_pair(p, rank_one((Vector(2) << 0, 1).finished()), 0.0).p_tilde - p) < 1e-14);
}

TEST_CASE("alpha_for") {
  CHECK(alpha_for(1, 0.1) == kAlphaCap);
  CHECK(alpha_for(1, 0.1, 1) == kAlphaCap);
  CHECK(alpha_for(1, 0.1, 40) == doctest::Approx(42.0 / 40));
  // K = 2: the only constraint is 14 delta <= beta with delta^2 = alpha (alpha - 1).
  const double d = 0.25 / 14;
  const double root = (1 + std::sqrt(1 + 4 * d * d)) / 2;
  const double a2 = alpha_for(2, 0.25);
  CHECK(a2 == doctest::Approx(root).epsilon(1e-12));
  CHECK(a2 - 1 == doctest::Approx(3.188e-4).epsilon(1e-3));
  auto sched = orthogonalization_schedule(2, a2);
  CHECK(sched.back() <= 0.25 + 1e-12);
  for (int k = 1; k <= 6; ++k) CHECK(alpha_for(k + 1, 0.1) <= alpha_for(k, 0.1));
  for (int k = 2; k <= 6; ++k) {
    auto s = orthogonalization_schedule(k, alpha_for(k, 0.05));
    for (double x : s) CHECK(x <= 0.05 * (1 + 1e-9));
  }
}

TEST_CASE("family orthogonalization") {
  Algebra m3 = Algebra::matrix(3);
  std::vector<Element> orth{Element::unit(m3, 0, 0, 0), Element::unit(m3, 0, 2, 2)};
  FamilyResult r = orthogonalize_family(orth, 1.01);
  CHECK(r.unchanged);
  CHECK(norm(r.projections[1] - orth[1]) == 0.0);

  FamilyResult one = orthogonalize_family({Element::unit(m3, 0, 1, 1)}, 1.01);
  CHECK(one.unchanged);

  const double t = 1e-4;  // ||q_1 + q_2|| = 1 + sin t
  Vector a(3), b(3);
  a << 1, 0, 0;
  b << std::sin(t), std::cos(t), 0;
  std::vector<Element> q{rank_one(a), rank_one(b)};
  const double alpha = alpha_for(2, 0.25);
  REQUIRE(norm(q[0] + q[1]) <= alpha);
  FamilyResult f = orthogonalize_family(q, alpha);
  CHECK(max_pairwise_product(f.projections) < 1e-10);
  auto sched = orthogonalization_schedule(2, alpha);
  for (const auto& st : f.stages) CHECK(st.deviation <= st.bound + 1e-12);
  for (std::size_t i = 0; i < 2; ++i) CHECK(norm(f.projections[i] - q[i]) <= sched[i] + 1e-12);

  CHECK_THROWS_AS(orthogonalize_family({rank_one(a), rank_one(a)}, 1.01), PreconditionError);
}

TEST_CASE("connecting close projections") {
  Element p = diag({1, 0});
  ConnectResult same = connect_projections(p, p, 0.2);
  CHECK(norm(same.s - p) < 1e-14);

  const double t = std::asin(0.1);
  Matrix r = rotation(t);
  Element q = Element::from_matrix(r * Matrix(p.block(0)) * r.adjoint());
  ConnectResult c = connect_projections(p, q, 0.2);
  CHECK(c.distance == doctest::Approx(0.1));
  Element expect = Element::from_matrix(r * Matrix(p.block(0)));
  CHECK(norm(c.s - expect) < 1e-12);
  CHECK(norm(c.s.adjoint() * c.s - p) < 1e-12);
  CHECK(norm(c.s * c.s.adjoint() - q) < 1e-12);
  CHECK(c.deviation < 0.8);

  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix u = random_unitary(4, rng);
    Matrix v = unitary_near(Matrix::Identity(4, 4), 0.05, rng);
    Matrix pp = u.leftCols(2) * u.leftCols(2).adjoint();
    Element pe = Element::from_matrix(pp), qe = Element::from_matrix(v * pp * v.adjoint());
    if (norm(pe - qe) >= 0.2) continue;
    ConnectResult k = connect_projections(pe, qe, 0.2);
    CHECK(k.isometry_defect <= 1e-10);
    CHECK(k.deviation < 0.8);
  }
}

TEST_CASE("almost-unit validator") {
  Element one = diag({1, 1});
  AlmostUnitCheck a = check_almost_unit(one, one, one);
  CHECK(a.ok);
  CHECK(a.lhs == doctest::Approx(0.0));
  CHECK(a.rhs == doctest::Approx(0.0));

  AlmostUnitCheck b = check_almost_unit(diag({0.91, 1}), diag({0.95, 1}), diag({1, 0}));
  CHECK(b.lhs == doctest::Approx(0.05));
  CHECK(b.rhs == doctest::Approx(0.3));
  CHECK(b.ok);

  Rng rng(9);
  std::uniform_int_distribution<int> size(1, 5);
  for (int trial = 0; trial < 2000; ++trial) {
    Algebra m = Algebra::matrix(size(rng));
    const int n = m.block_size(0);
    RealVector dv(n), kv(n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < n; ++i) dv(i) = unit(rng), kv(i) = unit(rng);
    Matrix d = random_psd(dv, rng);
    Matrix k = random_psd(kv, rng);
    Element de = Element::from_matrix(d);
    Element root = apply_function(de, ScalarFunction::custom("sqrt", [](double x) { return std::sqrt(std::max(x, 0.0)); }));
    Element h = root * Element::from_matrix(k) * root;
    AlmostUnitCheck c = check_almost_unit(h, de, random_contraction(m, rng));
    CHECK(c.ok);
  }
}

TEST_CASE("invertible sum witness") {
  Matrix e11 = Matrix::Zero(1, 1);
  e11(0, 0) = 1;
  InvertibleSumWitness one = invertible_sum_witness(1, e11, Matrix::Identity(1, 1), 0.5, 0);
  CHECK(one.min_eigenvalue == doctest::Approx(1.0));

  Matrix p = Matrix::Zero(2, 2);
  p(0, 0) = 1;
  InvertibleSumWitness two = invertible_sum_witness(2, p, Matrix::Identity(2, 2), 0.5, 7);
  CHECK(two.unitaries.size() == 2);
  CHECK(std::isfinite(two.lambda));
  Matrix sum = Matrix::Zero(2, 2);
  for (const auto& u : two.unitaries) {
    sum += u.adjoint() * p * u;
    CHECK((u - Matrix::Identity(2, 2)).norm() < 0.5 * std::sqrt(2.0) + 1e-12);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(two.lambda * sum);
  CHECK(es.eigenvalues()(0) >= 1 - 1e-9);

  UnitarySampler stuck = [](const Matrix& c, double, Rng&) { return c; };
  CHECK_THROWS_AS(invertible_sum_witness(2, p, Matrix::Identity(2, 2), 0.5, 7, 5, stuck), PipelineError);

  int calls = 0;
  UnitarySampler once = [&calls](const Matrix& c, double r, Rng& g) {
    return calls++ < 2 ? c : unitary_near(c, r, g);
  };
  InvertibleSumWitness resampled = invertible_sum_witness(2, p, Matrix::Identity(2, 2), 0.5, 7, 5, once);
  CHECK(resampled.attempts >= 2);
}

TEST_CASE("trace-rank validator") {
  Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 4;
    std::vector<Matrix> a;
    Matrix u = random_unitary(n, rng);
    const int k = 1 + trial % (n + 1);
    for (int i = 0; i < k && i < n; ++i) a.push_back(0.99 * u.col(i) * u.col(i).adjoint());
    TraceRankCheck c = trace_rank_check(a);
    CHECK(c.bound_holds);
    CHECK(c.hypotheses_hold == (0.99 > double(n) / (n + 1)));
  }
  std::vector<Matrix> too_small{Matrix::Identity(2, 2) * 0.4, Matrix::Identity(2, 2) * 0.4};
  CHECK_FALSE(trace_rank_check(too_small).hypotheses_hold);
}
