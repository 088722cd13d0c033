#include <doctest.h>

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "cpr/error.hpp"
#include "cpr/matfun.hpp"
#include "cpr/random.hpp"

using namespace cpr;

namespace {

Element diag(std::initializer_list<double> v) {
  Matrix m = Matrix::Zero(v.size(), v.size());
  int i = 0;
  for (double x : v) m(i, i) = x, ++i;
  return Element::from_matrix(m);
}

// Real roots of the characteristic polynomial of a 3x3 hermitian matrix, as
// eigenvalues of the companion matrix built from trace invariants.
std::vector<double> companion_roots(const Matrix& a) {
  const double c2 = a.trace().real();
  const double c1 = 0.5 * (c2 * c2 - (a * a).trace().real());
  const double c0 = a.determinant().real();
  Eigen::Matrix3d comp;
  comp << 0, 0, c0, 1, 0, -c1, 0, 1, c2;
  Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
  std::vector<double> roots;
  for (int i = 0; i < 3; ++i) roots.push_back(es.eigenvalues()(i).real());
  std::sort(roots.begin(), roots.end());
  return roots;
}

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("algebra layout") {
  Algebra a({2, 3});
  CHECK(a.dimension() == 13);
  CHECK(a.offset(1) == 4);
  CHECK(a.unit_flat(1, 2, 1) == 4 + 1 * 3 + 2);
  UnitIndex u = a.unit(7);
  CHECK(u == UnitIndex{1, 0, 1});
  CHECK_FALSE(a.is_abelian());
  CHECK(Algebra::abelian(4).is_abelian());
  CHECK_THROWS_AS(Algebra({2}, 1), Error);
}

TEST_CASE("spectrum examples") {
  auto s = spectrum(diag({0.3, 0.7}));
  CHECK(s[0] == doctest::Approx(0.3));
  CHECK(s[1] == doctest::Approx(0.7));
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  s = spectrum(Element::from_matrix(x));
  CHECK(s[0] == doctest::Approx(-1));
  CHECK(s[1] == doctest::Approx(1));
  CHECK_THROWS_AS(spectrum(Element::from_matrix(mat2(0, 1, 0, 0))), PreconditionError);
}

TEST_CASE("spectrum agrees with companion-matrix roots") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix h = random_hermitian(3, rng, 1.0 + trial % 5);
    auto s = spectrum(Element::from_matrix(h));
    auto r = companion_roots(h);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(s[i] - r[i]) <= 1e-8);
  }
}

TEST_CASE("eigenvectors are orthonormal with fixed phase") {
  Rng rng(3);
  Element a(Algebra({2, 4}));
  a.block(0) = random_hermitian(2, rng);
  a.block(1) = random_hermitian(4, rng);
  Eigendecomposition e = eigendecompose(a);
  for (int b = 0; b < 2; ++b) {
    const Matrix& v = e.vectors[b];
    CHECK((v.adjoint() * v - Matrix::Identity(v.rows(), v.rows())).norm() < 1e-12);
    Matrix rec = v * e.values[b].cast<Complex>().asDiagonal() * v.adjoint();
    CHECK((rec - Matrix(a.block(b))).norm() < 1e-12);
    for (int k = 0; k < v.cols(); ++k) {
      int i = 0;
      while (std::abs(v(i, k)) <= 1e-12) ++i;
      CHECK(std::abs(v(i, k).imag()) < 1e-14);
      CHECK(v(i, k).real() > 0);
    }
  }
}

TEST_CASE("functional calculus examples") {
  Element f = apply_function(diag({0.1, 0.5, 0.9}), ScalarFunction::cut_down(0.2, 0.2));
  CHECK((f - diag({0, 0.5, 0.9})).coefficients().norm() < 1e-14);

  Rng rng(5);
  Matrix u = random_unitary(2, rng);
  Element h = Element::from_matrix(u * Matrix(diag({0.05, 0.95}).block(0)) * u.adjoint());
  Element p = apply_function(h, ScalarFunction::gapped_threshold(0.05));
  CHECK(norm(p * p - p) <= 1e-12);
  Matrix expect = u.col(1) * u.col(1).adjoint();
  CHECK((Matrix(p.block(0)) - expect).norm() < 1e-12);

  Element h2 = diag({0.02, 0.98});
  Element fm = apply_function(h2, ScalarFunction::gap_inverse(0.02));
  Element g = apply_function(h2, ScalarFunction::gapped_threshold(0.02));
  CHECK(norm(fm * h2 - g) < 1e-12);
  CHECK(norm(h2 * fm - g) < 1e-12);

  CHECK_THROWS_AS(apply_function(diag({0.3, 0.9}), ScalarFunction::gapped_threshold(0.1)), PreconditionError);
}

TEST_CASE("threshold and ramp") {
  auto g = ScalarFunction::threshold(0.5);
  CHECK(g(0.49) == 0.0);
  CHECK(g(0.5) == 1.0);
  auto r = ScalarFunction::ramp(0.2, 0.2);
  CHECK(r(0.2) == 0.0);
  CHECK(r(0.3) == doctest::Approx(0.5));
  CHECK(r(0.5) == 1.0);
  auto c = ScalarFunction::inverse_sqrt_on_support(1e-6);
  CHECK(c(0.25) == doctest::Approx(2.0));
  CHECK(c(1e-8) == 0.0);
}

TEST_CASE("support projection") {
  CHECK(norm(support_projection(diag({0, 0.3})) - diag({0, 1})) < 1e-14);
  CHECK(norm(support_projection(diag({0, 0}))) == 0.0);
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    RealVector ev(5);
    int rank = 0;
    for (int i = 0; i < 5; ++i) {
      ev(i) = (i + trial) % 3 == 0 ? 0.0 : 0.1 + 0.2 * i;
      rank += ev(i) > kDefaultRankCut;
    }
    Element p = support_projection(Element::from_matrix(random_psd(ev, rng)));
    CHECK(validate(p, Predicate::projection).ok);
    CHECK(std::round(Matrix(p.block(0)).trace().real()) == rank);
  }
}

TEST_CASE("norms") {
  CHECK(norm(diag({0.3, -0.7})) == doctest::Approx(0.7));
  Rng rng(2);
  Matrix u = random_unitary(3, rng);
  Matrix p = u.leftCols(2) * u.leftCols(2).adjoint();
  CHECK(norm(Element::from_matrix(p)) == doctest::Approx(1.0));
  for (int trial = 0; trial < 50; ++trial) {
    Element a = Element::from_matrix(random_gaussian(4, 4, rng));
    double n = norm(a);
    CHECK(norm(a.adjoint() * a) == doctest::Approx(n * n).epsilon(1e-12));
    Eigen::JacobiSVD<Matrix> svd(Matrix(a.block(0)));
    CHECK(n == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));
  }
}

TEST_CASE("validation") {
  Algebra a({2, 1});
  CHECK(validate(Element::identity(a), Predicate::projection).ok);
  auto v = validate(diag({0.5, 1}), Predicate::projection, 1e-9);
  CHECK_FALSE(v.ok);
  CHECK(v.defect == doctest::Approx(0.25));
  CHECK(validate(diag({-0.1, 1}), Predicate::hermitian).ok);
  CHECK_FALSE(validate(diag({-0.1, 1}), Predicate::positive).ok);
  CHECK_FALSE(validate(diag({0.5, 1.5}), Predicate::contraction).ok);
}

TEST_CASE("element arithmetic") {
  Algebra a({1, 2});
  Element x = Element::unit(a, 1, 0, 1);
  Element y = Element::unit(a, 1, 1, 0);
  CHECK(norm(x * y - Element::unit(a, 1, 0, 0)) == 0.0);
  CHECK(norm(x.adjoint() - y) == 0.0);
  Element z = Element::block_identity(a, 0) * Complex(2, 0) + x;
  CHECK(z.coefficients()(0) == Complex(2, 0));
  CHECK_THROWS_AS(x + Element::identity(Algebra::abelian(5)), Error);
  Matrix k = kron(Matrix::Identity(2, 2), mat2(1, 2, 3, 4));
  CHECK(k(3, 2) == Complex(3, 0));
}
