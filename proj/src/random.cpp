#include "cpr/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace cpr {

Matrix random_gaussian(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      double re = g(rng);
      double im = g(rng);
      m(r, c) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  return m;
}

Matrix random_unitary(int n, Rng& rng) {
  Matrix z = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    double m = std::abs(r(k, k));
    if (m > 0) q.col(k) *= r(k, k) / m;
  }
  return q;
}

Matrix random_hermitian(int n, Rng& rng, double scale) {
  Matrix g = random_gaussian(n, n, rng);
  Matrix h = 0.5 * (g + g.adjoint());
  double nrm = operator_norm(h);
  if (nrm == 0.0) return Matrix::Identity(n, n) * scale;
  return h * (scale / nrm);
}

Matrix exp_i_hermitian(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (h + h.adjoint())));
  Vector phases(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, es.eigenvalues()(k));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix unitary_near(const Matrix& center, double radius, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int n = static_cast<int>(center.rows());
  Matrix h = random_hermitian(n, rng, radius * u(rng));
  return center * exp_i_hermitian(h);
}

Matrix random_psd(const RealVector& eigenvalues, Rng& rng) {
  int n = static_cast<int>(eigenvalues.size());
  Matrix u = random_unitary(n, rng);
  return u * eigenvalues.cast<Complex>().asDiagonal() * u.adjoint();
}

Element random_contraction(const Algebra& algebra, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Element a(algebra);
  for (int i = 0; i < algebra.block_count(); ++i) {
    int r = algebra.block_size(i);
    a.block(i) = random_gaussian(r, r, rng);
  }
  double n = norm(a);
  if (n > 0) a *= Complex(u(rng) / n);
  return a;
}

Element random_hermitian_contraction(const Algebra& algebra, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Element a(algebra);
  for (int i = 0; i < algebra.block_count(); ++i) {
    a.block(i) = random_hermitian(algebra.block_size(i), rng);
  }
  double n = norm(a);
  if (n > 0) a *= Complex(u(rng) / n);
  return a;
}

}  // namespace cpr
