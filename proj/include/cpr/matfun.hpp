#pragma once

// Finite-dimensional C*-algebras M_{r_1} + ... + M_{r_m}, their elements, and
// hermitian functional calculus.
//
// Elements store all blocks in one contiguous column-major buffer. The flat
// index of the matrix unit e_{jk} of block i is offset(i) + k * r_i + j, so
// the coefficient vector of an element and its storage coincide.

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cpr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kDefaultRankCut = 1e-6;
inline constexpr int kDefaultMaxBlock = 64;

struct UnitIndex {
  int block = 0;
  int row = 0;
  int col = 0;
  bool operator==(const UnitIndex&) const = default;
};

/// A direct sum of full matrix algebras, described by its block sizes.
///
/// Copies are cheap (shared immutable storage).
class Algebra {
 public:
  /// Throws SchemaError on an empty list, a block size < 1, or a block
  /// larger than `max_block`.
  explicit Algebra(std::vector<int> block_sizes, int max_block = kDefaultMaxBlock);

  /// C^n: n blocks of size one (functions on n points).
  static Algebra abelian(int n);
  /// M_n: a single block.
  static Algebra matrix(int n, int max_block = kDefaultMaxBlock);
  /// The zero algebra (no blocks). Only used as the neutral element of
  /// direct sums.
  static Algebra zero();

  int block_count() const noexcept;
  int block_size(int i) const;
  std::span<const int> block_sizes() const noexcept;
  int offset(int i) const;
  /// sum of r_i^2, also the number of matrix units.
  int dimension() const noexcept;
  /// sum of r_i, the size of the defining representation.
  int total_size() const noexcept;
  bool is_abelian() const noexcept;
  bool is_zero() const noexcept { return block_count() == 0; }

  UnitIndex unit(int flat) const;
  int unit_flat(int block, int row, int col) const;

  /// Direct sum (block lists concatenated).
  Algebra operator+(const Algebra& other) const;

  friend bool operator==(const Algebra& a, const Algebra& b);

  struct Data;  // opaque, defined in matfun.cpp

 private:
  explicit Algebra(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

/// Block-diagonal element of an Algebra.
class Element {
 public:
  /// Zero element.
  explicit Element(Algebra algebra);
  /// Throws SchemaError if the block shapes do not match the algebra.
  Element(Algebra algebra, const std::vector<Matrix>& blocks);
  /// Element of C^n from its values.
  static Element from_values(const Vector& values);
  static Element from_values(const RealVector& values);
  /// Element of M_n from a square matrix.
  static Element from_matrix(const Matrix& m);
  /// Element from its coefficients with respect to the matrix units.
  static Element from_coefficients(Algebra algebra, Vector coefficients);

  static Element identity(const Algebra& algebra);
  static Element unit(const Algebra& algebra, int block, int row, int col);
  static Element unit(const Algebra& algebra, int flat);
  /// The unit 1_i of block i.
  static Element block_identity(const Algebra& algebra, int block);

  const Algebra& algebra() const noexcept { return algebra_; }
  int block_count() const noexcept { return algebra_.block_count(); }

  Eigen::Map<const Matrix> block(int i) const;
  Eigen::Map<Matrix> block(int i);
  std::vector<Matrix> blocks() const;

  /// Coefficients with respect to the matrix units (flat storage).
  const Vector& coefficients() const noexcept { return data_; }
  Vector& coefficients() noexcept { return data_; }

  Element adjoint() const;

  Element& operator+=(const Element& o);
  Element& operator-=(const Element& o);
  Element& operator*=(Complex s);

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Element a, Complex s) { return a *= s; }
  friend Element operator*(Complex s, Element a) { return a *= s; }
  friend Element operator*(const Element& a, const Element& b);

 private:
  Element(Algebra algebra, Vector data) : algebra_(std::move(algebra)), data_(std::move(data)) {}
  void require_same_algebra(const Element& o) const;

  Algebra algebra_;
  Vector data_;
};

/// Operator norm: the largest singular value over all blocks.
double norm(const Element& a);

/// Largest entry of |a - a*|.
double hermitian_defect(const Element& a);

/// Orthonormal eigendecomposition of each hermitian block, eigenvalues
/// ascending. The eigenvector phases are fixed so that the first entry with
/// modulus above 1e-12 is real and positive.
struct Eigendecomposition {
  std::vector<RealVector> values;
  std::vector<Matrix> vectors;
};

/// Throws PreconditionError if `a` is not hermitian within `tol`.
Eigendecomposition eigendecompose(const Element& a, double tol = kDefaultTol);

/// All eigenvalues of a hermitian element, merged and sorted ascending.
std::vector<double> spectrum(const Element& a, double tol = kDefaultTol);

/// Per-block eigenvalues, ascending within each block.
std::vector<std::vector<double>> block_spectra(const Element& a, double tol = kDefaultTol);

/// Smallest eigenvalue over all blocks of a hermitian element.
double min_eigenvalue(const Element& a, double tol = kDefaultTol);

/// Real scalar function applied through the spectral theorem.
class ScalarFunction {
 public:
  enum class Kind {
    identity,
    cut_down,                 // f_{alpha,eps}: 0 up to alpha, t beyond alpha+eps
    ramp,                     // g_{alpha,eps}: 0 up to alpha, 1 beyond alpha+eps
    threshold,                // g_alpha: indicator of [alpha, inf)
    gapped_threshold,         // g_{1/2} on spectra inside [0,eps] u [1-eps,1]
    gap_inverse,              // f^-: inverse of h on g_{1/2}(h), same gap
    inverse_on_support,       // 1/t above a rank cut, 0 below
    inverse_sqrt_on_support,  // t^{-1/2} above a rank cut, 0 below
    custom,
  };

  static ScalarFunction identity();
  static ScalarFunction cut_down(double alpha, double eps);
  static ScalarFunction ramp(double alpha, double eps);
  static ScalarFunction threshold(double alpha);
  static ScalarFunction gapped_threshold(double eps);
  static ScalarFunction gap_inverse(double eps);
  static ScalarFunction inverse_on_support(double cut = kDefaultRankCut);
  static ScalarFunction inverse_sqrt_on_support(double cut = kDefaultRankCut);
  /// Arbitrary function on the closed interval [lo, hi].
  static ScalarFunction custom(std::string name, std::function<double(double)> f,
                               double lo = -INFINITY, double hi = INFINITY);

  /// outer o (*this), defined on this function's domain.
  ScalarFunction then(const ScalarFunction& outer) const;

  double operator()(double t) const { return eval_(t); }

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  double eps() const noexcept { return eps_; }
  const std::string& name() const noexcept { return name_; }

  /// Throws PreconditionError naming the offending eigenvalue if `t` lies
  /// outside the domain or violates the gap hypothesis of gapped kinds.
  void check_argument(double t, double tol) const;

 private:
  ScalarFunction(Kind kind, std::string name, std::function<double(double)> eval);

  Kind kind_;
  std::string name_;
  std::function<double(double)> eval_;
  double alpha_ = 0.0;
  double eps_ = 0.0;
  double lo_ = -INFINITY;
  double hi_ = INFINITY;
  bool gapped_ = false;
};

/// f(a) computed eigenvalue-wise in each block. `a` must be hermitian.
Element apply_function(const Element& a, const ScalarFunction& f, double tol = kDefaultTol);

/// The smallest projection P with P a = a P = a: eigenvalues above
/// `rank_cut` become 1. Throws PreconditionError on an eigenvalue below -tol.
Element support_projection(const Element& a, double rank_cut = kDefaultRankCut,
                           double tol = kDefaultTol);

enum class Predicate { hermitian, positive, projection, contraction };

struct Validation {
  bool ok = false;
  double defect = 0.0;
};

/// Defects: hermitian -> asymmetry; positive -> max(asymmetry, -lambda_min);
/// projection -> max(asymmetry, ||a^2 - a||); contraction -> ||a|| - 1.
Validation validate(const Element& a, Predicate predicate, double tol = kDefaultTol);

std::string to_string(Predicate p);

/// Kronecker product a (x) b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Largest singular value of a dense matrix.
double operator_norm(const Matrix& m);

}  // namespace cpr
