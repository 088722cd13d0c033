#include "cpr/matfun.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cpr/error.hpp"

namespace cpr {

struct Algebra::Data {
  std::vector<int> sizes;
  std::vector<int> offsets;
  int dimension = 0;
  int total = 0;
  bool abelian = true;
};

namespace {

std::shared_ptr<const Algebra::Data> make_data(std::vector<int> sizes) {
  auto d = std::make_shared<Algebra::Data>();
  d->offsets.reserve(sizes.size());
  for (int r : sizes) {
    d->offsets.push_back(d->dimension);
    d->dimension += r * r;
    d->total += r;
    d->abelian = d->abelian && r == 1;
  }
  d->sizes = std::move(sizes);
  return d;
}

}  // namespace

Algebra::Algebra(std::vector<int> block_sizes, int max_block) {
  if (block_sizes.empty()) throw SchemaError("algebra needs at least one block");
  for (int r : block_sizes) {
    if (r < 1) throw SchemaError("block size must be >= 1, got " + std::to_string(r));
    if (r > max_block) {
      throw SchemaError("block size " + std::to_string(r) + " exceeds the configured cap " +
                        std::to_string(max_block));
    }
  }
  d_ = make_data(std::move(block_sizes));
}

Algebra Algebra::abelian(int n) { return Algebra(std::vector<int>(static_cast<size_t>(n), 1)); }

Algebra Algebra::matrix(int n, int max_block) { return Algebra({n}, max_block); }

Algebra Algebra::zero() { return Algebra(make_data({})); }

int Algebra::block_count() const noexcept { return static_cast<int>(d_->sizes.size()); }
int Algebra::block_size(int i) const { return d_->sizes.at(static_cast<size_t>(i)); }
std::span<const int> Algebra::block_sizes() const noexcept { return d_->sizes; }
int Algebra::offset(int i) const { return d_->offsets.at(static_cast<size_t>(i)); }
int Algebra::dimension() const noexcept { return d_->dimension; }
int Algebra::total_size() const noexcept { return d_->total; }
bool Algebra::is_abelian() const noexcept { return d_->abelian; }

UnitIndex Algebra::unit(int flat) const {
  if (flat < 0 || flat >= dimension()) throw PreconditionError("matrix unit index out of range");
  auto it = std::upper_bound(d_->offsets.begin(), d_->offsets.end(), flat);
  int block = static_cast<int>(it - d_->offsets.begin()) - 1;
  int r = d_->sizes[static_cast<size_t>(block)];
  int local = flat - d_->offsets[static_cast<size_t>(block)];
  return {block, local % r, local / r};
}

int Algebra::unit_flat(int block, int row, int col) const {
  int r = block_size(block);
  if (row < 0 || row >= r || col < 0 || col >= r) {
    throw PreconditionError("matrix unit index out of range");
  }
  return offset(block) + col * r + row;
}

Algebra Algebra::operator+(const Algebra& other) const {
  std::vector<int> sizes = d_->sizes;
  sizes.insert(sizes.end(), other.d_->sizes.begin(), other.d_->sizes.end());
  return Algebra(make_data(std::move(sizes)));
}

bool operator==(const Algebra& a, const Algebra& b) {
  return a.d_ == b.d_ || a.d_->sizes == b.d_->sizes;
}

Element::Element(Algebra algebra)
    : algebra_(std::move(algebra)), data_(Vector::Zero(algebra_.dimension())) {}

Element::Element(Algebra algebra, const std::vector<Matrix>& blocks) : Element(std::move(algebra)) {
  if (static_cast<int>(blocks.size()) != algebra_.block_count()) {
    throw SchemaError("expected " + std::to_string(algebra_.block_count()) + " blocks, got " +
                      std::to_string(blocks.size()));
  }
  for (int i = 0; i < algebra_.block_count(); ++i) {
    const Matrix& b = blocks[static_cast<size_t>(i)];
    int r = algebra_.block_size(i);
    if (b.rows() != r || b.cols() != r) {
      throw SchemaError("block " + std::to_string(i) + " must be " + std::to_string(r) + "x" +
                        std::to_string(r));
    }
    block(i) = b;
  }
}

Element Element::from_values(const Vector& values) {
  Element e(Algebra::abelian(static_cast<int>(values.size())));
  e.data_ = values;
  return e;
}

Element Element::from_values(const RealVector& values) { return from_values(Vector(values.cast<Complex>())); }

Element Element::from_matrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw SchemaError("matrix must be square");
  return Element(Algebra::matrix(static_cast<int>(m.rows()), std::max<int>(kDefaultMaxBlock, static_cast<int>(m.rows()))),
                 std::vector<Matrix>{m});
}

Element Element::from_coefficients(Algebra algebra, Vector coefficients) {
  if (coefficients.size() != algebra.dimension()) {
    throw SchemaError("coefficient vector does not match the algebra dimension");
  }
  return Element(std::move(algebra), std::move(coefficients));
}

Element Element::identity(const Algebra& algebra) {
  Element e(algebra);
  for (int i = 0; i < algebra.block_count(); ++i) e.block(i).setIdentity();
  return e;
}

Element Element::unit(const Algebra& algebra, int block, int row, int col) {
  return unit(algebra, algebra.unit_flat(block, row, col));
}

Element Element::unit(const Algebra& algebra, int flat) {
  Element e(algebra);
  e.data_(flat) = 1.0;
  return e;
}

Element Element::block_identity(const Algebra& algebra, int block) {
  Element e(algebra);
  e.block(block).setIdentity();
  return e;
}

Eigen::Map<const Matrix> Element::block(int i) const {
  int r = algebra_.block_size(i);
  return {data_.data() + algebra_.offset(i), r, r};
}

Eigen::Map<Matrix> Element::block(int i) {
  int r = algebra_.block_size(i);
  return {data_.data() + algebra_.offset(i), r, r};
}

std::vector<Matrix> Element::blocks() const {
  std::vector<Matrix> out;
  out.reserve(static_cast<size_t>(block_count()));
  for (int i = 0; i < block_count(); ++i) out.emplace_back(block(i));
  return out;
}

Element Element::adjoint() const {
  if (algebra_.is_abelian()) return Element(algebra_, Vector(data_.conjugate()));
  Element out(algebra_);
  for (int i = 0; i < block_count(); ++i) out.block(i) = block(i).adjoint();
  return out;
}

void Element::require_same_algebra(const Element& o) const {
  if (!(algebra_ == o.algebra_)) throw PreconditionError("elements belong to different algebras");
}

Element& Element::operator+=(const Element& o) {
  require_same_algebra(o);
  data_ += o.data_;
  return *this;
}

Element& Element::operator-=(const Element& o) {
  require_same_algebra(o);
  data_ -= o.data_;
  return *this;
}

Element& Element::operator*=(Complex s) {
  data_ *= s;
  return *this;
}

Element operator*(const Element& a, const Element& b) {
  a.require_same_algebra(b);
  if (a.algebra_.is_abelian()) return Element(a.algebra_, Vector(a.data_.cwiseProduct(b.data_)));
  Element out(a.algebra_);
  for (int i = 0; i < a.block_count(); ++i) out.block(i).noalias() = a.block(i) * b.block(i);
  return out;
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  // Singular values directly: going through m*m would square away every
  // defect below about 1e-8, and the checks here work at 1e-10.
  if (m.rows() <= 16 && m.cols() <= 16) return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
  return Eigen::BDCSVD<Matrix>(m).singularValues()(0);
}

double norm(const Element& a) {
  if (a.algebra().is_abelian()) {
    return a.coefficients().size() == 0 ? 0.0 : a.coefficients().cwiseAbs().maxCoeff();
  }
  double n = 0.0;
  for (int i = 0; i < a.block_count(); ++i) n = std::max(n, operator_norm(a.block(i)));
  return n;
}

double hermitian_defect(const Element& a) {
  if (a.algebra().is_abelian()) {
    double d = 0.0;
    for (const Complex& z : a.coefficients()) d = std::max(d, 2.0 * std::abs(z.imag()));
    return d;
  }
  double d = 0.0;
  for (int i = 0; i < a.block_count(); ++i) {
    auto b = a.block(i);
    d = std::max(d, (b - b.adjoint()).cwiseAbs().maxCoeff());
  }
  return d;
}

namespace {

void require_hermitian(const Element& a, double tol) {
  double d = hermitian_defect(a);
  if (d > tol) {
    std::ostringstream os;
    os << "element is not hermitian: max asymmetry " << d << " exceeds tolerance " << tol;
    throw PreconditionError(os.str());
  }
}

void fix_phases(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      double m = std::abs(vectors(r, c));
      if (m > 1e-12) {
        vectors.col(c) *= std::conj(vectors(r, c)) / m;
        vectors(r, c) = m;
        break;
      }
    }
  }
}

}  // namespace

Eigendecomposition eigendecompose(const Element& a, double tol) {
  require_hermitian(a, tol);
  Eigendecomposition out;
  out.values.reserve(static_cast<size_t>(a.block_count()));
  out.vectors.reserve(static_cast<size_t>(a.block_count()));
  for (int i = 0; i < a.block_count(); ++i) {
    auto b = a.block(i);
    if (b.rows() == 1) {
      out.values.push_back(RealVector::Constant(1, b(0, 0).real()));
      out.vectors.push_back(Matrix::Identity(1, 1));
      continue;
    }
    Matrix herm = 0.5 * (b + b.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    if (es.info() != Eigen::Success) throw InternalError("hermitian eigensolver did not converge");
    Matrix vecs = es.eigenvectors();
    fix_phases(vecs);
    out.values.push_back(es.eigenvalues());
    out.vectors.push_back(std::move(vecs));
  }
  return out;
}

std::vector<std::vector<double>> block_spectra(const Element& a, double tol) {
  Eigendecomposition ed = eigendecompose(a, tol);
  std::vector<std::vector<double>> out;
  for (const RealVector& v : ed.values) out.emplace_back(v.data(), v.data() + v.size());
  return out;
}

std::vector<double> spectrum(const Element& a, double tol) {
  std::vector<double> all;
  all.reserve(static_cast<size_t>(a.algebra().total_size()));
  for (auto& b : block_spectra(a, tol)) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  return all;
}

double min_eigenvalue(const Element& a, double tol) {
  require_hermitian(a, tol);
  double m = INFINITY;
  if (a.algebra().is_abelian()) {
    for (const Complex& z : a.coefficients()) m = std::min(m, z.real());
    return m;
  }
  for (int i = 0; i < a.block_count(); ++i) {
    auto b = a.block(i);
    if (b.rows() == 1) {
      m = std::min(m, b(0, 0).real());
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (b + b.adjoint())), Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()(0));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Scalar functions

ScalarFunction::ScalarFunction(Kind kind, std::string name, std::function<double(double)> eval)
    : kind_(kind), name_(std::move(name)), eval_(std::move(eval)) {}

ScalarFunction ScalarFunction::identity() {
  return ScalarFunction(Kind::identity, "id", [](double t) { return t; });
}

ScalarFunction ScalarFunction::cut_down(double alpha, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("cut_down needs eps > 0");
  ScalarFunction f(Kind::cut_down, "f_{alpha,eps}", [alpha, eps](double t) {
    if (t <= alpha) return 0.0;
    if (t >= alpha + eps) return t;
    return (t - alpha) * (alpha + eps) / eps;
  });
  f.alpha_ = alpha;
  f.eps_ = eps;
  return f;
}

ScalarFunction ScalarFunction::ramp(double alpha, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("ramp needs eps > 0");
  ScalarFunction f(Kind::ramp, "g_{alpha,eps}", [alpha, eps](double t) {
    if (t <= alpha) return 0.0;
    if (t >= alpha + eps) return 1.0;
    return (t - alpha) / eps;
  });
  f.alpha_ = alpha;
  f.eps_ = eps;
  return f;
}

ScalarFunction ScalarFunction::threshold(double alpha) {
  ScalarFunction f(Kind::threshold, "g_alpha", [alpha](double t) { return t >= alpha ? 1.0 : 0.0; });
  f.alpha_ = alpha;
  return f;
}

ScalarFunction ScalarFunction::gapped_threshold(double eps) {
  if (!(eps >= 0.0 && eps < 0.5)) throw PreconditionError("gapped threshold needs 0 <= eps < 1/2");
  ScalarFunction f(Kind::gapped_threshold, "g_{1/2}", [](double t) { return t >= 0.5 ? 1.0 : 0.0; });
  f.alpha_ = 0.5;
  f.eps_ = eps;
  f.gapped_ = true;
  return f;
}

ScalarFunction ScalarFunction::gap_inverse(double eps) {
  if (!(eps >= 0.0 && eps < 0.5)) throw PreconditionError("gap inverse needs 0 <= eps < 1/2");
  ScalarFunction f(Kind::gap_inverse, "f^-", [eps](double t) {
    if (t <= eps) return 0.0;
    if (t >= 1.0 - eps) return 1.0 / t;
    double top = 1.0 / (1.0 - eps);
    return (t - eps) * top / (1.0 - 2.0 * eps);
  });
  f.eps_ = eps;
  f.gapped_ = true;
  return f;
}

ScalarFunction ScalarFunction::inverse_on_support(double cut) {
  ScalarFunction f(Kind::inverse_on_support, "inv_supp",
                   [cut](double t) { return t > cut ? 1.0 / t : 0.0; });
  f.alpha_ = cut;
  return f;
}

ScalarFunction ScalarFunction::inverse_sqrt_on_support(double cut) {
  ScalarFunction f(Kind::inverse_sqrt_on_support, "invsqrt_supp",
                   [cut](double t) { return t > cut ? 1.0 / std::sqrt(t) : 0.0; });
  f.alpha_ = cut;
  return f;
}

ScalarFunction ScalarFunction::custom(std::string name, std::function<double(double)> fn, double lo,
                                      double hi) {
  ScalarFunction f(Kind::custom, std::move(name), std::move(fn));
  f.lo_ = lo;
  f.hi_ = hi;
  return f;
}

ScalarFunction ScalarFunction::then(const ScalarFunction& outer) const {
  auto inner_eval = eval_;
  auto outer_eval = outer.eval_;
  ScalarFunction f = custom(outer.name_ + " o " + name_,
                            [inner_eval, outer_eval](double t) { return outer_eval(inner_eval(t)); },
                            lo_, hi_);
  f.gapped_ = gapped_;
  f.eps_ = eps_;
  return f;
}

void ScalarFunction::check_argument(double t, double tol) const {
  if (t < lo_ - tol || t > hi_ + tol) {
    std::ostringstream os;
    os << name_ << ": eigenvalue " << t << " outside the domain [" << lo_ << ", " << hi_ << "]";
    throw PreconditionError(os.str());
  }
  if (gapped_) {
    bool low = t >= -tol && t <= eps_ + tol;
    bool high = t >= 1.0 - eps_ - tol && t <= 1.0 + tol;
    if (!low && !high) {
      std::ostringstream os;
      os << name_ << ": eigenvalue " << t << " violates the gap hypothesis [0," << eps_ << "] u ["
         << 1.0 - eps_ << ",1]";
      throw PreconditionError(os.str());
    }
  }
}

Element apply_function(const Element& a, const ScalarFunction& f, double tol) {
  Eigendecomposition ed = eigendecompose(a, tol);
  Element out(a.algebra());
  for (int i = 0; i < a.block_count(); ++i) {
    const RealVector& vals = ed.values[static_cast<size_t>(i)];
    RealVector mapped(vals.size());
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
      f.check_argument(vals(k), tol);
      mapped(k) = f(vals(k));
    }
    const Matrix& u = ed.vectors[static_cast<size_t>(i)];
    if (u.rows() == 1) {
      out.block(i)(0, 0) = mapped(0);
    } else {
      out.block(i) = u * mapped.cast<Complex>().asDiagonal() * u.adjoint();
    }
  }
  return out;
}

Element support_projection(const Element& a, double rank_cut, double tol) {
  Eigendecomposition ed = eigendecompose(a, tol);
  Element out(a.algebra());
  for (int i = 0; i < a.block_count(); ++i) {
    const RealVector& vals = ed.values[static_cast<size_t>(i)];
    if (vals.size() > 0 && vals(0) < -tol) {
      std::ostringstream os;
      os << "support projection of a non-positive element: eigenvalue " << vals(0) << " in block "
         << i;
      throw PreconditionError(os.str());
    }
    const Matrix& u = ed.vectors[static_cast<size_t>(i)];
    Matrix p = Matrix::Zero(u.rows(), u.cols());
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
      if (vals(k) > rank_cut) p += u.col(k) * u.col(k).adjoint();
    }
    out.block(i) = p;
  }
  return out;
}

Validation validate(const Element& a, Predicate predicate, double tol) {
  Validation v;
  switch (predicate) {
    case Predicate::hermitian:
      v.defect = hermitian_defect(a);
      break;
    case Predicate::positive: {
      double asym = hermitian_defect(a);
      double neg = asym > 1e-6 ? INFINITY : std::max(0.0, -min_eigenvalue(a, 1e-6));
      v.defect = std::max(asym, neg);
      break;
    }
    case Predicate::projection:
      v.defect = std::max(hermitian_defect(a), norm(a * a - a));
      break;
    case Predicate::contraction:
      v.defect = std::max(0.0, norm(a) - 1.0);
      break;
  }
  v.ok = v.defect <= tol;
  return v;
}

std::string to_string(Predicate p) {
  switch (p) {
    case Predicate::hermitian:
      return "hermitian";
    case Predicate::positive:
      return "positive";
    case Predicate::projection:
      return "projection";
    case Predicate::contraction:
      return "contraction";
  }
  return "?";
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace cpr
