#include "cpr/projkit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cpr/error.hpp"

namespace cpr {

namespace {

void require(const Element& a, Predicate pred, double tol, const char* what) {
  Validation v = validate(a, pred, tol);
  if (!v.ok) {
    std::ostringstream os;
    os << what << " is not " << to_string(pred) << " (defect " << v.defect << ")";
    throw PreconditionError(os.str());
  }
}

Matrix projection_above(const Matrix& herm, double level) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (herm + herm.adjoint())));
  Matrix p = Matrix::Zero(herm.rows(), herm.cols());
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (es.eigenvalues()(k) > level) p += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  }
  return p;
}

// Orthonormal basis (as columns) of the range of a projection.
Matrix range_basis(const Matrix& proj) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (proj + proj.adjoint())));
  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (es.eigenvalues()(k) > 0.5) cols.push_back(k);
  }
  Matrix w(proj.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c) w.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(cols[c]);
  return w;
}

}  // namespace

RepairResult repair_almost_projection(const Element& h, double eps, double tol) {
  if (!(eps > 0.0 && eps < 0.25)) {
    std::ostringstream os;
    os << "repair needs 0 < eps < 1/4, got " << eps;
    throw PreconditionError(os.str());
  }
  require(h, Predicate::positive, std::max(tol, 1e-9), "h");
  double hn = norm(h);
  if (hn > 1.0 + tol) {
    std::ostringstream os;
    os << "repair needs ||h|| <= 1, got " << hn;
    throw PreconditionError(os.str());
  }
  RepairResult out{Element(h.algebra()), Element(h.algebra())};
  out.defect = norm(h - h * h);
  if (!(out.defect < eps)) {
    std::ostringstream os;
    os << "repair needs ||h - h^2|| < eps: measured " << out.defect << " >= " << eps;
    throw PreconditionError(os.str());
  }
  // t - t^2 < eps keeps the spectrum away from (1/2 - d, 1/2 + d) with
  // d = sqrt(1 - 4 eps) / 2, so both functions below are continuous on it.
  out.p = apply_function(h, ScalarFunction::threshold(0.5), tol);
  out.c = apply_function(
      h, ScalarFunction::custom("(php)^{-1/2}", [](double t) { return t >= 0.5 ? 1.0 / std::sqrt(t) : 0.0; }),
      tol);
  out.dist_p_h = norm(out.p - h);
  out.dist_p_c = norm(out.p - out.c);
  out.chc_defect = norm(out.c * h * out.c - out.p);
  return out;
}

PairResult orthogonalize_pair(const Element& p, const Element& q, double delta, double tol) {
  if (!(delta >= 0.0 && delta < 1.0 / 24.0)) {
    std::ostringstream os;
    os << "orthogonalization needs 0 <= delta < 1/24, got " << delta;
    throw PreconditionError(os.str());
  }
  require(p, Predicate::projection, tol, "p");
  require(q, Predicate::projection, tol, "q");
  PairResult out{Element(p.algebra())};
  out.overlap = norm(p * q);
  if (out.overlap > delta + tol) {
    std::ostringstream os;
    os << "||pq|| = " << out.overlap << " exceeds delta = " << delta;
    throw PreconditionError(os.str());
  }
  for (int i = 0; i < p.block_count(); ++i) {
    int r = p.algebra().block_size(i);
    Matrix comp = Matrix::Identity(r, r) - q.block(i);
    Matrix w = range_basis(comp);
    if (w.cols() == 0) continue;
    Matrix corner = w.adjoint() * p.block(i) * w;
    out.p_tilde.block(i) = w * projection_above(corner, 0.5) * w.adjoint();
  }
  out.deviation = norm(out.p_tilde - p);
  out.bound = 14.0 * delta;
  out.residual = norm(out.p_tilde * q);
  return out;
}

double schedule_delta(double alpha) { return std::sqrt(std::max(0.0, alpha * (alpha - 1.0))); }

std::vector<double> orthogonalization_schedule(int k, double alpha) {
  double delta = schedule_delta(alpha);
  std::vector<double> out;
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    double di = i == 0 ? 0.0 : 14.0 * (sum + delta);
    out.push_back(di);
    sum += di;
  }
  return out;
}

double alpha_for(int K, double beta, std::optional<int> n) {
  if (K < 1) throw PreconditionError("alpha_for needs K >= 1");
  if (!(beta > 0.0)) throw PreconditionError("alpha_for needs beta > 0");
  double cap = kAlphaCap;
  if (n && *n >= 1) cap = std::min(cap, (*n + 2.0) / *n);
  if (K == 1) return cap;
  // Closed form of the schedule: delta_i = 14 * 15^{i-2} * delta for i >= 2,
  // so delta_K <= beta exactly when alpha (alpha - 1) <= target^2.
  double target = beta / (14.0 * std::pow(15.0, K - 2));
  // alpha - 1 is O(target^2), so the rounded root can overshoot; step down to
  // the largest double whose schedule fits. Below 2^-52 this reaches 1.
  double alpha = std::min(cap, 1.0 + 2.0 * target * target / (1.0 + std::sqrt(1.0 + 4.0 * target * target)));
  auto fits = [&](double a) {
    for (double d : orthogonalization_schedule(K, a))
      if (d > beta) return false;
    return true;
  };
  while (alpha > 1.0 && !fits(alpha)) alpha = std::nextafter(alpha, 0.0);
  if (!fits(alpha)) throw InternalError("alpha_for: schedule exceeds beta");
  return alpha;
}

double max_pairwise_product(const std::vector<Element>& family) {
  double m = 0.0;
  for (size_t a = 0; a < family.size(); ++a) {
    for (size_t b = 0; b < family.size(); ++b) {
      if (a != b) m = std::max(m, norm(family[a] * family[b]));
    }
  }
  return m;
}

FamilyResult orthogonalize_family(const std::vector<Element>& q, double alpha, double tol) {
  FamilyResult out;
  if (q.empty()) return out;
  if (!(alpha >= 1.0)) throw PreconditionError("orthogonalize_family needs alpha >= 1");
  Element sum(q.front().algebra());
  for (size_t i = 0; i < q.size(); ++i) {
    std::ostringstream name;
    name << "q_" << i;
    require(q[i], Predicate::projection, tol, name.str().c_str());
    sum += q[i];
  }
  out.sum_norm = norm(sum);
  out.delta = schedule_delta(alpha);
  if (out.sum_norm > alpha + tol) {
    std::ostringstream os;
    os << "||sum q_i|| = " << out.sum_norm << " exceeds alpha = " << alpha;
    throw PreconditionError(os.str());
  }
  if (out.sum_norm <= 1.0 + tol && max_pairwise_product(q) <= 1e-12) {
    out.projections = q;
    out.unchanged = true;
    return out;
  }
  std::vector<double> sched = orthogonalization_schedule(static_cast<int>(q.size()), alpha);
  Element taken(q.front().algebra());
  double sum_bounds = 0.0;
  for (size_t i = 0; i < q.size(); ++i) {
    FamilyStage st;
    st.index = static_cast<int>(i);
    st.bound = sched[i];
    std::ostringstream step;
    step << "stage " << i;
    if (i == 0) {
      out.projections.push_back(q[0]);
    } else {
      st.allowed = sum_bounds + out.delta;
      st.overlap = norm(q[i] * taken);
      if (st.overlap > st.allowed + tol) {
        std::ostringstream os;
        os << "overlap " << st.overlap << " with earlier projections exceeds " << st.allowed;
        throw PipelineError(step.str(), os.str());
      }
      if (!(st.allowed < 1.0 / 24.0)) {
        std::ostringstream os;
        os << "accumulated tolerance " << st.allowed << " is not below 1/24";
        throw PipelineError(step.str(), os.str());
      }
      PairResult pr = orthogonalize_pair(q[i], taken, st.allowed, tol);
      out.projections.push_back(pr.p_tilde);
    }
    st.deviation = norm(out.projections.back() - q[i]);
    if (st.deviation > st.bound + tol) {
      std::ostringstream os;
      os << "deviation " << st.deviation << " exceeds the schedule bound " << st.bound;
      throw PipelineError(step.str(), os.str());
    }
    sum_bounds += sched[i];
    taken += out.projections.back();
    out.stages.push_back(st);
  }
  return out;
}

ConnectResult connect_projections(const Element& p, const Element& q, double eta, double tol) {
  if (!(eta > 0.0 && eta <= 0.25)) {
    std::ostringstream os;
    os << "connecting projections needs 0 < eta <= 1/4, got " << eta;
    throw PreconditionError(os.str());
  }
  require(p, Predicate::projection, tol, "p");
  require(q, Predicate::projection, tol, "q");
  ConnectResult out{Element(p.algebra())};
  out.distance = norm(p - q);
  if (!(out.distance < eta)) {
    std::ostringstream os;
    os << "||p - q|| = " << out.distance << " is not below eta = " << eta;
    throw PreconditionError(os.str());
  }
  for (int i = 0; i < p.block_count(); ++i) {
    int r = p.algebra().block_size(i);
    Matrix one = Matrix::Identity(r, r);
    Matrix x = 2.0 * Matrix(p.block(i)) - one;
    Matrix y = 2.0 * Matrix(q.block(i)) - one;
    Matrix w = x * y;
    // w is unitary, hence normal: its Schur form is diagonal up to rounding.
    Eigen::ComplexSchur<Matrix> schur(w);
    const Matrix& t = schur.matrixT();
    Vector half(r);
    for (int k = 0; k < r; ++k) {
      Complex lam = t(k, k);
      double m = std::abs(lam);
      if (m == 0.0) throw InternalError("connect_projections: xy is not unitary");
      lam /= m;
      if (std::abs(lam + 1.0) < 1e-12) {
        throw InternalError("connect_projections: xy has eigenvalue -1, the principal logarithm is undefined");
      }
      half(k) = std::polar(1.0, -0.5 * std::arg(lam));
    }
    const Matrix& u = schur.matrixU();
    Matrix root = u * half.asDiagonal() * u.adjoint();
    out.s.block(i) = root * p.block(i);
  }
  out.deviation = norm(out.s - p);
  out.bound = 4.0 * eta;
  Element sa = out.s.adjoint();
  out.isometry_defect = std::max(norm(sa * out.s - p), norm(out.s * sa - q));
  return out;
}

AlmostUnitCheck check_almost_unit(const Element& h, const Element& d, const Element& x, double tol) {
  require(h, Predicate::positive, std::max(tol, 1e-9), "h");
  require(d, Predicate::positive, std::max(tol, 1e-9), "d");
  if (min_eigenvalue(d - h, 1e-6) < -std::max(tol, 1e-9)) {
    throw PreconditionError("check_almost_unit needs d >= h");
  }
  if (norm(d) > 1.0 + tol) throw PreconditionError("check_almost_unit needs ||d|| <= 1");
  if (norm(x) > 1.0 + tol) throw PreconditionError("check_almost_unit needs ||x|| <= 1");
  Element one = Element::identity(h.algebra());
  AlmostUnitCheck out;
  out.lhs = norm((one - d) * x);
  out.rhs = std::sqrt(norm((one - h) * x));
  out.ok = out.lhs <= out.rhs + 1e-9;
  return out;
}

InvertibleSumWitness invertible_sum_witness(int r, const Matrix& p, const Matrix& center, double radius,
                                            std::uint64_t seed, int max_attempts,
                                            const UnitarySampler& sampler, double min_eigenvalue) {
  if (r < 1) throw PreconditionError("invertible_sum_witness needs r >= 1");
  if (p.rows() != r || p.cols() != r || center.rows() != r || center.cols() != r) {
    throw PreconditionError("invertible_sum_witness: shapes do not match r");
  }
  if (!(radius > 0.0)) throw PreconditionError("invertible_sum_witness needs a positive radius");
  Element pe = Element::from_matrix(p);
  require(pe, Predicate::projection, 1e-9, "p");
  if (std::abs(p.trace().real() - 1.0) > 1e-9) throw PreconditionError("p must have rank one");
  Rng rng(seed);
  InvertibleSumWitness out;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    out.attempts = attempt;
    out.unitaries.clear();
    Matrix sum = Matrix::Zero(r, r);
    for (int i = 0; i < r; ++i) {
      Matrix u;
      if (sampler) {
        u = sampler(center, radius, rng);
      } else if (r == 1) {
        u = center;
      } else {
        u = unitary_near(center, radius, rng);
      }
      sum += u.adjoint() * p * u;
      out.unitaries.push_back(std::move(u));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (sum + sum.adjoint())), Eigen::EigenvaluesOnly);
    out.min_eigenvalue = es.eigenvalues()(0);
    if (out.min_eigenvalue > min_eigenvalue) {
      out.lambda = 1.0 / out.min_eigenvalue;
      return out;
    }
  }
  std::ostringstream os;
  os << "no invertible sum after " << max_attempts << " draws (seed " << seed << ")";
  throw PipelineError("sampling", os.str());
}

TraceRankCheck trace_rank_check(const std::vector<Matrix>& a, double tol) {
  TraceRankCheck out;
  out.k = static_cast<int>(a.size());
  if (a.empty()) {
    out.hypotheses_hold = true;
    return out;
  }
  out.n = static_cast<int>(a.front().rows());
  int n = out.n;
  Matrix sum = Matrix::Zero(n, n);
  bool positive = true;
  out.min_norm = INFINITY;
  double level = static_cast<double>(n) / (n + 1);
  bool norms_large = true;
  for (const Matrix& m : a) {
    if (m.rows() != n || m.cols() != n) throw PreconditionError("trace_rank_check: mixed sizes");
    Element e = Element::from_matrix(m);
    positive = positive && validate(e, Predicate::positive, std::max(tol, 1e-9)).ok;
    double nm = operator_norm(m);
    out.min_norm = std::min(out.min_norm, nm);
    norms_large = norms_large && nm > level;
    sum += m;
  }
  Element slack = Element::identity(Algebra::matrix(n, std::max(n, kDefaultMaxBlock))) - Element::from_matrix(sum);
  bool below_one = validate(slack, Predicate::positive, std::max(tol, 1e-9)).ok;
  out.hypotheses_hold = positive && below_one && norms_large;
  out.normalized_trace = sum.trace().real() / n;
  out.trace_lower = static_cast<double>(out.k) / (n + 1);
  out.bound_holds = !out.hypotheses_hold || out.k <= n;
  return out;
}

}  // namespace cpr
