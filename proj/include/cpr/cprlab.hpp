#pragma once

// Completely positive approximations of function algebras on finite metric
// spaces: building them from covers, combining them, extracting covers back
// out of them, and estimating the completely positive rank at a scale.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpr/covers.hpp"
#include "cpr/cpmap.hpp"
#include "cpr/orderzero.hpp"

namespace cpr {

/// A real function on the points of a space.
using Function = Eigen::VectorXd;

/// The element of C(X) = C^P given by a function.
Element function_element(const Function& f);

/// a (x) b in C(X, M_r): block x is a(x) b.
Element function_tensor(const Function& a, const Matrix& b);

/// Largest |f(x) - f(y)| over x, y in one member.
double oscillation(const Function& f, const std::vector<int>& member);

struct BuildInfo {
  double radius = 0.0;      // net radius that met the oscillation bound
  Cover net;                // cover with small oscillation
  Cover refinement;         // its strict refinement
  Cover support;            // refinement members kept after pruning
  int net_order = 0;        // order of `net`, the dimension of Sd N(net)
  int refinement_order = 0;
  int refinement_strict_order = 0;
  double max_oscillation = 0.0;
};

/// (F, psi, phi) for C(X) or C(X, M_r): psi: C(X[, M_r]) -> F and
/// phi: F -> C(X[, M_r]).
struct CPApproximation {
  FiniteMetricSpace space;
  int matrix_size = 1;      // r for C(X, M_r)
  CPMap psi;
  CPMap phi;
  std::vector<int> points;  // evaluation point of each generator, when psi evaluates
  std::optional<BuildInfo> build;

  const Algebra& F() const { return psi.codomain(); }
};

/// Point-evaluation approximation within eps of every function in `a`:
/// a net cover with oscillation below 2 eps / 3, its strict refinement
/// pruned to members with an exclusive point, and the partition of unity of
/// the pruned cover. Throws PreconditionError on an empty space or eps <= 0.
CPApproximation build_cp_approx(const FiniteMetricSpace& space, const std::vector<Function>& a, double eps);

struct ApproxVerification {
  std::vector<double> errors;  // ||phi psi(a) - a||
  double max_error = 0.0;
  bool within = false;         // every error <= eps
  bool psi_cp = false, phi_cp = false;
  bool psi_contractive = false, phi_contractive = false;
  double psi_norm = 0.0, phi_norm = 0.0;
  OrderBounds phi_order;
};

ApproxVerification verify_cp_approx(const CPApproximation& approx, const std::vector<Element>& a, double eps,
                                    double tol = kDefaultTol);
ApproxVerification verify_cp_approx(const CPApproximation& approx, const std::vector<Function>& a, double eps,
                                    double tol = kDefaultTol);

/// (F (x) M_r, psi (x) id, phi (x) id) for C(X, M_r). Requires abelian F and
/// scalar-valued input.
CPApproximation tensor_approx(const CPApproximation& approx, int r);

/// Approximation on the disjoint union of the two spaces; cross distances
/// are 1 + the larger diameter. An absent second summand returns `a`.
CPApproximation direct_sum_approx(const CPApproximation& a, const std::optional<CPApproximation>& b);

/// Point-evaluation approximation pushed through 2x2 blocks: pairs of
/// distant points (x, y) share a block M_2 with psi(f) = U diag(f(x), f(y)) U*
/// for a seeded random unitary U (a leftover point gets a block C). Exact
/// on every function; phi has strict order 1.
CPApproximation matrix_pair_approximation(const FiniteMetricSpace& space, std::uint64_t seed);

struct ExtractionConstants {
  int n = 0;
  double C = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
  double theta = 0.0;
  double eta = 0.0;
};

ExtractionConstants extraction_constants(int n);

/// The fine cover and data fixed before an approximation is chosen.
struct ExtractionSetup {
  ExtractionConstants constants;
  PartitionOfUnity f;          // subordinate to U
  double level = 0.0;          // 1 / |U|
  double delta = 0.0;          // |f(x) - f(y)| < level whenever d(x, y) < delta
  double fine_bound = 0.0;     // delta / (3 (n + 1))
  Cover fine;                  // (V_lambda), member diameters below fine_bound
  PartitionOfUnity h;          // subordinate to `fine`
  std::vector<Function> h_functions;
};

ExtractionSetup extraction_setup(const FiniteMetricSpace& space, const Cover& u, int n);

/// An approximation for the partition functions h_lambda of the setup,
/// accurate enough that every subset sum is within eta.
CPApproximation approximation_for_setup(const FiniteMetricSpace& space, const ExtractionSetup& setup);

struct ExtractionStep {
  std::string name;
  double measured = 0.0;  // worst value over the points and indices checked
  double bound = 0.0;
  bool holds = false;
  std::string where;      // location of the worst value
};

struct ExtractionClass {
  int block = 0;
  std::vector<int> lambdas;  // the class Lambda_j^(i)
  std::vector<int> region;   // V~_j^(i)
  Element q;                 // g_theta(psi_j(h_j^(i)))
  Element p;                 // after orthogonalization
  std::vector<int> w;        // W_j^(i)
};

struct ExtractionReport {
  ExtractionConstants constants;
  double delta = 0.0;
  int upper_order = 0;                  // strict-order upper bound of phi
  std::vector<std::vector<int>> a_sets; // A_j
  std::vector<ExtractionClass> classes;
  std::vector<ExtractionStep> steps;
  Cover w;
  int order = 0;
  RefinementCheck refinement;
  bool covers = false;
};

/// Refinement W of U with order <= n out of an approximation for the
/// partition functions of the setup. Throws PreconditionError when the strict
/// order of phi may exceed n and PipelineError naming the failing step.
ExtractionReport extract_cover(const FiniteMetricSpace& space, const Cover& u, int n, const CPApproximation& approx,
                               const ExtractionSetup& setup);
ExtractionReport extract_cover(const FiniteMetricSpace& space, const Cover& u, int n, const CPApproximation& approx);

struct ScaleEvidence {
  double scale = 0.0;
  std::string cover;          // which candidate achieved the minimum
  int strict_order = 0;       // of its strict refinement
  int input_order = 0;
  std::vector<std::string> names;
  std::vector<int> candidates;  // strict order per candidate, -1 if too thin
};

struct CprEstimate {
  int value = 0;
  std::vector<ScaleEvidence> scales;
  int builder_order = -1;  // strict order of phi from build_cp_approx on the probes
};

/// Smallest strict order among strict refinements of the ball cover (when
/// s >= 2 resolution) and of seeded net covers (radius and slack s) at each
/// scale s, over candidates whose Lebesgue number reaches
/// min(1.5 resolution, s). An upper bound at those scales, not dim X; -1 when
/// no candidate qualifies.
CprEstimate estimate_cpr_commutative(const FiniteMetricSpace& space, const std::vector<double>& scales,
                                     const std::vector<Function>& probes, double probe_eps = 0.25,
                                     int net_seeds = 4);

}  // namespace cpr
