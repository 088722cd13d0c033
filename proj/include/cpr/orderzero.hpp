#pragma once

// Structure of strict-order-zero maps: decomposition phi = h sigma, the
// projection case, perturbation to a *-homomorphism, and one finite step of
// the AF characterization.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpr/cpmap.hpp"

namespace cpr {

struct OrderZeroPart {
  std::vector<double> support;  // distinct eigenvalues of h on its support (the space X_i)
  Element h;
  Element support_projection;
  std::vector<Element> sigma;   // sigma(e_jk), flat order within the block
};

struct OrderZeroDecomposition {
  std::vector<OrderZeroPart> blocks;
  double reconstruction_error = 0.0;  // max ||phi(e) - h sigma(e)||
  double multiplicativity_defect = 0.0;
};

/// Throws PreconditionError (naming the failing check) unless phi is
/// certified order zero.
OrderZeroDecomposition decompose_order_zero(const CPMap& phi, double tol = kOrthogonalityTol,
                                            double rank_cut = kDefaultRankCut);

/// Recomposes phi(e) = h_i sigma_i(e) on the matrix units.
CPMap recompose(const OrderZeroDecomposition& d, const Algebra& domain, CodomainKind kind = CodomainKind::algebra);

/// Largest ||phi(e) phi(f) - phi(ef)|| over pairs of matrix units, together
/// with the adjoint defect.
double homomorphism_defect(const CPMap& phi);

enum class ProjectionCase { holds, fails, inapplicable };

struct ProjectionCaseReport {
  ProjectionCase verdict = ProjectionCase::inapplicable;
  double projection_defect = 0.0;      // of phi(1_F)
  double multiplicativity_defect = 0.0;
};

/// If phi(1_F) is a projection, an order zero map is a *-homomorphism.
ProjectionCaseReport check_projection_case(const CPMap& phi, double tol = kOrthogonalityTol);

std::string to_string(ProjectionCase c);

struct MapDistance {
  double lower = 0.0;  // max over probe contractions of ||(a - b)(x)||
  double upper = 0.0;  // cb-norm bound ||D+(1)|| + ||D-(1)|| from the Choi split of a - b
};

/// Two-sided estimate of the map norm ||a - b||. Probes: 1_F, the unit-norm
/// hermitian frame, and `samples` seeded random contractions.
MapDistance map_distance(const CPMap& a, const CPMap& b, std::uint64_t seed = 0, int samples = 50);

struct PerturbResult {
  CPMap phi_prime;
  Element p;  // phi'(1_F)
  Element c;  // (p phi(1) p)^{-1/2}
  double unit_defect = 0.0;  // ||phi(1) - phi(1)^2||
  double homomorphism_defect = 0.0;
  MapDistance distance;
  double unit_distance = 0.0;  // max over matrix units of ||phi'(e) - phi(e)||
  double bound = 0.0;  // 12 gamma + 2 sqrt(gamma)
};

/// phi' = c phi(.) c. Requires phi order zero and
/// ||phi(1) - phi(1)^2|| < gamma < 1/4.
PerturbResult perturb_to_hom(const CPMap& phi, double gamma, double tol = kOrthogonalityTol,
                             std::uint64_t seed = 0);

/// Operator-norm residual of `a` after Frobenius projection onto the span
/// of the image of `hom`; an upper bound for the distance to that image.
double dist_to_hom_image(const Element& a, const CPMap& hom);

struct Inequality {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool holds = false;
};

struct AfStepResult {
  std::vector<Inequality> hypotheses;  // (i)..(vi)
  std::vector<double> mu;              // eigenvalues of psi(u)
  Algebra sub_algebra;                 // F' = qFq
  CPMap embedding;                     // F' -> F, x -> W x W*
  CPMap phi_prime;                     // *-homomorphism F' -> A
  double gamma = 0.0;
  double q_defect = 0.0;               // ||phi(q) - phi(q)^2||
  std::vector<double> chain;           // ||a_i - phi(q psi(a_i) q)||
  double chain_bound = 0.0;            // 2 sqrt2 eps^{1/4} + eps + 2 eps^{1/8}
  std::vector<double> candidate;       // ||a_i - phi'(q psi(a_i) q)||
  std::vector<double> distances;       // certified upper bounds for dist(a_i, phi'(F'))
  std::optional<PerturbResult> perturbation;
};

/// One finite step: checks (i)-(vi) for the approximation (psi, phi) and
/// the approximate unit u, cuts F down to qFq with q the spectral projection
/// of psi(u) for eigenvalues >= sqrt(eps), and perturbs phi on qFq to a
/// *-homomorphism. Throws PipelineError naming the failing inequality.
AfStepResult af_local_step(const std::vector<Element>& a, const CPTriple& approx, const Element& u, double eps,
                           double tol = kOrthogonalityTol);

}  // namespace cpr
