#pragma once

// Quantitative perturbation of projections: repairing almost-projections,
// pushing a projection off another, orthogonalizing families, and connecting
// close projections by partial isometries. Each routine verifies its
// hypotheses and reports the measured quantities next to the bound.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cpr/matfun.hpp"
#include "cpr/random.hpp"

namespace cpr {

struct RepairResult {
  Element p;              // g_{1/2}(h)
  Element c;              // (php)^{-1/2} on the range of p, zero elsewhere
  double defect = 0.0;    // ||h - h^2||
  double dist_p_h = 0.0;  // ||p - h||, below 2 eps
  double dist_p_c = 0.0;  // ||p - c||, below 4 eps
  double chc_defect = 0.0;  // ||c h c - p||
};

/// Requires h positive, ||h|| <= 1 and ||h - h^2|| < eps < 1/4.
RepairResult repair_almost_projection(const Element& h, double eps, double tol = kDefaultTol);

struct PairResult {
  Element p_tilde;
  double overlap = 0.0;    // ||p q||
  double deviation = 0.0;  // ||p~ - p||
  double bound = 0.0;      // 14 delta
  double residual = 0.0;   // ||p~ q||
};

/// A projection orthogonal to q within 14 delta of p. Requires p, q
/// projections, ||pq|| <= delta < 1/24. p~ is the spectral projection of
/// (1-q)p(1-q) for eigenvalues above 1/2, computed inside the corner
/// (1-q)A(1-q).
PairResult orthogonalize_pair(const Element& p, const Element& q, double delta, double tol = kDefaultTol);

inline constexpr double kAlphaCap = 1.05;

/// Largest alpha <= cap for which the orthogonalization schedule stays below
/// beta for K projections. The cap is min(1.05, (n+2)/n) when an order
/// parameter n >= 1 is given, and 1.05 otherwise.
double alpha_for(int K, double beta, std::optional<int> n = std::nullopt);

/// sqrt(alpha (alpha - 1)).
double schedule_delta(double alpha);

/// delta_1 = 0, delta_i = 14 (delta_1 + ... + delta_{i-1} + delta).
std::vector<double> orthogonalization_schedule(int k, double alpha);

struct FamilyStage {
  int index = 0;           // 0-based position in the family
  double overlap = 0.0;    // ||q_i (p_0 + ... + p_{i-1})||
  double allowed = 0.0;    // delta_1 + ... + delta_{i-1} + delta
  double deviation = 0.0;  // ||p_i - q_i||
  double bound = 0.0;      // delta_i
};

struct FamilyResult {
  std::vector<Element> projections;
  std::vector<FamilyStage> stages;
  bool unchanged = false;  // ||sum q|| <= 1 and the q_i were already orthogonal
  double sum_norm = 0.0;
  double delta = 0.0;
};

/// Pairwise orthogonal p_i with ||p_i - q_i|| <= delta_i. Throws
/// PreconditionError when ||sum q_i|| > alpha and PipelineError (step
/// "stage i") when a repair hypothesis fails.
FamilyResult orthogonalize_family(const std::vector<Element>& q, double alpha, double tol = kDefaultTol);

/// Largest ||x y||, ||y x|| over the ordered pairs of a family.
double max_pairwise_product(const std::vector<Element>& family);

struct ConnectResult {
  Element s;
  double distance = 0.0;         // ||p - q||
  double deviation = 0.0;        // ||s - p||
  double bound = 0.0;            // 4 eta
  double isometry_defect = 0.0;  // max(||s*s - p||, ||ss* - q||)
};

/// Partial isometry s = u p with s*s = p, ss* = q, where u = (xy)^{-1/2},
/// x = 2p - 1, y = 2q - 1. Requires ||p - q|| < eta <= 1/4.
ConnectResult connect_projections(const Element& p, const Element& q, double eta, double tol = kDefaultTol);

struct AlmostUnitCheck {
  double lhs = 0.0;  // ||(1-d) x||
  double rhs = 0.0;  // sqrt ||(1-h) x||
  bool ok = false;
};

/// Validator for ||(1-h)x|| <= eps => ||(1-d)x|| <= sqrt(eps) when
/// 0 <= h <= d, ||d|| <= 1, ||x|| <= 1.
AlmostUnitCheck check_almost_unit(const Element& h, const Element& d, const Element& x,
                                  double tol = kDefaultTol);

using UnitarySampler = std::function<Matrix(const Matrix& center, double radius, Rng& rng)>;

struct InvertibleSumWitness {
  std::vector<Matrix> unitaries;
  double min_eigenvalue = 0.0;  // of sum u_i* p u_i
  double lambda = 0.0;          // 1 / min_eigenvalue
  int attempts = 0;
};

/// Unitaries u_1..u_r within `radius` of `center` with sum u_i* p u_i
/// invertible. Throws PipelineError after `max_attempts` singular draws.
InvertibleSumWitness invertible_sum_witness(int r, const Matrix& p, const Matrix& center, double radius,
                                            std::uint64_t seed, int max_attempts = 64,
                                            const UnitarySampler& sampler = {},
                                            double min_eigenvalue = 1e-8);

struct TraceRankCheck {
  int k = 0;
  int n = 0;
  bool hypotheses_hold = false;  // positive, sum <= 1, every ||a_i|| > n/(n+1)
  bool bound_holds = true;       // k <= n whenever the hypotheses hold
  double normalized_trace = 0.0;  // tr(sum a_i) / n, at most 1
  double trace_lower = 0.0;       // k / (n+1), strictly below the trace
  double min_norm = 0.0;
};

/// Validator for: positive a_1..a_k in M_n with sum <= 1 and all norms
/// above n/(n+1) number at most n.
TraceRankCheck trace_rank_check(const std::vector<Matrix>& a, double tol = kDefaultTol);

}  // namespace cpr
