#pragma once

// Linear maps out of a finite-dimensional C*-algebra, stored by the images
// of the matrix units, with complete-positivity tests (Choi matrices),
// Stinespring dilations, order-zero certification and strict order.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cpr/matfun.hpp"

namespace cpr {

/// How the codomain algebra came about; only affects serialization.
enum class CodomainKind {
  matrix,            // M_N
  functions,         // C(X) for a finite X with P points: C^P
  matrix_functions,  // C(X, M_N): P blocks of size N
  algebra,           // any other block algebra
};

inline constexpr double kOrthogonalityTol = 1e-8;

class CPMap {
 public:
  /// `unit_images[k]` is the image of the k-th matrix unit (flat order of
  /// the domain). Throws SchemaError on a count or algebra mismatch.
  CPMap(Algebra domain, Algebra codomain, std::vector<Element> unit_images,
        CodomainKind kind = CodomainKind::algebra);

  static CPMap zero(Algebra domain, Algebra codomain, CodomainKind kind = CodomainKind::algebra);
  /// Linear extension of `f` sampled on the matrix units.
  static CPMap from_function(Algebra domain, Algebra codomain, const std::function<Element(const Element&)>& f,
                             CodomainKind kind = CodomainKind::algebra);
  /// Columns of `images` are the coefficient vectors of the unit images.
  static CPMap from_matrix(Algebra domain, Algebra codomain, Matrix images,
                           CodomainKind kind = CodomainKind::algebra);

  const Algebra& domain() const noexcept { return domain_; }
  const Algebra& codomain() const noexcept { return codomain_; }
  CodomainKind codomain_kind() const noexcept { return kind_; }
  /// Codomain dimension x domain dimension; column k is the image of unit k.
  const Matrix& images() const noexcept { return images_; }

  Element image(int flat) const;
  Element image(int block, int row, int col) const;
  std::vector<Element> unit_images() const;

  Element operator()(const Element& x) const;

  /// phi(1_F).
  Element unit_image() const;

  /// Largest ||phi(e_kj) - phi(e_jk)*||.
  double adjoint_defect() const;

 private:
  CPMap(Algebra domain, Algebra codomain, Matrix images, CodomainKind kind, int);

  Algebra domain_;
  Algebra codomain_;
  CodomainKind kind_;
  Matrix images_;
};

/// Maximal entrywise difference of the image tables (same shapes required).
double map_distance_units(const CPMap& a, const CPMap& b);

/// (psi, phi) with psi: A -> F, phi: F -> A.
struct CPTriple {
  CPMap psi;
  CPMap phi;
};

struct ChoiBlock {
  int domain_block = 0;
  int codomain_block = 0;
  Matrix matrix;  // sum_jk e_jk (x) phi(e_jk)_b
  double min_eigenvalue = 0.0;
  bool psd = false;
};

struct ChoiReport {
  std::vector<ChoiBlock> blocks;
  double adjoint_defect = 0.0;
  double min_eigenvalue = 0.0;
  bool completely_positive = false;
};

/// One Choi matrix per (domain block, codomain block). Throws
/// PreconditionError if phi does not preserve adjoints within `tol`.
ChoiReport choi_blocks(const CPMap& phi, double tol = kDefaultTol);

bool is_completely_positive(const CPMap& phi, double tol = kDefaultTol);

struct Contractivity {
  bool contractive = false;
  double norm = 0.0;  // ||phi(1_F)||
};

/// Throws PreconditionError unless phi is completely positive.
Contractivity is_contractive(const CPMap& phi, double tol = kDefaultTol);

/// x -> h* phi(x) h.
CPMap compress(const CPMap& phi, const Element& h);

/// phi+ on F + C with phi+(e_new) = 1 - phi(1_F). Requires a completely
/// positive contraction.
CPMap unitize(const CPMap& phi, double tol = kDefaultTol);

/// Block-diagonal sum A + B -> A' + B'.
CPMap direct_sum(const CPMap& a, const CPMap& b);

/// phi (x) id_{M_r}: F (x) M_r -> codomain (x) M_r.
CPMap tensor_with_identity(const CPMap& phi, int r);

/// b o a.
CPMap compose(const CPMap& b, const CPMap& a);

struct StinespringDilation {
  int rep_dimension = 0;
  CPMap pi;  // *-homomorphism F -> M_D, pi = sum_i (x_i (x) 1_{M_i})
  Matrix v;  // D x N
  std::vector<int> kraus_counts;  // M_i per domain block
  double reconstruction_error = 0.0;   // max_units ||phi(e) - V* pi(e) V||
  double homomorphism_defect = 0.0;
  double v_norm_squared = 0.0;         // ||V||^2 = ||phi(1)||
  bool isometry = false;               // V*V = 1 within tol
};

/// Minimal Stinespring dilation of a completely positive map into M_N.
StinespringDilation stinespring(const CPMap& phi, double tol = kDefaultTol);

struct SchwarzReport {
  double defect = 0.0;          // min eigenvalue of phi(x*x) - phi(x)*phi(x) if below -tol, else 0
  double min_eigenvalue = 0.0;  // the gap itself
  double x_norm = 0.0;
};

SchwarzReport schwarz_defect(const CPMap& phi, const Element& x, double tol = kDefaultTol);

struct MultiplicativityReport {
  double lhs = 0.0;    // ||phi(yx) - phi(y) phi(x)||
  double eps = 0.0;    // ||phi(x*x) - phi(x)* phi(x)||
  double bound = 0.0;  // sqrt(eps)
  bool ok = false;
};

MultiplicativityReport multiplicativity_defect(const CPMap& phi, const Element& x, const Element& y);

/// Largest ||xy||, ||yx||, ||x*y||, ||xy*||.
double orthogonality_defect(const Element& x, const Element& y);

/// Exact strict order of a map with abelian domain: the largest family of
/// generators with pairwise non-orthogonal images, minus one.
int strict_order_abelian(const CPMap& phi, double tol = kOrthogonalityTol,
                         std::vector<int>* clique = nullptr);

struct OrderZeroWitness {
  std::string check;  // cross_block | diagonal_units | commutator | multiplicativity | reconstruction
  int block = -1;
  int other = -1;     // second block or unit index
  int unit = -1;
  double value = 0.0;
};

struct OrderZeroBlock {
  Element h;                    // phi(1_i)
  Element support;              // support projection of h
  std::vector<Element> sigma;   // sigma(e_jk), flat order within the block
};

struct OrderZeroCertificate {
  bool order_zero = false;
  double tol = 0.0;
  std::optional<OrderZeroWitness> witness;
  std::vector<OrderZeroBlock> blocks;  // filled when order_zero
  double max_defect = 0.0;             // largest measured quantity that had to vanish
};

/// Certifies phi(x) = h_i sigma_i(x) with commuting h_i and *-homomorphisms
/// sigma_i = S phi S (S = h_i^{-1/2} on its support), and pairwise
/// orthogonal block images.
OrderZeroCertificate certify_order_zero(const CPMap& phi, double tol = kOrthogonalityTol,
                                        double rank_cut = kDefaultRankCut);

/// Restriction of phi to one block of its domain.
CPMap restrict_to_block(const CPMap& phi, int block);

struct ElementarySet {
  std::vector<Element> projections;
  std::vector<int> blocks;       // block of each projection
  double min_product = 0.0;      // min over pairs of ||phi(e) phi(f)||
  double orthogonality = 0.0;    // max pairwise ||e f||
  int evaluations = 0;
};

struct WitnessSearch {
  std::optional<ElementarySet> set;
  int evaluations = 0;
  bool impossible = false;  // ruled out by the block structure, not by budget
  std::string note;
};

/// Searches for m mutually orthogonal minimal projections with pairwise
/// non-orthogonal images (all products above tol), perturbing inside 2x2
/// corners by unitaries close to the identity and restarting from seeded
/// random frames. An empty result after the budget is inconclusive.
WitnessSearch witness_elementary_set(const CPMap& phi, int m, std::uint64_t seed,
                                     double tol = kOrthogonalityTol, int budget = 4000);

struct OrderBounds {
  int lower = 0;
  int upper = 0;
  bool exact = false;
  std::string method;                  // abelian | single_block | block_graph
  std::vector<bool> block_order_zero;  // per domain block
  std::optional<ElementarySet> witness;
};

OrderBounds strict_order_bounds(const CPMap& phi, double tol = kOrthogonalityTol, std::uint64_t seed = 0);

/// Maximum weight clique by exhaustive branch and bound (small graphs).
std::vector<int> max_weight_clique(const std::vector<std::vector<bool>>& adj, const std::vector<int>& weight);

}  // namespace cpr
