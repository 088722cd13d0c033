#pragma once

// Finite metric models of compact spaces, covers by point subsets, nerves,
// barycentric subdivision and the strict-order refinement.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cpr {

/// Finite set of points with a metric. Distinct points must be at positive
/// distance (the partition-of-unity construction divides by distances to
/// complements).
class FiniteMetricSpace {
 public:
  /// Throws SchemaError unless `metric` is square, symmetric, zero on the
  /// diagonal and positive off it.
  explicit FiniteMetricSpace(Eigen::MatrixXd metric);
  FiniteMetricSpace(Eigen::MatrixXd metric, Eigen::MatrixXd coords);

  /// Euclidean metric on the rows of `coords`.
  static FiniteMetricSpace euclidean(const Eigen::MatrixXd& coords);
  /// n equally spaced points on [a, b].
  static FiniteMetricSpace interval_grid(int n, double a = 0.0, double b = 1.0);
  /// n equally spaced points on a circle of circumference 1, geodesic metric;
  /// coordinates are the planar embedding (cos 2pi t, sin 2pi t).
  static FiniteMetricSpace circle_grid(int n);
  /// m x m grid on the flat torus [0,1)^2 with the wrap-around euclidean
  /// metric; coordinates are the angles in [0,1)^2.
  static FiniteMetricSpace torus_grid(int m);

  int size() const noexcept { return static_cast<int>(metric_.rows()); }
  double distance(int i, int j) const { return metric_(i, j); }
  const Eigen::MatrixXd& metric() const noexcept { return metric_; }
  const std::optional<Eigen::MatrixXd>& coords() const noexcept { return coords_; }
  double diameter() const;

  struct TriangleViolation {
    int i, j, k;
    double excess;  // d(i,k) - d(i,j) - d(j,k)
  };
  /// Worst violation of d(i,k) <= d(i,j) + d(j,k) beyond `tol`, if any.
  std::optional<TriangleViolation> triangle_violation(double tol = 1e-12) const;

  /// Disjoint union; cross distances are `gap`.
  static FiniteMetricSpace disjoint_union(const FiniteMetricSpace& a, const FiniteMetricSpace& b,
                                          double gap);

 private:
  Eigen::MatrixXd metric_;
  std::optional<Eigen::MatrixXd> coords_;
};

/// A family of point subsets. Members are kept sorted and duplicate-free.
struct Cover {
  std::vector<std::vector<int>> members;
  std::vector<std::string> labels;  // optional, empty or one per member

  Cover() = default;
  explicit Cover(std::vector<std::vector<int>> m, std::vector<std::string> l = {});

  int size() const noexcept { return static_cast<int>(members.size()); }
  /// Union of the members equals {0, ..., point_count-1}.
  bool covers(int point_count) const;
  /// For each point, the members containing it.
  std::vector<std::vector<int>> memberships(int point_count) const;
  /// Largest point index + 1 (0 for an empty cover).
  int point_bound() const;
};

/// Downward-closed family of vertex sets, stored by its maximal faces.
class SimplicialComplex {
 public:
  SimplicialComplex() = default;
  /// Any generating family; reduced to its maximal faces.
  SimplicialComplex(int vertex_count, std::vector<std::vector<int>> faces,
                    std::vector<std::string> labels = {});

  int vertex_count() const noexcept { return vertex_count_; }
  const std::vector<std::vector<int>>& facets() const noexcept { return facets_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  /// max |face| - 1, and -1 for the empty complex.
  int dimension() const;
  bool contains(const std::vector<int>& face) const;
  /// Every nonempty face, ordered by size and then lexicographically. Throws
  /// PreconditionError if there are more than `limit`.
  std::vector<std::vector<int>> faces(std::size_t limit = 2'000'000) const;
  /// Number of faces of each dimension.
  std::vector<std::int64_t> f_vector() const;

 private:
  int vertex_count_ = 0;
  std::vector<std::vector<int>> facets_;
  std::vector<std::string> labels_;
};

/// Maximal number of members through one point, minus one (-1 if no point
/// is covered).
int cover_order(const Cover& cover);

/// Members forming a largest pairwise-intersecting subfamily.
std::vector<int> intersection_clique(const Cover& cover);

/// Largest pairwise-intersecting subfamily size minus one (-1 for an empty
/// cover).
int cover_strict_order(const Cover& cover);

SimplicialComplex nerve(const Cover& cover);

/// Vertices are the faces of K, faces are inclusion chains.
SimplicialComplex barycentric_subdivision(const SimplicialComplex& k);

/// weights(lambda, x); columns sum to one.
struct PartitionOfUnity {
  Eigen::MatrixXd weights;
};

/// h_lambda(x) = d(x, X \ U_lambda) normalised over lambda, with distance 1
/// to an empty complement. Throws PreconditionError on an uncovered point.
PartitionOfUnity partition_of_unity(const FiniteMetricSpace& space, const Cover& cover);

struct StrictRefinement {
  Cover cover;                          // members V_s, nonempty only
  std::vector<std::vector<int>> faces;  // the nerve face s of each member
};

/// The open-star refinement through the barycentric subdivision of the
/// nerve: x lies in V_s when s is one of the level sets
/// {lambda : w_lambda(x) >= v} of its partition-of-unity weights w(x).
StrictRefinement strict_refinement(const FiniteMetricSpace& space, const Cover& cover);

struct RefinementCheck {
  bool ok = false;
  std::vector<int> assignment;  // member of U containing each member of V (-1 if none)
  int failing = -1;             // first member of V not inside any member of U
};

RefinementCheck refines(const Cover& v, const Cover& u);

/// Closed balls {y : d(x,y) <= radius}, one per point, duplicates removed.
Cover ball_cover(const FiniteMetricSpace& space, double radius);

/// Thickened Voronoi cells of a greedy radius-net: centres are picked in
/// index order (or in a seeded random order when `seed` is given) so that
/// every point is within `radius` of a centre, and point x joins the cell of
/// centre c when d(x,c) <= d(x, nearest centre) + slack.
Cover net_cover(const FiniteMetricSpace& space, double radius, double slack,
                std::optional<std::uint64_t> seed = std::nullopt);

/// Largest distance within any member.
double max_member_diameter(const FiniteMetricSpace& space, const Cover& cover);

/// Smallest positive distance between two points.
double min_separation(const FiniteMetricSpace& space);

/// Largest nearest-neighbour distance (infinite for a single point).
double resolution(const FiniteMetricSpace& space);

/// Largest r such that every point x lies in a member at distance >= r from
/// the member's complement (a member equal to X counts as infinitely thick).
double lebesgue_number(const FiniteMetricSpace& space, const Cover& cover);

std::string face_label(const std::vector<int>& face);

}  // namespace cpr
