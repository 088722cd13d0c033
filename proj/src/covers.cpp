#include "cpr/covers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "cpr/clique.hpp"
#include "cpr/error.hpp"

namespace cpr {

// ---------------------------------------------------------------------------
// FiniteMetricSpace

FiniteMetricSpace::FiniteMetricSpace(Eigen::MatrixXd metric) : metric_(std::move(metric)) {
  if (metric_.rows() != metric_.cols()) throw SchemaError("metric must be a square matrix");
  if (metric_.rows() == 0) throw SchemaError("metric space needs at least one point");
  for (Eigen::Index i = 0; i < metric_.rows(); ++i) {
    if (metric_(i, i) != 0.0) throw SchemaError("metric must vanish on the diagonal");
    for (Eigen::Index j = i + 1; j < metric_.cols(); ++j) {
      if (!std::isfinite(metric_(i, j)) || metric_(i, j) != metric_(j, i)) {
        std::ostringstream os;
        os << "metric is not symmetric at (" << i << "," << j << ")";
        throw SchemaError(os.str());
      }
      if (!(metric_(i, j) > 0.0)) {
        std::ostringstream os;
        os << "distinct points " << i << " and " << j << " are at distance " << metric_(i, j);
        throw SchemaError(os.str());
      }
    }
  }
}

FiniteMetricSpace::FiniteMetricSpace(Eigen::MatrixXd metric, Eigen::MatrixXd coords)
    : FiniteMetricSpace(std::move(metric)) {
  if (coords.rows() != metric_.rows()) throw SchemaError("one coordinate row per point required");
  coords_ = std::move(coords);
}

FiniteMetricSpace FiniteMetricSpace::euclidean(const Eigen::MatrixXd& coords) {
  Eigen::Index n = coords.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = (coords.row(i) - coords.row(j)).norm();
    }
  }
  return FiniteMetricSpace(std::move(d), coords);
}

FiniteMetricSpace FiniteMetricSpace::interval_grid(int n, double a, double b) {
  if (n < 1) throw PreconditionError("grid needs at least one point");
  Eigen::MatrixXd c(n, 1);
  for (int i = 0; i < n; ++i) c(i, 0) = n == 1 ? a : a + (b - a) * i / (n - 1);
  return euclidean(c);
}

FiniteMetricSpace FiniteMetricSpace::circle_grid(int n) {
  if (n < 1) throw PreconditionError("grid needs at least one point");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd c(n, 2);
  for (int i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / n;
    c(i, 0) = std::cos(2 * std::numbers::pi * t);
    c(i, 1) = std::sin(2 * std::numbers::pi * t);
    for (int j = i + 1; j < n; ++j) {
      int k = j - i;
      d(i, j) = d(j, i) = static_cast<double>(std::min(k, n - k)) / n;
    }
  }
  return FiniteMetricSpace(std::move(d), std::move(c));
}

FiniteMetricSpace FiniteMetricSpace::torus_grid(int m) {
  if (m < 1) throw PreconditionError("grid needs at least one point");
  int n = m * m;
  Eigen::MatrixXd c(n, 2);
  for (int i = 0; i < n; ++i) {
    c(i, 0) = static_cast<double>(i % m) / m;
    c(i, 1) = static_cast<double>(i / m) / m;
  }
  auto wrap = [m](int a, int b) {
    int k = std::abs(a - b);
    return static_cast<double>(std::min(k, m - k)) / m;
  };
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double dx = wrap(i % m, j % m);
      double dy = wrap(i / m, j / m);
      d(i, j) = d(j, i) = std::hypot(dx, dy);
    }
  }
  return FiniteMetricSpace(std::move(d), std::move(c));
}

double FiniteMetricSpace::diameter() const { return metric_.maxCoeff(); }

std::optional<FiniteMetricSpace::TriangleViolation> FiniteMetricSpace::triangle_violation(
    double tol) const {
  std::optional<TriangleViolation> worst;
  int n = size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double excess = metric_(i, k) - metric_(i, j) - metric_(j, k);
        if (excess > tol && (!worst || excess > worst->excess)) worst = TriangleViolation{i, j, k, excess};
      }
    }
  }
  return worst;
}

FiniteMetricSpace FiniteMetricSpace::disjoint_union(const FiniteMetricSpace& a,
                                                    const FiniteMetricSpace& b, double gap) {
  int na = a.size();
  int nb = b.size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(na + nb, na + nb, gap);
  d.topLeftCorner(na, na) = a.metric_;
  d.bottomRightCorner(nb, nb) = b.metric_;
  return FiniteMetricSpace(std::move(d));
}

// ---------------------------------------------------------------------------
// Cover

Cover::Cover(std::vector<std::vector<int>> m, std::vector<std::string> l)
    : members(std::move(m)), labels(std::move(l)) {
  for (auto& member : members) {
    std::sort(member.begin(), member.end());
    member.erase(std::unique(member.begin(), member.end()), member.end());
    if (!member.empty() && member.front() < 0) throw SchemaError("negative point index in cover");
  }
  if (!labels.empty() && labels.size() != members.size()) {
    throw SchemaError("cover labels must match the members one to one");
  }
}

int Cover::point_bound() const {
  int n = 0;
  for (const auto& m : members) {
    if (!m.empty()) n = std::max(n, m.back() + 1);
  }
  return n;
}

bool Cover::covers(int point_count) const {
  std::vector<char> seen(static_cast<size_t>(point_count), 0);
  for (const auto& m : members) {
    for (int x : m) {
      if (x < point_count) seen[static_cast<size_t>(x)] = 1;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

std::vector<std::vector<int>> Cover::memberships(int point_count) const {
  std::vector<std::vector<int>> out(static_cast<size_t>(point_count));
  for (int l = 0; l < size(); ++l) {
    for (int x : members[static_cast<size_t>(l)]) {
      if (x >= point_count) throw PreconditionError("cover refers to a point outside the space");
      out[static_cast<size_t>(x)].push_back(l);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SimplicialComplex

namespace {

bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<std::vector<int>> maximal_faces(std::vector<std::vector<int>> faces) {
  for (auto& f : faces) {
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
  }
  faces.erase(std::remove_if(faces.begin(), faces.end(), [](const auto& f) { return f.empty(); }),
              faces.end());
  std::sort(faces.begin(), faces.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  std::vector<std::vector<int>> kept;
  for (auto& f : faces) {
    bool dominated = false;
    for (const auto& k : kept) {
      if (k.size() > f.size() && is_subset(f, k)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(std::move(f));
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace

SimplicialComplex::SimplicialComplex(int vertex_count, std::vector<std::vector<int>> faces,
                                     std::vector<std::string> labels)
    : vertex_count_(vertex_count), facets_(maximal_faces(std::move(faces))), labels_(std::move(labels)) {
  for (const auto& f : facets_) {
    if (f.front() < 0 || f.back() >= vertex_count_) throw SchemaError("face refers to an unknown vertex");
  }
  if (!labels_.empty() && static_cast<int>(labels_.size()) != vertex_count_) {
    throw SchemaError("complex labels must match the vertices one to one");
  }
}

int SimplicialComplex::dimension() const {
  int d = -1;
  for (const auto& f : facets_) d = std::max(d, static_cast<int>(f.size()) - 1);
  return d;
}

bool SimplicialComplex::contains(const std::vector<int>& face) const {
  std::vector<int> s = face;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (s.empty()) return true;
  return std::any_of(facets_.begin(), facets_.end(), [&](const auto& f) { return is_subset(s, f); });
}

std::vector<std::vector<int>> SimplicialComplex::faces(std::size_t limit) const {
  std::set<std::vector<int>> all;
  for (const auto& f : facets_) {
    if (f.size() >= 40) throw PreconditionError("complex too large to enumerate its faces");
    std::uint64_t subsets = std::uint64_t{1} << f.size();
    for (std::uint64_t mask = 1; mask < subsets; ++mask) {
      std::vector<int> face;
      for (size_t b = 0; b < f.size(); ++b) {
        if ((mask >> b) & 1U) face.push_back(f[b]);
      }
      all.insert(std::move(face));
      if (all.size() > limit) {
        std::ostringstream os;
        os << "complex has more than " << limit << " faces";
        throw PreconditionError(os.str());
      }
    }
  }
  std::vector<std::vector<int>> out(all.begin(), all.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return out;
}

std::vector<std::int64_t> SimplicialComplex::f_vector() const {
  std::vector<std::int64_t> f(static_cast<size_t>(dimension() + 1), 0);
  for (const auto& face : faces()) ++f[face.size() - 1];
  return f;
}

std::string face_label(const std::vector<int>& face) {
  std::ostringstream os;
  os << '{';
  for (size_t i = 0; i < face.size(); ++i) os << (i ? "," : "") << face[i];
  os << '}';
  return os.str();
}

// ---------------------------------------------------------------------------
// Orders

int cover_order(const Cover& cover) {
  auto mem = cover.memberships(cover.point_bound());
  int best = 0;
  for (const auto& m : mem) best = std::max(best, static_cast<int>(m.size()));
  return best - 1;
}

namespace {

std::vector<std::vector<std::uint64_t>> member_bitsets(const Cover& cover) {
  int n = cover.point_bound();
  size_t words = static_cast<size_t>((n + 63) / 64);
  std::vector<std::vector<std::uint64_t>> bits(cover.members.size(), std::vector<std::uint64_t>(words, 0));
  for (size_t l = 0; l < cover.members.size(); ++l) {
    for (int x : cover.members[l]) bits[l][static_cast<size_t>(x / 64)] |= std::uint64_t{1} << (x % 64);
  }
  return bits;
}

bool intersects(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  for (size_t w = 0; w < a.size(); ++w) {
    if (a[w] & b[w]) return true;
  }
  return false;
}

}  // namespace

std::vector<int> intersection_clique(const Cover& cover) {
  auto bits = member_bitsets(cover);
  Graph g(cover.size());
  std::vector<int> nonempty;
  for (int a = 0; a < cover.size(); ++a) {
    if (cover.members[static_cast<size_t>(a)].empty()) continue;
    nonempty.push_back(a);
    for (int b = a + 1; b < cover.size(); ++b) {
      if (intersects(bits[static_cast<size_t>(a)], bits[static_cast<size_t>(b)])) g.add_edge(a, b);
    }
  }
  std::vector<int> clique = max_clique(g);
  // Isolated empty members are not part of any intersecting family.
  if (clique.size() == 1 && cover.members[static_cast<size_t>(clique[0])].empty()) {
    if (nonempty.empty()) return {};
    return {nonempty.front()};
  }
  return clique;
}

int cover_strict_order(const Cover& cover) { return static_cast<int>(intersection_clique(cover).size()) - 1; }

SimplicialComplex nerve(const Cover& cover) {
  auto mem = cover.memberships(cover.point_bound());
  std::vector<std::string> labels = cover.labels;
  return SimplicialComplex(cover.size(), std::move(mem), std::move(labels));
}

SimplicialComplex barycentric_subdivision(const SimplicialComplex& k) {
  std::vector<std::vector<int>> verts = k.faces();
  std::map<std::vector<int>, int> index;
  std::vector<std::string> labels;
  labels.reserve(verts.size());
  for (size_t i = 0; i < verts.size(); ++i) {
    index.emplace(verts[i], static_cast<int>(i));
    labels.push_back(face_label(verts[i]));
  }
  std::vector<std::vector<int>> flags;
  for (const auto& facet : k.facets()) {
    std::vector<int> perm = facet;
    do {
      std::vector<int> chain;
      std::vector<int> prefix;
      for (int v : perm) {
        prefix.insert(std::upper_bound(prefix.begin(), prefix.end(), v), v);
        chain.push_back(index.at(prefix));
      }
      flags.push_back(std::move(chain));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return SimplicialComplex(static_cast<int>(verts.size()), std::move(flags), std::move(labels));
}

// ---------------------------------------------------------------------------
// Partitions of unity and refinements

PartitionOfUnity partition_of_unity(const FiniteMetricSpace& space, const Cover& cover) {
  int n = space.size();
  int m = cover.size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, n);
  std::vector<char> inside(static_cast<size_t>(n));
  for (int l = 0; l < m; ++l) {
    std::fill(inside.begin(), inside.end(), 0);
    for (int x : cover.members[static_cast<size_t>(l)]) {
      if (x >= n) throw PreconditionError("cover refers to a point outside the space");
      inside[static_cast<size_t>(x)] = 1;
    }
    for (int x : cover.members[static_cast<size_t>(l)]) {
      double d = INFINITY;
      for (int y = 0; y < n; ++y) {
        if (!inside[static_cast<size_t>(y)]) d = std::min(d, space.distance(x, y));
      }
      w(l, x) = std::isfinite(d) ? d : 1.0;
    }
  }
  for (int x = 0; x < n; ++x) {
    double s = w.col(x).sum();
    if (!(s > 0.0)) {
      std::ostringstream os;
      os << "point " << x << " is not covered";
      throw PreconditionError(os.str());
    }
    w.col(x) /= s;
  }
  return {std::move(w)};
}

StrictRefinement strict_refinement(const FiniteMetricSpace& space, const Cover& cover) {
  PartitionOfUnity pou = partition_of_unity(space, cover);
  std::map<std::vector<int>, std::vector<int>> members;
  int m = cover.size();
  for (int x = 0; x < space.size(); ++x) {
    std::vector<std::pair<double, int>> positive;
    for (int l = 0; l < m; ++l) {
      double v = pou.weights(l, x);
      if (v > 0.0) positive.emplace_back(v, l);
    }
    std::sort(positive.begin(), positive.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<int> level;
    for (size_t k = 0; k < positive.size(); ++k) {
      level.insert(std::upper_bound(level.begin(), level.end(), positive[k].second), positive[k].second);
      bool last_of_value = k + 1 == positive.size() || positive[k + 1].first != positive[k].first;
      if (last_of_value) members[level].push_back(x);
    }
  }
  StrictRefinement out;
  std::vector<std::vector<int>> sets;
  std::vector<std::string> labels;
  for (auto& [face, pts] : members) {
    out.faces.push_back(face);
    labels.push_back(face_label(face));
    sets.push_back(std::move(pts));
  }
  out.cover = Cover(std::move(sets), std::move(labels));
  return out;
}

RefinementCheck refines(const Cover& v, const Cover& u) {
  RefinementCheck out;
  int n = std::max(v.point_bound(), u.point_bound());
  Cover padded_u = u;
  // Bitsets over a common point range.
  padded_u.members.push_back({n});
  auto ubits = member_bitsets(padded_u);
  ubits.pop_back();
  out.assignment.assign(v.members.size(), -1);
  for (size_t i = 0; i < v.members.size(); ++i) {
    for (size_t j = 0; j < ubits.size(); ++j) {
      const auto& bits = ubits[j];
      bool inside = std::all_of(v.members[i].begin(), v.members[i].end(), [&](int x) {
        return (bits[static_cast<size_t>(x / 64)] >> (x % 64)) & 1U;
      });
      if (inside) {
        out.assignment[i] = static_cast<int>(j);
        break;
      }
    }
    if (out.assignment[i] < 0 && out.failing < 0) out.failing = static_cast<int>(i);
  }
  out.ok = out.failing < 0;
  return out;
}

Cover ball_cover(const FiniteMetricSpace& space, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("ball radius must be positive");
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> members;
  for (int x = 0; x < space.size(); ++x) {
    std::vector<int> ball;
    for (int y = 0; y < space.size(); ++y) {
      if (space.distance(x, y) <= radius) ball.push_back(y);
    }
    if (seen.insert(ball).second) members.push_back(std::move(ball));
  }
  return Cover(std::move(members));
}

Cover net_cover(const FiniteMetricSpace& space, double radius, double slack,
                std::optional<std::uint64_t> seed) {
  if (!(radius > 0.0)) throw PreconditionError("net radius must be positive");
  if (!(slack >= 0.0)) throw PreconditionError("net slack must be non-negative");
  int n = space.size();
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (seed) {
    std::mt19937_64 rng(*seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<int> centres;
  std::vector<double> nearest(static_cast<size_t>(n), INFINITY);
  for (int x : order) {
    if (nearest[static_cast<size_t>(x)] <= radius) continue;
    centres.push_back(x);
    for (int y = 0; y < n; ++y) {
      nearest[static_cast<size_t>(y)] = std::min(nearest[static_cast<size_t>(y)], space.distance(x, y));
    }
  }
  std::sort(centres.begin(), centres.end());
  std::vector<std::vector<int>> cells(centres.size());
  for (int x = 0; x < n; ++x) {
    for (size_t c = 0; c < centres.size(); ++c) {
      if (space.distance(x, centres[c]) <= nearest[static_cast<size_t>(x)] + slack) cells[c].push_back(x);
    }
  }
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> members;
  for (auto& cell : cells) {
    if (seen.insert(cell).second) members.push_back(std::move(cell));
  }
  return Cover(std::move(members));
}

double max_member_diameter(const FiniteMetricSpace& space, const Cover& cover) {
  double d = 0.0;
  for (const auto& m : cover.members) {
    for (size_t a = 0; a < m.size(); ++a) {
      for (size_t b = a + 1; b < m.size(); ++b) d = std::max(d, space.distance(m[a], m[b]));
    }
  }
  return d;
}

double min_separation(const FiniteMetricSpace& space) {
  double d = INFINITY;
  for (int i = 0; i < space.size(); ++i) {
    for (int j = i + 1; j < space.size(); ++j) d = std::min(d, space.distance(i, j));
  }
  return d;
}

double resolution(const FiniteMetricSpace& space) {
  double r = space.size() > 1 ? 0.0 : INFINITY;
  for (int i = 0; i < space.size(); ++i) {
    double nn = INFINITY;
    for (int j = 0; j < space.size(); ++j) {
      if (j != i) nn = std::min(nn, space.distance(i, j));
    }
    if (space.size() > 1) r = std::max(r, nn);
  }
  return r;
}

double lebesgue_number(const FiniteMetricSpace& space, const Cover& cover) {
  int n = space.size();
  std::vector<double> best(static_cast<size_t>(n), -INFINITY);
  std::vector<char> inside(static_cast<size_t>(n));
  for (const auto& m : cover.members) {
    std::fill(inside.begin(), inside.end(), 0);
    for (int x : m) inside[static_cast<size_t>(x)] = 1;
    for (int x : m) {
      double d = INFINITY;
      for (int y = 0; y < n; ++y) {
        if (!inside[static_cast<size_t>(y)]) d = std::min(d, space.distance(x, y));
      }
      best[static_cast<size_t>(x)] = std::max(best[static_cast<size_t>(x)], d);
    }
  }
  double l = INFINITY;
  for (double b : best) l = std::min(l, b);
  return n == 0 ? INFINITY : l;
}

}  // namespace cpr
