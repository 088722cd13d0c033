#pragma once

// Shared constructions for the test programs.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cpr/covers.hpp"
#include "cpr/cpmap.hpp"
#include "cpr/random.hpp"

namespace fx {

using namespace cpr;

inline Matrix diag_matrix(std::initializer_list<double> v) {
  Matrix m = Matrix::Zero(v.size(), v.size());
  int i = 0;
  for (double x : v) m(i, i) = x, ++i;
  return m;
}

inline Element diag(std::initializer_list<double> v) { return Element::from_matrix(diag_matrix(v)); }

inline CPMap identity_map(int n) {
  Algebra m = Algebra::matrix(n);
  return CPMap::from_function(m, m, [](const Element& x) { return x; }, CodomainKind::matrix);
}

inline CPMap transpose_map(int n) {
  Algebra m = Algebra::matrix(n);
  return CPMap::from_function(
      m, m, [](const Element& x) { return Element::from_matrix(Matrix(x.block(0)).transpose()); },
      CodomainKind::matrix);
}

/// x -> tr(x)/n * 1 on M_n.
inline CPMap trace_map(int n) {
  Algebra m = Algebra::matrix(n);
  return CPMap::from_function(
      m, m,
      [n](const Element& x) {
        return Element::from_matrix(Matrix::Identity(n, n) * (Matrix(x.block(0)).trace() / double(n)));
      },
      CodomainKind::matrix);
}

/// x -> x (x) d from M_n into M_{n k}.
inline CPMap tensor_diag_map(int n, const Matrix& d) {
  Algebra dom = Algebra::matrix(n);
  Algebra cod = Algebra::matrix(n * static_cast<int>(d.rows()));
  return CPMap::from_function(
      dom, cod, [d](const Element& x) { return Element::from_matrix(kron(Matrix(x.block(0)), d)); },
      CodomainKind::matrix);
}

/// x -> v* x v for a (domain size) x N matrix v.
inline CPMap conjugation_map(const Matrix& v) {
  Algebra dom = Algebra::matrix(static_cast<int>(v.rows()));
  Algebra cod = Algebra::matrix(static_cast<int>(v.cols()));
  return CPMap::from_function(
      dom, cod, [v](const Element& x) { return Element::from_matrix(v.adjoint() * Matrix(x.block(0)) * v); },
      CodomainKind::matrix);
}

/// Random completely positive map sum_b sum_k V_bk* x_b V_bk into M_n,
/// scaled to a contraction when `contraction` is set.
inline CPMap random_cp_map(const Algebra& dom, int n, Rng& rng, int kraus = 2, bool contraction = true) {
  std::vector<std::vector<Matrix>> v(dom.block_count());
  for (int b = 0; b < dom.block_count(); ++b)
    for (int k = 0; k < kraus; ++k) v[b].push_back(random_gaussian(dom.block_size(b), n, rng));
  auto apply = [v](const Element& x) {
    const int n = static_cast<int>(v[0][0].cols());
    Matrix out = Matrix::Zero(n, n);
    for (std::size_t b = 0; b < v.size(); ++b)
      for (const auto& k : v[b]) out += k.adjoint() * Matrix(x.block(static_cast<int>(b))) * k;
    return Element::from_matrix(out);
  };
  Algebra cod = Algebra::matrix(n);
  CPMap phi = CPMap::from_function(dom, cod, apply, CodomainKind::matrix);
  if (!contraction) return phi;
  const double s = norm(phi.unit_image());
  return CPMap::from_matrix(dom, cod, phi.images() / Complex(s, 0), CodomainKind::matrix);
}

/// Abelian map C^s -> C^P with generator images the given functions.
inline CPMap abelian_map(const std::vector<Eigen::VectorXd>& images) {
  const int p = static_cast<int>(images.front().size());
  Matrix m(p, images.size());
  for (std::size_t k = 0; k < images.size(); ++k) m.col(k) = images[k].cast<Complex>();
  return CPMap::from_matrix(Algebra::abelian(static_cast<int>(images.size())), Algebra::abelian(p), m,
                            CodomainKind::functions);
}

/// Hat function supported on [a, b] with peak at the midpoint, on the grid.
inline Eigen::VectorXd hat(const FiniteMetricSpace& grid, double a, double b) {
  Eigen::VectorXd f(grid.size());
  const double mid = (a + b) / 2, half = (b - a) / 2;
  for (int i = 0; i < grid.size(); ++i) {
    double x = (*grid.coords())(i, 0);
    f(i) = std::max(0.0, 1.0 - std::abs(x - mid) / half);
  }
  return f;
}

/// Members {i : a <= x_i <= b} of a one-dimensional grid.
inline std::vector<int> interval_member(const FiniteMetricSpace& grid, double a, double b) {
  std::vector<int> m;
  for (int i = 0; i < grid.size(); ++i) {
    double x = (*grid.coords())(i, 0);
    if (x >= a - 1e-12 && x <= b + 1e-12) m.push_back(i);
  }
  return m;
}

inline Cover interval_chain(const FiniteMetricSpace& grid) {
  return Cover({interval_member(grid, 0, 0.4), interval_member(grid, 0.3, 0.7), interval_member(grid, 0.6, 1)});
}

/// Arcs [a, b] (wrapping past 1) on circle_grid(n), by parameter i / n.
inline std::vector<int> arc_member(int n, double a, double b) {
  std::vector<int> m;
  for (int i = 0; i < n; ++i) {
    double t = double(i) / n;
    bool in = a <= b ? (t >= a - 1e-12 && t <= b + 1e-12) : (t >= a - 1e-12 || t <= b + 1e-12);
    if (in) m.push_back(i);
  }
  return m;
}

inline Cover three_arcs(int n) {
  return Cover({arc_member(n, 0.0, 0.4), arc_member(n, 0.3, 0.7), arc_member(n, 0.6, 0.1)});
}

/// Largest pairwise-intersecting subfamily minus one, by subset enumeration.
inline int brute_strict_order(const std::vector<std::vector<bool>>& adj) {
  const int s = static_cast<int>(adj.size());
  int best = 0;
  for (std::uint32_t mask = 1; mask < (1u << s); ++mask) {
    int size = __builtin_popcount(mask);
    if (size <= best) continue;
    bool ok = true;
    for (int i = 0; i < s && ok; ++i)
      for (int j = i + 1; j < s && ok; ++j)
        if ((mask >> i & 1) && (mask >> j & 1) && !adj[i][j]) ok = false;
    if (ok) best = size;
  }
  return best - 1;
}

}  // namespace fx
