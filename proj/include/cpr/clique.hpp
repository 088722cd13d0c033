#pragma once

// Exact maximum clique by branch and bound with a greedy colouring bound
// (the MCQ scheme of Tomita and Seki).

#include <cstdint>
#include <vector>

namespace cpr {

/// Simple undirected graph on vertices 0..n-1 with bitset adjacency rows.
class Graph {
 public:
  explicit Graph(int n);

  int size() const noexcept { return n_; }
  void add_edge(int a, int b);
  bool adjacent(int a, int b) const;
  int degree(int v) const;

  const std::vector<std::uint64_t>& row(int v) const { return adj_[static_cast<size_t>(v)]; }
  int words() const noexcept { return words_; }

 private:
  int n_;
  int words_;
  std::vector<std::vector<std::uint64_t>> adj_;
};

/// Vertices of one maximum clique, ascending. Empty for the empty graph.
std::vector<int> max_clique(const Graph& g);

}  // namespace cpr
