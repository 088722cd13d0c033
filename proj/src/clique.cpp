#include "cpr/clique.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "cpr/error.hpp"

namespace cpr {

Graph::Graph(int n) : n_(n), words_((n + 63) / 64) {
  if (n < 0) throw PreconditionError("graph size must be non-negative");
  adj_.assign(static_cast<size_t>(n), std::vector<std::uint64_t>(static_cast<size_t>(words_), 0));
}

void Graph::add_edge(int a, int b) {
  if (a == b) return;
  adj_[static_cast<size_t>(a)][static_cast<size_t>(b / 64)] |= std::uint64_t{1} << (b % 64);
  adj_[static_cast<size_t>(b)][static_cast<size_t>(a / 64)] |= std::uint64_t{1} << (a % 64);
}

bool Graph::adjacent(int a, int b) const {
  return (adj_[static_cast<size_t>(a)][static_cast<size_t>(b / 64)] >> (b % 64)) & 1U;
}

int Graph::degree(int v) const {
  int d = 0;
  for (std::uint64_t w : adj_[static_cast<size_t>(v)]) d += std::popcount(w);
  return d;
}

namespace {

struct Search {
  const Graph& g;
  std::vector<int> current;
  std::vector<int> best;

  // Greedy sequential colouring of `cand` (in the given order). On return
  // `order` lists the candidates by colour class and `bound[k]` is the number
  // of colours used up to order[k].
  void colour(const std::vector<int>& cand, std::vector<int>& order, std::vector<int>& bound) const {
    order.clear();
    bound.clear();
    std::vector<int> rest = cand;
    int colour_count = 0;
    while (!rest.empty()) {
      ++colour_count;
      std::vector<int> cls;
      std::vector<int> left;
      for (int v : rest) {
        bool free = true;
        for (int u : cls) {
          if (g.adjacent(u, v)) {
            free = false;
            break;
          }
        }
        if (free) {
          cls.push_back(v);
        } else {
          left.push_back(v);
        }
      }
      for (int v : cls) {
        order.push_back(v);
        bound.push_back(colour_count);
      }
      rest.swap(left);
    }
  }

  void expand(std::vector<int> cand) {
    std::vector<int> order;
    std::vector<int> bound;
    colour(cand, order, bound);
    for (int k = static_cast<int>(order.size()) - 1; k >= 0; --k) {
      if (current.size() + static_cast<size_t>(bound[static_cast<size_t>(k)]) <= best.size()) return;
      int v = order[static_cast<size_t>(k)];
      current.push_back(v);
      std::vector<int> next;
      for (int j = 0; j < k; ++j) {
        int w = order[static_cast<size_t>(j)];
        if (g.adjacent(v, w)) next.push_back(w);
      }
      if (next.empty()) {
        if (current.size() > best.size()) best = current;
      } else {
        expand(std::move(next));
      }
      current.pop_back();
    }
  }
};

}  // namespace

std::vector<int> max_clique(const Graph& g) {
  if (g.size() == 0) return {};
  std::vector<int> cand(static_cast<size_t>(g.size()));
  std::iota(cand.begin(), cand.end(), 0);
  // High-degree vertices first: they end up last in the colour order, which
  // is where the search branches first.
  std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) { return g.degree(a) > g.degree(b); });
  Search s{g, {}, {cand.front()}};
  s.expand(cand);
  std::sort(s.best.begin(), s.best.end());
  return s.best;
}

}  // namespace cpr
