#pragma once

// Bipartite machinery behind the bottleneck solvers: Hopcroft-Karp maximum
// matching on threshold graphs and min-max (bottleneck) assignment via binary
// search over the sorted distance multiset. Deterministic: adjacency is kept
// in sorted order and candidate thresholds are processed lexicographically,
// so witnesses are reproducible.

#include "latmet/common.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

namespace latmet {

class HopcroftKarp {
 public:
  HopcroftKarp(int nl, int nr) : nl_(nl), nr_(nr), adj_(nl) {}

  void add_edge(int l, int r) { adj_[l].push_back(r); }

  void sort_adjacency() {
    for (auto& a : adj_) std::sort(a.begin(), a.end());
  }

  // Returns the size of a maximum matching; match_l[l] = r or -1.
  int solve(std::vector<int>& match_l, std::vector<int>& match_r) {
    match_l.assign(nl_, -1);
    match_r.assign(nr_, -1);
    int matched = 0;
    std::vector<int> dist(nl_);
    std::vector<int> queue(nl_);
    for (;;) {
      // BFS layering from free left vertices.
      int qh = 0, qt = 0;
      for (int u = 0; u < nl_; ++u) {
        if (match_l[u] < 0) {
          dist[u] = 0;
          queue[qt++] = u;
        } else {
          dist[u] = -1;
        }
      }
      bool reachable_free = false;
      while (qh < qt) {
        int u = queue[qh++];
        for (int v : adj_[u]) {
          int w = match_r[v];
          if (w < 0) {
            reachable_free = true;
          } else if (dist[w] < 0) {
            dist[w] = dist[u] + 1;
            queue[qt++] = w;
          }
        }
      }
      if (!reachable_free) break;
      // DFS augmentation along layered paths.
      std::vector<char> visited(nl_, 0);
      std::function<bool(int)> dfs = [&](int u) -> bool {
        visited[u] = 1;
        for (int v : adj_[u]) {
          int w = match_r[v];
          if (w < 0 || (!visited[w] && dist[w] == dist[u] + 1 && dfs(w))) {
            match_l[u] = v;
            match_r[v] = u;
            return true;
          }
        }
        return false;
      };
      int found = 0;
      for (int u = 0; u < nl_; ++u)
        if (match_l[u] < 0 && !visited[u] && dfs(u)) ++found;
      if (found == 0) break;
      matched += found;
    }
    return matched;
  }

 private:
  int nl_, nr_;
  std::vector<std::vector<int>> adj_;
};

struct WeightedEdge {
  int l = 0, r = 0;
  double w = 0.0;
};

struct AssignmentResult {
  double cost = 0.0;            // max pair distance of the optimal assignment
  std::vector<int> match;       // match[l] = r
};

// Min-max perfect assignment over an explicit edge list. Returns nullopt if
// no perfect matching exists even using every listed edge.
inline std::optional<AssignmentResult> bottleneck_assignment(int n, std::vector<WeightedEdge> edges) {
  if (n == 0) return AssignmentResult{0.0, {}};
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.w != b.w) return a.w < b.w;
    if (a.l != b.l) return a.l < b.l;
    return a.r < b.r;
  });

  auto feasible = [&](std::size_t upto, std::vector<int>* out) {
    HopcroftKarp hk(n, n);
    for (std::size_t e = 0; e < upto; ++e) hk.add_edge(edges[e].l, edges[e].r);
    hk.sort_adjacency();
    std::vector<int> ml, mr;
    int m = hk.solve(ml, mr);
    if (m == n && out) *out = ml;
    return m == n;
  };

  if (!feasible(edges.size(), nullptr)) return std::nullopt;

  // Binary search for the minimal feasible prefix. Every perfect matching in
  // that prefix must use its last edge, so the optimum equals its weight.
  std::size_t lo = n, hi = edges.size();
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(mid, nullptr))
      hi = mid;
    else
      lo = mid + 1;
  }
  std::vector<int> match;
  feasible(lo, &match);
  AssignmentResult res;
  res.match = std::move(match);
  res.cost = edges[lo - 1].w;
  return res;
}

// Min-max assignment with distances given by a callback (evaluated once per
// pair). If upper_hint > 0, only pairs within the hint enter the threshold
// search; the hint escalates until a perfect matching exists. The complete
// graph on n+n vertices always has one, so this terminates.
inline std::optional<AssignmentResult> bottleneck_assignment_pruned(
    int n, const std::function<double(int, int)>& dist, double upper_hint, double max_cost) {
  if (n == 0) return AssignmentResult{0.0, {}};
  std::vector<double> w(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w[static_cast<std::size_t>(i) * n + j] = dist(i, j);
  double bound = upper_hint > 0 ? upper_hint : max_cost;
  for (;;) {
    std::vector<WeightedEdge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double wij = w[static_cast<std::size_t>(i) * n + j];
        if (wij <= bound + kTol) edges.push_back({i, j, wij});
      }
    auto res = bottleneck_assignment(n, std::move(edges));
    if (res) return res;
    if (bound >= max_cost) return std::nullopt;
    bound = std::min(max_cost, bound * 2.0);
  }
}

}  // namespace latmet
