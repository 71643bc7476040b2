#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace mmhard {

inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// Bipartite graph in CSR form. side[v] is 0 (left) or 1 (right).
struct CsrGraph {
  std::uint64_t n = 0;
  std::vector<std::uint8_t> side;
  std::vector<std::uint64_t> offsets;  // size n+1
  std::vector<std::uint32_t> adj;

  std::uint64_t degree(std::uint32_t v) const { return offsets[v + 1] - offsets[v]; }
};

// Non-owning view of CSR storage.
struct CsrView {
  std::uint64_t n = 0;
  const std::uint8_t* side = nullptr;
  const std::uint64_t* offsets = nullptr;
  const std::uint32_t* adj = nullptr;

  CsrView() = default;
  CsrView(std::uint64_t n_, const std::uint8_t* side_, const std::uint64_t* offsets_,
          const std::uint32_t* adj_)
      : n(n_), side(side_), offsets(offsets_), adj(adj_) {}
  CsrView(const CsrGraph& g) : n(g.n), side(g.side.data()), offsets(g.offsets.data()), adj(g.adj.data()) {}

  std::uint64_t degree(std::uint32_t v) const { return offsets[v + 1] - offsets[v]; }
};

struct HopcroftKarpResult {
  std::vector<std::uint32_t> mate;  // kNone when unmatched
  std::uint64_t size = 0;
  std::vector<std::uint32_t> cover;  // König cover, ascending
};

// Maximum matching plus König vertex cover. Left vertices are scanned in ascending id order
// and neighbors in stored order, so the result is reproducible.
inline HopcroftKarpResult hopcroft_karp(const CsrView& g) {
  constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();
  const std::uint64_t n = g.n;
  HopcroftKarpResult res;
  res.mate.assign(n, kNone);
  std::vector<std::uint32_t> left;
  for (std::uint32_t v = 0; v < n; ++v)
    if (g.side[v] == 0) left.push_back(v);

  // Greedy start.
  for (std::uint32_t u : left) {
    for (std::uint64_t k = g.offsets[u]; k < g.offsets[u + 1]; ++k) {
      const std::uint32_t v = g.adj[k];
      if (res.mate[v] == kNone) {
        res.mate[u] = v;
        res.mate[v] = u;
        ++res.size;
        break;
      }
    }
  }

  std::vector<std::uint32_t> dist(n, kInf);
  std::vector<std::uint32_t> queue;
  std::vector<std::uint64_t> it(n);
  std::vector<std::uint32_t> stack;
  queue.reserve(left.size());
  while (true) {
    queue.clear();
    for (std::uint32_t u : left) {
      if (res.mate[u] == kNone) {
        dist[u] = 0;
        queue.push_back(u);
      } else {
        dist[u] = kInf;
      }
    }
    bool found = false;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const std::uint32_t u = queue[h];
      for (std::uint64_t k = g.offsets[u]; k < g.offsets[u + 1]; ++k) {
        const std::uint32_t w = res.mate[g.adj[k]];
        if (w == kNone) {
          found = true;
        } else if (dist[w] == kInf) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
    if (!found) break;

    for (std::uint32_t u : left) it[u] = g.offsets[u];
    for (std::uint32_t root : left) {
      if (res.mate[root] != kNone) continue;
      stack.clear();
      stack.push_back(root);
      while (!stack.empty()) {
        const std::uint32_t x = stack.back();
        if (it[x] == g.offsets[x + 1]) {
          dist[x] = kInf;
          stack.pop_back();
          continue;
        }
        const std::uint32_t v = g.adj[it[x]++];
        const std::uint32_t w = res.mate[v];
        if (w == kNone) {
          for (std::size_t i = stack.size(); i-- > 0;) {
            const std::uint32_t ui = stack[i];
            const std::uint32_t vi = g.adj[it[ui] - 1];
            res.mate[ui] = vi;
            res.mate[vi] = ui;
          }
          ++res.size;
          break;
        }
        if (dist[w] != kInf && dist[w] == dist[x] + 1) stack.push_back(w);
      }
    }
  }

  // König: Z = vertices reachable from free left vertices by alternating paths.
  std::vector<std::uint8_t> reached(n, 0);
  queue.clear();
  for (std::uint32_t u : left)
    if (res.mate[u] == kNone) {
      reached[u] = 1;
      queue.push_back(u);
    }
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const std::uint32_t u = queue[h];
    for (std::uint64_t k = g.offsets[u]; k < g.offsets[u + 1]; ++k) {
      const std::uint32_t v = g.adj[k];
      if (reached[v]) continue;
      reached[v] = 1;
      const std::uint32_t w = res.mate[v];
      if (w != kNone && !reached[w]) {
        reached[w] = 1;
        queue.push_back(w);
      }
    }
  }
  for (std::uint32_t v = 0; v < n; ++v) {
    const bool in_cover = g.side[v] == 0 ? !reached[v] : reached[v] != 0;
    if (in_cover && g.degree(v) > 0) res.cover.push_back(v);
  }
  return res;
}

}  // namespace mmhard
