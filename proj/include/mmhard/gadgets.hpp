#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mmhard/rng.hpp"

namespace mmhard {

enum class GadgetErrc { HandshakeViolation, RepairStall, TooLarge, Infeasible };

class GadgetError : public std::runtime_error {
 public:
  GadgetError(GadgetErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  GadgetErrc code() const { return code_; }

 private:
  GadgetErrc code_;
};

// Edges are grouped by left vertex: edges[l*left_degree .. (l+1)*left_degree) belong to l.
struct BipartiteGadget {
  std::uint64_t left_size = 0;
  std::uint64_t right_size = 0;
  std::uint64_t left_degree = 0;
  std::uint64_t right_degree = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  bool valid() const {
    if (left_size * left_degree != right_size * right_degree) return false;
    if (edges.size() != left_size * left_degree) return false;
    std::vector<std::uint64_t> rdeg(right_size, 0);
    std::vector<std::uint64_t> ldeg(left_size, 0);
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    for (auto [l, r] : edges) {
      if (l >= left_size || r >= right_size) return false;
      ++ldeg[l];
      ++rdeg[r];
    }
    return std::all_of(ldeg.begin(), ldeg.end(), [&](auto x) { return x == left_degree; }) &&
           std::all_of(rdeg.begin(), rdeg.end(), [&](auto x) { return x == right_degree; });
  }

  // Sorted edge list; equal for gadgets with identical edge sets.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> canonical() const {
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    return sorted;
  }
};

// Pairs (left, right) that must not be used.
using ForbiddenPair = std::function<bool(std::uint32_t, std::uint32_t)>;

namespace detail {

class SlotGraph {
 public:
  SlotGraph(std::uint64_t nl, std::uint64_t nr, std::uint64_t dl, std::uint64_t dr,
            const ForbiddenPair& forbidden)
      : nl_(nl), nr_(nr), dl_(dl), forbidden_(forbidden), right_(nl * dl), mark_(nr, 0) {
    std::uint64_t s = 0;
    for (std::uint32_t v = 0; v < nr; ++v)
      for (std::uint64_t k = 0; k < dr; ++k) right_[s++] = v;
  }

  void shuffle(Rng& rng) { rng.shuffle(right_); }

  // Slots holding a repeated or forbidden pair. The first occurrence of a repeat stays good.
  std::vector<std::uint64_t> bad_slots() {
    std::vector<std::uint64_t> bad;
    for (std::uint64_t l = 0; l < nl_; ++l) {
      const std::uint64_t stamp = l + 1;
      for (std::uint64_t s = l * dl_; s < (l + 1) * dl_; ++s) {
        const std::uint32_t r = right_[s];
        if (mark_[r] == stamp || is_forbidden(l, r)) bad.push_back(s);
        mark_[r] = stamp;
      }
    }
    return bad;
  }

  // Double-edge swaps until no bad slot remains or the budget runs out.
  bool repair(Rng& rng, std::uint64_t budget) {
    std::vector<std::uint64_t> bad = bad_slots();
    const std::uint64_t total = right_.size();
    std::uint64_t attempts = 0;
    while (!bad.empty()) {
      if (attempts++ >= budget) return false;
      const std::uint64_t pick = rng.below(bad.size());
      const std::uint64_t s = bad[pick];
      if (!slot_bad(s)) {
        bad[pick] = bad.back();
        bad.pop_back();
        continue;
      }
      const std::uint64_t t = rng.below(total);
      const std::uint64_t a = s / dl_, c = t / dl_;
      const std::uint32_t b = right_[s], e = right_[t];
      if (a == c || b == e) continue;
      if (has(a, e) || has(c, b) || is_forbidden(a, e) || is_forbidden(c, b)) continue;
      std::swap(right_[s], right_[t]);
      bad[pick] = bad.back();
      bad.pop_back();
    }
    return true;
  }

  BipartiteGadget finish(std::uint64_t dr) const {
    BipartiteGadget g;
    g.left_size = nl_;
    g.right_size = nr_;
    g.left_degree = dl_;
    g.right_degree = dr;
    g.edges.resize(right_.size());
    for (std::uint64_t s = 0; s < right_.size(); ++s)
      g.edges[s] = {static_cast<std::uint32_t>(s / dl_), right_[s]};
    return g;
  }

 private:
  bool is_forbidden(std::uint64_t l, std::uint32_t r) const {
    return forbidden_ && forbidden_(static_cast<std::uint32_t>(l), r);
  }

  bool has(std::uint64_t l, std::uint32_t r) const {
    for (std::uint64_t s = l * dl_; s < (l + 1) * dl_; ++s)
      if (right_[s] == r) return true;
    return false;
  }

  bool slot_bad(std::uint64_t s) const {
    const std::uint64_t l = s / dl_;
    const std::uint32_t r = right_[s];
    if (is_forbidden(l, r)) return true;
    for (std::uint64_t u = l * dl_; u < (l + 1) * dl_; ++u)
      if (u != s && right_[u] == r) return true;
    return false;
  }

  std::uint64_t nl_, nr_, dl_;
  const ForbiddenPair& forbidden_;
  std::vector<std::uint32_t> right_;
  std::vector<std::uint64_t> mark_;
};

}  // namespace detail

// Configuration model. When few collisions are expected, plain rejection is tried first
// (exactly uniform given simplicity); otherwise, or if rejection keeps failing, collisions
// are removed by double-edge swaps.
inline BipartiteGadget sample_biregular(std::uint64_t nl, std::uint64_t nr, std::uint64_t dl,
                                        std::uint64_t dr, Rng& rng,
                                        const ForbiddenPair& forbidden = {}) {
  if (nl * dl != nr * dr)
    throw GadgetError(GadgetErrc::HandshakeViolation,
                      "handshake violated: " + std::to_string(nl) + "*" + std::to_string(dl) +
                          " != " + std::to_string(nr) + "*" + std::to_string(dr));
  if (dl > nr || dr > nl)
    throw GadgetError(GadgetErrc::Infeasible, "degree exceeds opposite side size");
  if (nl > 0xFFFFFFFFULL || nr > 0xFFFFFFFFULL)
    throw GadgetError(GadgetErrc::TooLarge, "gadget side exceeds 32-bit indices");
  detail::SlotGraph graph(nl, nr, dl, dr, forbidden);
  const std::uint64_t edges = nl * dl;
  if (edges == 0) return graph.finish(dr);

  const double expected_collisions =
      dl > 0 && dr > 0 ? 0.5 * static_cast<double>(dl - 1) * static_cast<double>(dr - 1) : 0.0;
  if (expected_collisions <= 4.0) {
    for (int attempt = 0; attempt < 16; ++attempt) {
      graph.shuffle(rng);
      if (graph.bad_slots().empty()) return graph.finish(dr);
    }
  }
  for (int resample = 0; resample < 10; ++resample) {
    graph.shuffle(rng);
    if (graph.repair(rng, 100 * edges)) return graph.finish(dr);
  }
  throw GadgetError(GadgetErrc::RepairStall, "swap repair stalled after 10 resamples");
}

inline BipartiteGadget sample_perfect_matching(std::uint64_t nv, Rng& rng) {
  BipartiteGadget g;
  g.left_size = g.right_size = nv;
  g.left_degree = g.right_degree = nv > 0 ? 1 : 0;
  if (nv > 0xFFFFFFFFULL) throw GadgetError(GadgetErrc::TooLarge, "matching exceeds 32-bit indices");
  std::vector<std::uint32_t> perm(nv);
  for (std::uint32_t i = 0; i < nv; ++i) perm[i] = i;
  rng.shuffle(perm);
  g.edges.reserve(nv);
  for (std::uint32_t i = 0; i < nv; ++i) g.edges.emplace_back(i, perm[i]);
  return g;
}

// Every simple biregular graph with the given degrees, each once.
inline std::vector<BipartiteGadget> enumerate_biregular_small(std::uint64_t nl, std::uint64_t nr,
                                                              std::uint64_t dl, std::uint64_t dr) {
  if (nl * dl > 12) throw GadgetError(GadgetErrc::TooLarge, "enumeration capped at 12 edges");
  if (nl * dl != nr * dr)
    throw GadgetError(GadgetErrc::HandshakeViolation, "handshake violated");
  std::vector<BipartiteGadget> out;
  if (dl > nr || dr > nl) return out;
  std::vector<std::uint64_t> rdeg(nr, 0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  // Choose the neighbor set of left vertex l as an increasing sequence starting at `from`.
  std::function<void(std::uint32_t, std::uint32_t, std::uint64_t)> rec =
      [&](std::uint32_t l, std::uint32_t from, std::uint64_t chosen) {
        if (l == nl) {
          BipartiteGadget g;
          g.left_size = nl;
          g.right_size = nr;
          g.left_degree = dl;
          g.right_degree = dr;
          g.edges = edges;
          out.push_back(std::move(g));
          return;
        }
        if (chosen == dl) {
          rec(l + 1, 0, 0);
          return;
        }
        for (std::uint32_t r = from; r < nr; ++r) {
          if (rdeg[r] == dr) continue;
          ++rdeg[r];
          edges.emplace_back(l, r);
          rec(l, r + 1, chosen + 1);
          edges.pop_back();
          --rdeg[r];
        }
      };
  rec(0, 0, 0);
  return out;
}

}  // namespace mmhard
