#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mmhard/gadgets.hpp"
#include "mmhard/hopcroft_karp.hpp"
#include "mmhard/params.hpp"
#include "mmhard/rng.hpp"

namespace mmhard {

enum class Side : std::uint8_t { Yes = 0, No = 1 };

inline const char* to_string(Side s) { return s == Side::Yes ? "YES" : "NO"; }

// Ground-truth label of a vertex at one level.
// part: j ∈ {1,2} for S/A/B, quarter ∈ {1..4} for D. layer: 1..r (0 for S and dummies).
// copy: index of the level graph (at this level) that contains the vertex.
struct LabelEntry {
  std::uint32_t copy = 0;
  Kind kind = Kind::Dummy;
  std::uint8_t part = 0;
  std::uint16_t layer = 0;

  bool operator==(const LabelEntry&) const = default;
};

inline std::string subset_name(const LabelEntry& e) {
  switch (e.kind) {
    case Kind::S: return "S^" + std::to_string(e.part);
    case Kind::A: return "A_" + std::to_string(e.layer) + "^" + std::to_string(e.part);
    case Kind::B: return "B_" + std::to_string(e.layer) + "^" + std::to_string(e.part);
    case Kind::D: return "D_" + std::to_string(e.layer) + "^" + std::to_string(e.part);
    default: return "dummy";
  }
}

struct LabelPath {
  struct Entry {
    int level;
    LabelEntry label;
    int side;
  };
  bool dummy = false;
  std::vector<Entry> entries;  // top level first
};

// Edge tag: origin level in the low bits, kPairingBit when the edge belongs to a base-level
// pairing matching (special at its own level).
inline constexpr std::uint8_t kPairingBit = 0x80;
inline int tag_level(std::uint8_t tag) { return tag & 0x7F; }
inline bool tag_pairing(std::uint8_t tag) { return (tag & kPairingBit) != 0; }

struct EdgeRec {
  std::uint32_t u;
  std::uint32_t v;
  std::uint8_t tag;
};

struct LevelGraph {
  int level = 1;
  Side side = Side::Yes;
  std::uint64_t n = 0;
  std::vector<std::uint8_t> vertex_side;
  std::vector<std::vector<LabelEntry>> labels;  // [m-1][v] for m = 1..level
  std::vector<EdgeRec> edges;

  LabelPath label_path(std::uint32_t v) const {
    LabelPath lp;
    for (int m = level; m >= 1; --m) {
      const LabelEntry& e = labels[m - 1][v];
      lp.entries.push_back({m, e, subset_side(e.kind, e.part)});
    }
    return lp;
  }
};

// ---------------------------------------------------------------------------
// Materialised layout of one level

enum class GadgetKind : std::uint8_t { Block, BrPair, Delusive, NoncoverResidual, CoverResidual };

struct SubsetSlot {
  Kind kind;
  std::uint8_t part;
  std::uint16_t layer;
  std::uint8_t side;
  std::uint64_t offset;  // within its side
  std::uint64_t size;
};

struct GadgetSlot {
  GadgetKind kind;
  std::uint32_t left, right;  // subset indices
  std::uint64_t dl, dr;
};

struct PairSlot {
  std::uint32_t a, b;  // a on side 0, b on side 1
  std::uint64_t copies;
  bool distinguishing;
};

struct LevelLayout {
  int level = 1;
  std::uint64_t r = 0, M = 0, X = 0, q = 0, d = 0, unit = 0, xd = 0, T = 0, R = 0, rho = 0;
  std::uint64_t a_full = 0, a_r = 0, copies = 0, n = 0, half = 0;
  std::vector<SubsetSlot> subsets;
  std::vector<GadgetSlot> gadgets;
  std::vector<PairSlot> pairs;

  std::uint32_t S(int j) const { return static_cast<std::uint32_t>(j - 1); }
  std::uint32_t A(int i, int j) const { return static_cast<std::uint32_t>(2 + (j - 1) * r + (i - 1)); }
  std::uint32_t B(int i, int j) const {
    return static_cast<std::uint32_t>(2 + 2 * r + (j - 1) * r + (i - 1));
  }
  std::uint32_t D(int k, int part) const {
    return static_cast<std::uint32_t>(2 + 4 * r + 4 * (k - 1) + (part - 1));
  }
};

inline LevelLayout make_layout(const LevelPlan& plan, std::uint64_t r) {
  LevelLayout lay;
  lay.level = plan.level;
  lay.r = r;
  lay.M = to_u64(plan.M, "M");
  lay.X = to_u64(plan.X, "X");
  lay.q = to_u64(plan.q, "q");
  lay.d = to_u64(plan.d, "d");
  lay.unit = to_u64(plan.unit, "unit");
  lay.xd = to_u64(plan.xd, "xd");
  lay.T = to_u64(plan.T, "T");
  lay.R = to_u64(plan.R, "R");
  lay.rho = to_u64(plan.rho, "rho");
  lay.a_full = to_u64(plan.a_full, "a_full");
  lay.a_r = to_u64(plan.a_r, "a_r");
  lay.copies = plan.level == 1 ? 1 : to_u64(plan.copies, "copies");
  lay.n = to_u64(plan.n, "n");
  lay.half = lay.n / 2;

  std::uint64_t offset[2] = {0, 0};
  auto add = [&](Kind kind, int part, std::uint64_t layer, std::uint64_t size) {
    const auto side = static_cast<std::uint8_t>(subset_side(kind, part));
    lay.subsets.push_back({kind, static_cast<std::uint8_t>(part), static_cast<std::uint16_t>(layer),
                           side, offset[side], size});
    offset[side] += size;
  };
  add(Kind::S, 1, 0, lay.M);
  add(Kind::S, 2, 0, lay.M);
  for (Kind kind : {Kind::A, Kind::B})
    for (int j = 1; j <= 2; ++j)
      for (std::uint64_t i = 1; i <= r; ++i)
        add(kind, j, i, (kind == Kind::A && i == r) ? lay.M - lay.X : lay.M);
  for (std::uint64_t k = 1; k <= r; ++k)
    for (int part = 1; part <= 4; ++part) add(Kind::D, part, k, lay.q);

  const int ri = static_cast<int>(r);
  for (int j = 1; j <= 2; ++j)
    for (int i = 1; i <= ri; ++i)
      lay.gadgets.push_back({GadgetKind::Block, lay.A(i, j), lay.B(i, j), lay.d,
                             i < ri ? lay.d : lay.d - lay.xd});
  if (lay.level == 1 && lay.xd > 0)
    lay.gadgets.push_back({GadgetKind::BrPair, lay.B(ri, 2), lay.B(ri, 1), lay.xd, lay.xd});
  if (lay.unit > 0)
    for (int j = 1; j <= 2; ++j)
      for (Kind kind : {Kind::A, Kind::B})
        for (int i = 1; i <= ri; ++i)
          for (int k = 1; k <= ri; ++k) {
            const std::uint32_t src = kind == Kind::A ? lay.A(i, j) : lay.B(i, j);
            const std::uint64_t dr = (kind == Kind::A && i == ri) ? lay.a_r : lay.a_full;
            lay.gadgets.push_back({GadgetKind::Delusive, src, lay.D(k, delusive_quarter(kind, j)),
                                   lay.unit, dr});
          }
  if (lay.R > 0)
    for (int k = 1; k <= ri; ++k) {
      const int next = k % ri + 1;
      lay.gadgets.push_back({GadgetKind::NoncoverResidual, lay.D(k, 2), lay.D(next, 1), lay.R, lay.R});
      lay.gadgets.push_back({GadgetKind::NoncoverResidual, lay.D(k, 4), lay.D(next, 3), lay.R, lay.R});
    }
  if (lay.rho > 0)
    for (int k = 1; k <= ri; ++k)
      lay.gadgets.push_back({GadgetKind::CoverResidual, lay.D(k, 1), lay.D(k, 3), lay.rho, lay.rho});

  const std::uint64_t c = lay.copies;
  lay.pairs.push_back({lay.S(1), lay.B(1, 1), c, false});
  lay.pairs.push_back({lay.B(1, 2), lay.S(2), c, false});
  for (int i = 1; i < ri; ++i) {
    lay.pairs.push_back({lay.A(i, 1), lay.B(i + 1, 1), c, false});
    lay.pairs.push_back({lay.B(i + 1, 2), lay.A(i, 2), c, false});
  }
  lay.pairs.push_back({lay.A(ri, 1), lay.A(ri, 2), c, true});
  for (int k = 1; k <= ri; ++k) {
    lay.pairs.push_back({lay.D(k, 1), lay.D(k, 2), 1, false});
    lay.pairs.push_back({lay.D(k, 4), lay.D(k, 3), 1, false});
  }
  return lay;
}

inline std::vector<LevelLayout> make_layouts(const ParamSet& p) {
  ValidationReport rep = validate(p);
  if (!rep.ok) throw ParamError(ParamErrc::ValidationFailed, "invalid parameters:\n" + rep.to_string(), rep);
  if (p.r > 0xFFFF) throw ParamError(ParamErrc::InfeasibleScale, "r too large to materialise");
  if (p.n_total >= Rational(BigInt(0xFFFFFFFFULL)))
    throw ParamError(ParamErrc::InfeasibleScale, "n = " + to_string(p.n_total) + " exceeds 32-bit vertex ids");
  std::vector<LevelLayout> out;
  for (const LevelPlan& plan : plan_all(p)) out.push_back(make_layout(plan, p.r));
  return out;
}

// Number of core edges of a level-ℓ graph.
inline std::uint64_t level_edge_count(const std::vector<LevelLayout>& lays, int level) {
  const LevelLayout& lay = lays[level - 1];
  std::uint64_t e = 0;
  for (const GadgetSlot& g : lay.gadgets) e += lay.subsets[g.left].size * g.dl;
  for (const PairSlot& pr : lay.pairs) {
    if (level == 1) e += lay.subsets[pr.a].size;
    else e += pr.copies * level_edge_count(lays, level - 1);
  }
  return e;
}

namespace detail {

class Builder {
 public:
  Builder(const std::vector<LevelLayout>& layouts, std::vector<EdgeRec>& edges,
          std::vector<std::vector<LabelEntry>>& labels)
      : lays_(layouts), edges_(edges), labels_(labels), copy_counter_(layouts.size(), 0) {}

  // Builds a level graph whose side-0 vertices occupy [g0, g0+half) and side-1 vertices
  // [g1, g1+half) of the global id space.
  void build(int level, Side side, std::uint64_t g0, std::uint64_t g1, std::uint64_t key) {
    const LevelLayout& lay = lays_[level - 1];
    const std::uint32_t copy = copy_counter_[level - 1]++;
    auto global = [&](std::uint32_t s, std::uint64_t idx) {
      const SubsetSlot& ss = lay.subsets[s];
      return static_cast<std::uint32_t>((ss.side == 0 ? g0 : g1) + ss.offset + idx);
    };
    auto& lab = labels_[level - 1];
    for (std::uint32_t s = 0; s < lay.subsets.size(); ++s) {
      const SubsetSlot& ss = lay.subsets[s];
      const LabelEntry e{copy, ss.kind, ss.part, ss.layer};
      for (std::uint64_t i = 0; i < ss.size; ++i) lab[global(s, i)] = e;
    }
    const auto tag = static_cast<std::uint8_t>(level);
    auto emit = [&](std::uint32_t sl, std::uint32_t sr, const BipartiteGadget& gad, std::uint8_t t) {
      for (auto [l, r] : gad.edges) edges_.push_back({global(sl, l), global(sr, r), t});
    };

    const BipartiteGadget* block_r[2] = {nullptr, nullptr};
    std::vector<BipartiteGadget> kept;
    kept.reserve(2);
    std::vector<std::uint32_t> bbar1;  // B̄_r^1 as local indices of B_r^1
    const int ri = static_cast<int>(lay.r);

    for (std::uint32_t gi = 0; gi < lay.gadgets.size(); ++gi) {
      const GadgetSlot& gs = lay.gadgets[gi];
      Rng rng(derive_seed(key, 1, gi));
      BipartiteGadget gad = sample_biregular(lay.subsets[gs.left].size, lay.subsets[gs.right].size,
                                             gs.dl, gs.dr, rng);
      if (gs.kind == GadgetKind::BrPair) {
        emit_br_pair(lay, side, gs, gad, global, tag, bbar1);
        continue;
      }
      emit(gs.left, gs.right, gad, tag);
      if (level == 1 && side == Side::No && gs.kind == GadgetKind::Block && gs.left == lay.A(ri, 1))
        block_r[0] = &kept.emplace_back(std::move(gad));
      else if (level == 1 && side == Side::No && gs.kind == GadgetKind::Block && gs.left == lay.A(ri, 2))
        block_r[1] = &kept.emplace_back(std::move(gad));
    }

    for (std::uint32_t pi = 0; pi < lay.pairs.size(); ++pi) {
      const PairSlot& pr = lay.pairs[pi];
      if (level == 1) {
        if (pr.distinguishing && side == Side::No) continue;
        Rng rng(derive_seed(key, 2, pi));
        emit(pr.a, pr.b, sample_perfect_matching(lay.subsets[pr.a].size, rng), tag | kPairingBit);
        continue;
      }
      const std::uint64_t h = lays_[level - 2].half;
      const Side child = pr.distinguishing ? side : Side::Yes;
      const SubsetSlot& sa = lay.subsets[pr.a];
      const SubsetSlot& sb = lay.subsets[pr.b];
      for (std::uint64_t c = 0; c < pr.copies; ++c) {
        const std::uint64_t c0 = g0 + sa.offset + c * h;
        const std::uint64_t c1 = g1 + sb.offset + c * h;
        build(level - 1, child, c0, c1, derive_seed(key, 3, pi, c));
      }
    }

    if (level == 1 && side == Side::No) {
      // Perfect matchings A_r^j – B̄_r^j that avoid the block edges A_r^j – B_r^j.
      const std::uint64_t m = lay.M - lay.X;
      for (int j = 1; j <= 2; ++j) {
        const BipartiteGadget& block = *block_r[j - 1];
        const std::uint64_t d = block.left_degree;
        auto target = [&](std::uint32_t b) { return j == 1 ? bbar1[b] : b; };
        ForbiddenPair forbidden = [&](std::uint32_t a, std::uint32_t b) {
          const std::uint32_t t = target(b);
          for (std::uint64_t k = a * d; k < (a + 1) * d; ++k)
            if (block.edges[k].second == t) return true;
          return false;
        };
        Rng rng(derive_seed(key, 4, j));
        BipartiteGadget pm = sample_biregular(m, m, 1, 1, rng, forbidden);
        const std::uint32_t sa = lay.A(ri, j);
        const std::uint32_t sb = lay.B(ri, j);
        for (auto [a, b] : pm.edges)
          edges_.push_back({global(sa, a), global(sb, target(b)),
                            static_cast<std::uint8_t>(tag | kPairingBit)});
      }
    }
  }

 private:
  // ξd-regular B_r^2–B_r^1 gadget with a planted perfect matching. On the NO side the
  // matching edges of the first (1−ξ)N_1 left vertices are removed; their endpoints form B̄_r.
  template <class Global>
  void emit_br_pair(const LevelLayout& lay, Side side, const GadgetSlot& gs, const BipartiteGadget& gad,
                    Global&& global, std::uint8_t tag, std::vector<std::uint32_t>& bbar1) {
    const std::uint64_t m = lay.M;
    if (side == Side::Yes) {
      for (auto [l, r] : gad.edges) edges_.push_back({global(gs.left, l), global(gs.right, r), tag});
      return;
    }
    CsrGraph g;
    g.n = 2 * m;
    g.side.assign(g.n, 0);
    std::fill(g.side.begin() + static_cast<std::ptrdiff_t>(m), g.side.end(), 1);
    g.offsets.assign(g.n + 1, 0);
    const std::uint64_t d = gad.left_degree;
    for (std::uint64_t l = 0; l <= m; ++l) g.offsets[l] = l * d;
    for (std::uint64_t v = m + 1; v <= g.n; ++v) g.offsets[v] = m * d;
    g.adj.resize(gad.edges.size());
    for (std::size_t k = 0; k < gad.edges.size(); ++k)
      g.adj[k] = static_cast<std::uint32_t>(m + gad.edges[k].second);
    std::vector<std::uint32_t> mate = hopcroft_karp(g).mate;
    const std::uint64_t removed = m - lay.X;
    bbar1.resize(removed);
    for (std::uint32_t l = 0; l < removed; ++l) bbar1[l] = static_cast<std::uint32_t>(mate[l] - m);
    for (auto [l, r] : gad.edges) {
      if (l < removed && mate[l] == m + r) continue;
      edges_.push_back({global(gs.left, l), global(gs.right, r), tag});
    }
  }

  const std::vector<LevelLayout>& lays_;
  std::vector<EdgeRec>& edges_;
  std::vector<std::vector<LabelEntry>>& labels_;
  std::vector<std::uint32_t> copy_counter_;
};

}  // namespace detail

// Level-ℓ graph on its own (no dummies); vertex v < n/2 is on side 0.
inline LevelGraph build_level(int ell, const ParamSet& p, Side side, std::uint64_t seed) {
  const std::vector<LevelLayout> lays = make_layouts(p);
  if (ell < 1 || ell > p.L)
    throw ParamError(ParamErrc::PreconditionViolation, "level out of range: " + std::to_string(ell));
  LevelGraph lg;
  lg.level = ell;
  lg.side = side;
  lg.n = lays[ell - 1].n;
  lg.labels.assign(ell, std::vector<LabelEntry>(lg.n));
  lg.edges.reserve(level_edge_count(lays, ell));
  detail::Builder builder(lays, lg.edges, lg.labels);
  builder.build(ell, side, 0, lg.n / 2, seed);
  lg.vertex_side.assign(lg.n, 0);
  std::fill(lg.vertex_side.begin() + static_cast<std::ptrdiff_t>(lg.n / 2), lg.vertex_side.end(), 1);
  return lg;
}

inline LevelGraph build_base(const ParamSet& p, Side side, std::uint64_t seed) {
  return build_level(1, p, side, seed);
}

// ---------------------------------------------------------------------------
// Instance

struct Instance {
  ParamSet params;
  Side side = Side::Yes;
  std::uint64_t master_seed = 0;
  bool coupled = false;
  std::uint64_t n = 0;
  std::uint64_t n_core = 0;
  std::uint64_t dummy_count = 0;
  std::vector<std::uint8_t> vertex_side;
  std::vector<std::uint64_t> offsets;  // core adjacency, size n+1; dummies have empty rows
  std::vector<std::uint32_t> neighbors;
  std::vector<std::uint8_t> edge_tags;  // parallel to neighbors
  std::vector<std::vector<LabelEntry>> labels;  // [ℓ-1][v]
  std::vector<std::uint64_t> perm_seeds;

  // Derived by finalize().
  std::vector<std::uint32_t> core_of_side[2];
  std::vector<std::uint32_t> dummies_of_side[2];
  std::vector<std::uint32_t> dummy_rank;

  int L() const { return static_cast<int>(labels.size()); }
  bool is_dummy(std::uint32_t v) const { return labels[0][v].kind == Kind::Dummy; }
  const LabelEntry& label(int level, std::uint32_t v) const { return labels[level - 1][v]; }
  std::uint64_t core_degree(std::uint32_t v) const { return offsets[v + 1] - offsets[v]; }
  std::uint64_t core_edge_count() const { return neighbors.size() / 2; }

  std::uint64_t degree(std::uint32_t v) const {
    const int s = vertex_side[v];
    if (is_dummy(v)) return core_of_side[1 - s].size() + 1;
    return core_degree(v) + dummies_of_side[1 - s].size();
  }

  // j-th entry (0-based) of v's adjacency list in canonical order: sorted core neighbors,
  // then opposite-side dummies; for a dummy, opposite-side core vertices, then its partner.
  std::uint32_t list_entry(std::uint32_t v, std::uint64_t j) const {
    const int s = vertex_side[v];
    if (is_dummy(v)) {
      const auto& core = core_of_side[1 - s];
      if (j < core.size()) return core[j];
      return dummies_of_side[1 - s][dummy_rank[v]];
    }
    const std::uint64_t cd = core_degree(v);
    if (j < cd) return neighbors[offsets[v] + j];
    return dummies_of_side[1 - s][j - cd];
  }

  // Index of u in v's core row, or kNone.
  std::uint64_t find_core(std::uint32_t v, std::uint32_t u) const {
    auto b = neighbors.begin() + static_cast<std::ptrdiff_t>(offsets[v]);
    auto e = neighbors.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]);
    auto it = std::lower_bound(b, e, u);
    if (it == e || *it != u) return kNone;
    return static_cast<std::uint64_t>(it - neighbors.begin());
  }

  bool adjacent(std::uint32_t u, std::uint32_t v) const {
    if (u >= n || v >= n || vertex_side[u] == vertex_side[v]) return false;
    const bool du = is_dummy(u), dv = is_dummy(v);
    if (du && dv) return dummies_of_side[vertex_side[v]][dummy_rank[u]] == v;
    if (du || dv) return true;
    return find_core(u, v) != kNone;
  }

  LabelPath label_path(std::uint32_t v) const {
    LabelPath lp;
    if (is_dummy(v)) {
      lp.dummy = true;
      return lp;
    }
    for (int m = L(); m >= 1; --m) {
      const LabelEntry& e = labels[m - 1][v];
      lp.entries.push_back({m, e, subset_side(e.kind, e.part)});
    }
    return lp;
  }

  void finalize() {
    for (int s = 0; s < 2; ++s) {
      core_of_side[s].clear();
      dummies_of_side[s].clear();
    }
    dummy_rank.assign(n, kNone);
    for (std::uint32_t v = 0; v < n; ++v) {
      auto& list = is_dummy(v) ? dummies_of_side[vertex_side[v]] : core_of_side[vertex_side[v]];
      if (is_dummy(v)) dummy_rank[v] = static_cast<std::uint32_t>(list.size());
      list.push_back(v);
    }
  }

  bool operator==(const Instance& o) const {
    return params == o.params && side == o.side && master_seed == o.master_seed &&
           coupled == o.coupled && n == o.n && n_core == o.n_core && dummy_count == o.dummy_count &&
           vertex_side == o.vertex_side && offsets == o.offsets && neighbors == o.neighbors &&
           edge_tags == o.edge_tags && labels == o.labels && perm_seeds == o.perm_seeds;
  }
};

struct AssembleOptions {
  // Derive everything except the distinguishing subgraph from the same seeds for YES and NO.
  bool coupled = false;
  // Diagnostic: keep vertices, labels and dummies but drop every core edge.
  bool empty_core = false;
};

namespace detail {

inline void build_csr(Instance& inst, const std::vector<EdgeRec>& edges,
                      const std::vector<std::uint32_t>& perm) {
  const std::uint64_t n = inst.n;
  inst.offsets.assign(n + 1, 0);
  for (const EdgeRec& e : edges) {
    ++inst.offsets[perm[e.u] + 1];
    ++inst.offsets[perm[e.v] + 1];
  }
  for (std::uint64_t v = 0; v < n; ++v) inst.offsets[v + 1] += inst.offsets[v];
  std::vector<std::uint64_t> packed(inst.offsets[n]);
  std::vector<std::uint64_t> fill(inst.offsets.begin(), inst.offsets.end() - 1);
  for (const EdgeRec& e : edges) {
    const std::uint32_t u = perm[e.u], v = perm[e.v];
    packed[fill[u]++] = (static_cast<std::uint64_t>(v) << 8) | e.tag;
    packed[fill[v]++] = (static_cast<std::uint64_t>(u) << 8) | e.tag;
  }
  for (std::uint64_t v = 0; v < n; ++v)
    std::sort(packed.begin() + static_cast<std::ptrdiff_t>(inst.offsets[v]),
              packed.begin() + static_cast<std::ptrdiff_t>(inst.offsets[v + 1]));
  inst.neighbors.resize(packed.size());
  inst.edge_tags.resize(packed.size());
  for (std::size_t k = 0; k < packed.size(); ++k) {
    inst.neighbors[k] = static_cast<std::uint32_t>(packed[k] >> 8);
    inst.edge_tags[k] = static_cast<std::uint8_t>(packed[k] & 0xFF);
  }
}

}  // namespace detail

inline Instance assemble(const ParamSet& p, Side side, std::uint64_t master_seed,
                         const AssembleOptions& opt = {}) {
  const std::vector<LevelLayout> lays = make_layouts(p);
  const int L = p.L;
  const std::uint64_t nL = lays[L - 1].n;
  const std::uint64_t t = to_u64(to_int(p.dummy_count), "dummy count");
  const std::uint64_t n = nL + t;
  const std::uint64_t root = derive_seed(master_seed, opt.coupled ? 0x636F75706C6564ULL : 1 + static_cast<int>(side));

  std::vector<std::vector<LabelEntry>> labels(L, std::vector<LabelEntry>(n));
  std::vector<EdgeRec> edges;
  if (!opt.empty_core) edges.reserve(level_edge_count(lays, L));
  {
    detail::Builder builder(lays, edges, labels);
    builder.build(L, side, 0, nL / 2, root);
  }
  if (opt.empty_core) {
    edges.clear();
    edges.shrink_to_fit();
  }

  std::vector<std::uint32_t> perm(n);
  for (std::uint32_t v = 0; v < n; ++v) perm[v] = v;
  Rng prng(derive_seed(root, 9));
  prng.shuffle(perm);

  Instance inst;
  inst.params = p;
  inst.side = side;
  inst.master_seed = master_seed;
  inst.coupled = opt.coupled;
  inst.n = n;
  inst.n_core = nL;
  inst.dummy_count = t;
  inst.vertex_side.assign(n, 0);
  for (std::uint64_t v = 0; v < n; ++v) {
    const bool side1 = v < nL ? v >= nL / 2 : v >= nL + t / 2;
    inst.vertex_side[perm[v]] = side1 ? 1 : 0;
  }
  inst.labels.assign(L, std::vector<LabelEntry>(n));
  for (int m = 0; m < L; ++m) {
    for (std::uint64_t v = 0; v < n; ++v) inst.labels[m][perm[v]] = labels[m][v];
    std::vector<LabelEntry>().swap(labels[m]);
  }
  detail::build_csr(inst, edges, perm);
  std::vector<EdgeRec>().swap(edges);
  inst.perm_seeds.resize(n);
  for (std::uint64_t v = 0; v < n; ++v) inst.perm_seeds[v] = derive_seed(root, 10, v);
  inst.finalize();
  return inst;
}

}  // namespace mmhard
