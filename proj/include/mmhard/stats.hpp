#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmhard/instance.hpp"
#include "mmhard/oracle.hpp"
#include "mmhard/params.hpp"

namespace mmhard {

class TranscriptInstanceMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StatsConfig {
  double depth_factor = 10.0;     // shallow depth = floor(depth_factor · ln n)
  double indegree_factor = 5.0;   // in-degree bound = indegree_factor · ln n
  std::uint64_t toy_cutoff = 64;  // |T(v)| cutoff when δ is undefined
};

struct LevelStats {
  int level = 0;
  std::uint64_t black_edges = 0;
  std::uint64_t green_edges = 0;
  std::uint64_t special_edges = 0;
  std::vector<std::uint64_t> black_component_sizes;  // vertices per component, descending
  std::uint64_t black_cycles = 0;                      // cyclomatic number of the black subgraph
  std::uint64_t identified_inner = 0;  // black edges with a spoiled endpoint
  std::uint64_t inner_truth = 0;       // black edges (ground-truth inner membership)
  std::uint64_t mixer_vertices = 0;
  double g = std::numeric_limits<double>::quiet_NaN();
};

struct StructuralStats {
  std::uint64_t n = 0;
  std::uint64_t spent = 0;
  std::uint64_t core_edges_discovered = 0;
  std::uint64_t touched_vertices = 0;
  std::uint64_t max_in_degree = 0;
  double indegree_bound = 0;
  std::uint64_t shallow_depth = 0;
  double cutoff = 0;
  std::uint64_t spoiler_count = 0;
  std::uint64_t spoiled_count = 0;
  std::uint64_t shallow_roots = 0;        // vertices with nonempty T(v)
  std::uint64_t shallow_size_sum = 0;
  std::uint64_t unspoiled_non_tree = 0;   // must be 0
  std::map<std::uint64_t, std::uint64_t> shallow_size_histogram;
  std::uint64_t special_edge_count = 0;   // at the top level
  std::uint64_t mixer_vertex_touch_count = 0;
  std::uint64_t base_cycles = 0;          // cyclomatic number of discovered origin-level-1 edges
  bool base_forest = true;
  std::vector<LevelStats> levels;         // index ℓ−1
  std::vector<std::uint32_t> spoilers;    // ascending
  std::vector<std::uint32_t> spoiled;     // ascending
};

struct EdgeClass {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  int origin_level = 0;
  bool black = false;
  bool green = false;
  bool special = false;
  bool mixer_endpoint = false;
};

namespace detail {

class UnionFind {
 public:
  std::uint32_t find(std::uint32_t x) {
    auto it = parent_.find(x);
    if (it == parent_.end()) {
      parent_[x] = x;
      size_[x] = 1;
      return x;
    }
    std::uint32_t r = x;
    while (parent_[r] != r) r = parent_[r];
    while (parent_[x] != r) {
      const std::uint32_t nx = parent_[x];
      parent_[x] = r;
      x = nx;
    }
    return r;
  }
  // False if x and y were already connected.
  bool unite(std::uint32_t x, std::uint32_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (size_[x] < size_[y]) std::swap(x, y);
    parent_[y] = x;
    size_[x] += size_[y];
    return true;
  }
  std::vector<std::uint64_t> component_sizes() {
    std::vector<std::uint64_t> out;
    for (auto& [v, p] : parent_)
      if (find(v) == v) out.push_back(size_[v]);
    std::sort(out.rbegin(), out.rend());
    return out;
  }

 private:
  std::unordered_map<std::uint32_t, std::uint32_t> parent_;
  std::unordered_map<std::uint32_t, std::uint64_t> size_;
};

inline bool is_black(const Instance& inst, int ell, std::uint32_t u, std::uint32_t v) {
  const LabelEntry& a = inst.label(ell, u);
  const LabelEntry& b = inst.label(ell, v);
  const auto r = static_cast<std::uint16_t>(inst.params.r);
  return a.kind == Kind::A && b.kind == Kind::A && a.layer == r && b.layer == r && a.part != b.part;
}

inline std::uint8_t edge_tag(const Instance& inst, std::uint32_t u, std::uint32_t v) {
  const std::uint64_t k = inst.find_core(u, v);
  if (k == kNone) throw TranscriptInstanceMismatch("transcript edge " + std::to_string(u) + "-" + std::to_string(v) +
                                                   " is not a core edge of the instance");
  return inst.edge_tags[k];
}

inline bool is_special(std::uint8_t tag, int ell) {
  return tag_level(tag) < ell || (tag_level(tag) == ell && tag_pairing(tag));
}

// v is a mixer for a root in {A_r, B_r, D_r} when k < r−1 special edges lie on the root path
// and v ∈ D_i with i ≤ r−k−1.
inline bool mixer_at(const LabelEntry& e, std::uint64_t k, std::uint64_t r) {
  return k + 1 < r && e.kind == Kind::D && e.layer <= r - k - 1;
}

inline void check_transcript(const Transcript& t, const Instance& inst) {
  if (t.n != inst.n)
    throw TranscriptInstanceMismatch("transcript has n=" + std::to_string(t.n) + ", instance has n=" +
                                     std::to_string(inst.n));
  for (const DirectedEdge& e : t.edges) {
    if (e.from >= inst.n || e.to >= inst.n || inst.is_dummy(e.from) || inst.is_dummy(e.to))
      throw TranscriptInstanceMismatch("transcript edge outside the instance core");
    edge_tag(inst, e.from, e.to);
  }
}

}  // namespace detail

inline double shallow_cutoff(const ParamSet& p, std::uint64_t n, const StatsConfig& cfg) {
  if (p.delta && !p.sigma.empty())
    return std::pow(static_cast<double>(n), to_double(*p.delta) - 2 * p.sigma[p.L - 1]);
  return static_cast<double>(cfg.toy_cutoff);
}

inline StructuralStats analyze(const Transcript& t, const Instance& inst, const StatsConfig& cfg = {}) {
  detail::check_transcript(t, inst);
  StructuralStats st;
  st.n = inst.n;
  st.spent = t.spent;
  const double ln_n = std::log(static_cast<double>(std::max<std::uint64_t>(inst.n, 2)));
  st.indegree_bound = cfg.indegree_factor * ln_n;
  st.shallow_depth = static_cast<std::uint64_t>(std::floor(cfg.depth_factor * ln_n));
  st.cutoff = shallow_cutoff(inst.params, inst.n, cfg);
  st.core_edges_discovered = t.edges.size();
  const int L = inst.L();
  const std::uint64_t r = inst.params.r;

  // Spoilers in discovery order.
  std::unordered_map<std::uint32_t, std::uint32_t> indeg, deg;
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> out;
  std::unordered_map<std::uint32_t, bool> spoiler;
  for (const DirectedEdge& e : t.edges) {
    if (deg[e.to] > 0) spoiler[e.from] = true;  // (ii)
    if (++indeg[e.to] > 1) spoiler[e.to] = true;  // (i)
    ++deg[e.from];
    ++deg[e.to];
    out[e.from].push_back(e.to);
  }
  st.touched_vertices = deg.size();
  for (auto& [v, c] : indeg) st.max_in_degree = std::max<std::uint64_t>(st.max_in_degree, c);
  for (auto& [v, s] : spoiler) st.spoilers.push_back(v);
  std::sort(st.spoilers.begin(), st.spoilers.end());
  st.spoiler_count = st.spoilers.size();

  // Shallow subgraphs, each capped one vertex past the cutoff.
  const auto cap = static_cast<std::uint64_t>(std::min(st.cutoff, 1e15)) + 1;
  std::vector<std::uint32_t> roots;
  for (auto& [v, o] : out) roots.push_back(v);
  std::sort(roots.begin(), roots.end());
  std::unordered_map<std::uint32_t, std::uint64_t> depth_of;
  std::vector<std::uint32_t> queue;
  std::vector<std::uint32_t> spoiled_roots;
  for (std::uint32_t root : roots) {
    depth_of.clear();
    queue.assign(1, root);
    depth_of[root] = 0;
    bool has_spoiler = spoiler.count(root) > 0;
    bool tree = true;
    for (std::size_t h = 0; h < queue.size() && queue.size() <= cap; ++h) {
      const std::uint32_t x = queue[h];
      const std::uint64_t dx = depth_of[x];
      if (dx >= st.shallow_depth) continue;
      auto it = out.find(x);
      if (it == out.end()) continue;
      for (std::uint32_t y : it->second) {
        if (depth_of.count(y)) {
          tree = false;
          continue;
        }
        depth_of[y] = dx + 1;
        if (spoiler.count(y)) has_spoiler = true;
        queue.push_back(y);
      }
    }
    const std::uint64_t size = queue.size();
    ++st.shallow_roots;
    st.shallow_size_sum += size;
    ++st.shallow_size_histogram[size];
    const bool spoiled = has_spoiler || static_cast<double>(size) > st.cutoff;
    if (spoiled) spoiled_roots.push_back(root);
    else if (!tree) ++st.unspoiled_non_tree;
  }
  st.spoiled = spoiled_roots;
  st.spoiled_count = st.spoiled.size();
  std::unordered_map<std::uint32_t, bool> is_spoiled;
  for (std::uint32_t v : st.spoiled) is_spoiled[v] = true;

  // Per-level edge classes.
  std::vector<std::uint8_t> tags(t.edges.size());
  for (std::size_t k = 0; k < t.edges.size(); ++k) tags[k] = detail::edge_tag(inst, t.edges[k].from, t.edges[k].to);
  detail::UnionFind base;
  for (std::size_t k = 0; k < t.edges.size(); ++k)
    if (tag_level(tags[k]) == 1 && !base.unite(t.edges[k].from, t.edges[k].to)) ++st.base_cycles;
  st.base_forest = st.base_cycles == 0;

  for (int ell = 1; ell <= L; ++ell) {
    LevelStats ls;
    ls.level = ell;
    if (inst.params.delta) ls.g = g(ell, inst.params);
    detail::UnionFind uf;
    for (std::size_t k = 0; k < t.edges.size(); ++k) {
      const DirectedEdge& e = t.edges[k];
      const bool black = detail::is_black(inst, ell, e.from, e.to);
      if (black) {
        ++ls.black_edges;
        if (!uf.unite(e.from, e.to)) ++ls.black_cycles;
        if (is_spoiled.count(e.from) || is_spoiled.count(e.to)) ++ls.identified_inner;
      } else {
        ++ls.green_edges;
      }
      if (detail::is_special(tags[k], ell)) ++ls.special_edges;
    }
    ls.inner_truth = ls.black_edges;
    ls.black_component_sizes = uf.component_sizes();
    st.levels.push_back(std::move(ls));
  }

  // Mixers at each level, found from unspoiled roots in {A_r, B_r, D_r}.
  std::unordered_map<std::uint64_t, std::uint8_t> tag_of;
  for (std::size_t k = 0; k < t.edges.size(); ++k)
    tag_of[std::uint64_t{t.edges[k].from} << 32 | t.edges[k].to] = tags[k];
  std::unordered_map<std::uint32_t, bool> mixer_any;
  for (int ell = 1; ell <= L; ++ell) {
    std::unordered_map<std::uint32_t, bool> mixers;
    for (std::uint32_t root : roots) {
      if (is_spoiled.count(root)) continue;
      const LabelEntry& lr = inst.label(ell, root);
      if (lr.layer != r || (lr.kind != Kind::A && lr.kind != Kind::B && lr.kind != Kind::D)) continue;
      std::vector<std::pair<std::uint32_t, std::uint64_t>> stack{{root, 0}};
      std::unordered_map<std::uint32_t, std::uint64_t> depth{{root, 0}};
      while (!stack.empty()) {
        auto [x, k] = stack.back();
        stack.pop_back();
        if (x != root && detail::mixer_at(inst.label(ell, x), k, r)) mixers[x] = true;
        if (depth[x] >= st.shallow_depth) continue;
        auto it = out.find(x);
        if (it == out.end()) continue;
        for (std::uint32_t y : it->second) {
          if (depth.count(y)) continue;
          depth[y] = depth[x] + 1;
          const bool sp = detail::is_special(tag_of[std::uint64_t{x} << 32 | y], ell);
          stack.push_back({y, k + (sp ? 1 : 0)});
        }
      }
    }
    st.levels[ell - 1].mixer_vertices = mixers.size();
    for (auto& [v, b] : mixers) mixer_any[v] = true;
  }
  st.mixer_vertex_touch_count = mixer_any.size();
  st.special_edge_count = L > 0 ? st.levels[L - 1].special_edges : 0;
  return st;
}

inline std::vector<EdgeClass> classify_edges(const Transcript& t, const Instance& inst, int ell,
                                             const StatsConfig& cfg = {}) {
  if (ell < 1 || ell > inst.L()) throw std::out_of_range("level out of range");
  detail::check_transcript(t, inst);
  const std::uint64_t r = inst.params.r;
  std::unordered_map<std::uint32_t, std::vector<std::pair<std::uint32_t, std::uint8_t>>> out;
  std::vector<EdgeClass> res;
  for (const DirectedEdge& e : t.edges) {
    EdgeClass c;
    c.from = e.from;
    c.to = e.to;
    const std::uint8_t tag = detail::edge_tag(inst, e.from, e.to);
    c.origin_level = tag_level(tag);
    c.black = detail::is_black(inst, ell, e.from, e.to);
    c.green = !c.black;
    c.special = detail::is_special(tag, ell);
    res.push_back(c);
    out[e.from].push_back({e.to, tag});
  }
  // Mixer endpoints relative to every root in {A_r, B_r, D_r}.
  const double ln_n = std::log(static_cast<double>(std::max<std::uint64_t>(inst.n, 2)));
  const auto max_depth = static_cast<std::uint64_t>(std::floor(cfg.depth_factor * ln_n));
  std::unordered_map<std::uint32_t, bool> mixer;
  for (auto& [root, o] : out) {
    const LabelEntry& lr = inst.label(ell, root);
    if (lr.layer != r || (lr.kind != Kind::A && lr.kind != Kind::B && lr.kind != Kind::D)) continue;
    std::vector<std::tuple<std::uint32_t, std::uint64_t, std::uint64_t>> stack{{root, 0, 0}};
    std::unordered_map<std::uint32_t, bool> seen{{root, true}};
    while (!stack.empty()) {
      auto [x, k, dep] = stack.back();
      stack.pop_back();
      if (x != root && detail::mixer_at(inst.label(ell, x), k, r)) mixer[x] = true;
      if (dep >= max_depth) continue;
      auto it = out.find(x);
      if (it == out.end()) continue;
      for (auto [y, tag] : it->second) {
        if (seen.count(y)) continue;
        seen[y] = true;
        stack.push_back({y, k + (detail::is_special(tag, ell) ? 1 : 0), dep + 1});
      }
    }
  }
  for (EdgeClass& c : res) c.mixer_endpoint = mixer.count(c.to) > 0;
  return res;
}

inline std::string stats_csv_header(int L) {
  std::ostringstream os;
  os << "n,spent,core_edges_discovered,touched_vertices,max_in_degree,indegree_bound,shallow_depth,cutoff,"
        "spoiler_count,spoiled_count,shallow_roots,shallow_size_sum,unspoiled_non_tree,special_edge_count,"
        "mixer_vertex_touch_count,base_cycles,base_forest";
  for (int l = 1; l <= L; ++l)
    os << ",black_edges_" << l << ",black_components_" << l << ",largest_black_component_" << l
       << ",black_cycles_" << l << ",identified_inner_" << l << ",mixers_" << l << ",g_" << l;
  return os.str();
}

inline std::string stats_csv_row(const StructuralStats& s) {
  std::ostringstream os;
  os << s.n << ',' << s.spent << ',' << s.core_edges_discovered << ',' << s.touched_vertices << ','
     << s.max_in_degree << ',' << s.indegree_bound << ',' << s.shallow_depth << ',' << s.cutoff << ','
     << s.spoiler_count << ',' << s.spoiled_count << ',' << s.shallow_roots << ',' << s.shallow_size_sum << ','
     << s.unspoiled_non_tree << ',' << s.special_edge_count << ',' << s.mixer_vertex_touch_count << ','
     << s.base_cycles << ',' << s.base_forest;
  for (const LevelStats& l : s.levels) {
    os << ',' << l.black_edges << ',' << l.black_component_sizes.size() << ','
       << (l.black_component_sizes.empty() ? 0 : l.black_component_sizes.front()) << ',' << l.black_cycles << ','
       << l.identified_inner << ',' << l.mixer_vertices << ',';
    if (!std::isnan(l.g)) os << l.g;
  }
  return os.str();
}

inline std::string histogram_csv(const StructuralStats& s) {
  std::ostringstream os;
  os << "size,count\n";
  for (auto [size, count] : s.shallow_size_histogram) os << size << ',' << count << '\n';
  return os.str();
}

struct Summary {
  std::uint64_t count = 0;
  double mean = 0;
  double max = 0;
  double min = 0;
  double q10 = 0, q50 = 0, q90 = 0;
};

// Quantiles by linear interpolation between order statistics.
inline Summary summarize(std::vector<double> xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  std::sort(xs.begin(), xs.end());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  s.min = xs.front();
  s.max = xs.back();
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
  };
  s.q10 = q(0.1);
  s.q50 = q(0.5);
  s.q90 = q(0.9);
  return s;
}

// Per-column summary of numeric CSV rows sharing one header. Non-numeric cells are skipped.
inline std::string aggregate_csv(const std::vector<std::string>& texts) {
  std::vector<std::string> header;
  std::vector<std::vector<double>> cols;
  for (const std::string& text : texts) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) continue;
    std::vector<std::string> h;
    {
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) h.push_back(cell);
    }
    if (header.empty()) {
      header = h;
      cols.assign(h.size(), {});
    } else if (h != header) {
      throw std::runtime_error("CSV headers differ");
    }
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string cell;
      for (std::size_t c = 0; std::getline(ss, cell, ',') && c < cols.size(); ++c) {
        try {
          std::size_t used = 0;
          const double x = std::stod(cell, &used);
          if (used == cell.size()) cols[c].push_back(x);
        } catch (const std::logic_error&) {
        }
      }
    }
  }
  std::ostringstream os;
  os << "column,count,mean,min,q10,q50,q90,max\n";
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (cols[c].empty()) continue;
    const Summary s = summarize(cols[c]);
    os << header[c] << ',' << s.count << ',' << s.mean << ',' << s.min << ',' << s.q10 << ',' << s.q50 << ','
       << s.q90 << ',' << s.max << '\n';
  }
  return os.str();
}

}  // namespace mmhard
