#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mmhard/exact.hpp"
#include "mmhard/instance.hpp"
#include "mmhard/oracle.hpp"
#include "mmhard/rng.hpp"

namespace mmhard {

enum class Verdict : std::uint8_t { Yes, No, Abstain };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "YES";
    case Verdict::No: return "NO";
    default: return "ABSTAIN";
  }
}

struct Guess {
  Verdict verdict = Verdict::Abstain;
  double estimate = 0;  // μ/n
  std::uint64_t queries_used = 0;
  std::map<std::string, double> evidence;
};

inline constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

// Probes needed to read every list to its ⊥.
inline std::uint64_t full_read_cost(const Instance& inst) {
  std::uint64_t c = 0;
  for (std::uint32_t v = 0; v < inst.n; ++v) c += inst.degree(v) + 1;
  return c;
}

// Reads lists on behalf of an algorithm and remembers what it has seen.
class ListReader {
 public:
  explicit ListReader(QuerySession& s) : s_(s) {}

  // Core neighbors of v in list order. Throws BudgetExhausted midway; progress is kept.
  const std::vector<std::uint32_t>& core_list(std::uint32_t v) {
    State& st = state_[v];
    while (!st.done) {
      const std::uint32_t a = s_.query(v, st.next++);
      if (a == kNull) st.done = true;
      else if (!s_.is_dummy(a)) st.core.push_back(a);
    }
    return st.core;
  }

  // Like core_list, but stops (returning nullptr) once spent() reaches spent_limit.
  const std::vector<std::uint32_t>* core_list_until(std::uint32_t v, std::uint64_t spent_limit) {
    State& st = state_[v];
    while (!st.done) {
      if (s_.spent() >= spent_limit) return nullptr;
      const std::uint32_t a = s_.query(v, st.next++);
      if (a == kNull) st.done = true;
      else if (!s_.is_dummy(a)) st.core.push_back(a);
    }
    return &st.core;
  }

  bool complete(std::uint32_t v) const {
    auto it = state_.find(v);
    return it != state_.end() && it->second.done;
  }

  QuerySession& session() { return s_; }

 private:
  struct State {
    std::uint64_t next = 1;
    bool done = false;
    std::vector<std::uint32_t> core;
  };
  QuerySession& s_;
  std::unordered_map<std::uint32_t, State> state_;
};

// Reads every list, rebuilds the graph, two-colors it and matches exactly.
inline Guess run_full_scan(QuerySession& s) {
  Guess g;
  const std::uint64_t n = s.n();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  try {
    for (std::uint32_t v = 0; v < n; ++v)
      for (std::uint64_t i = 1;; ++i) {
        const std::uint32_t a = s.query(v, i);
        if (a == kNull) break;
        if (v < a) edges.emplace_back(v, a);
      }
  } catch (const BudgetExhausted&) {
    g.queries_used = s.spent();
    g.evidence["edges_read"] = static_cast<double>(edges.size());
    return g;
  }
  g.queries_used = s.spent();

  std::vector<std::uint64_t> off(n + 1, 0);
  for (auto [u, v] : edges) ++off[u + 1], ++off[v + 1];
  for (std::uint64_t v = 0; v < n; ++v) off[v + 1] += off[v];
  std::vector<std::uint32_t> adj(off[n]);
  std::vector<std::uint64_t> fill(off.begin(), off.end() - 1);
  for (auto [u, v] : edges) adj[fill[u]++] = v, adj[fill[v]++] = u;
  std::vector<std::uint8_t> color(n, 2);
  std::vector<std::uint32_t> queue;
  for (std::uint32_t r = 0; r < n; ++r) {
    if (color[r] != 2) continue;
    color[r] = 0;
    queue.assign(1, r);
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const std::uint32_t u = queue[h];
      for (std::uint64_t k = off[u]; k < off[u + 1]; ++k) {
        const std::uint32_t w = adj[k];
        if (color[w] == 2) {
          color[w] = 1 - color[u];
          queue.push_back(w);
        } else if (color[w] == color[u]) {
          g.evidence["not_bipartite"] = 1;
          return g;
        }
      }
    }
  }
  CsrGraph graph{n, std::move(color), std::move(off), std::move(adj)};
  const std::uint64_t mu = hopcroft_karp(CsrView(graph)).size;
  g.estimate = static_cast<double>(mu) / static_cast<double>(n);
  g.verdict = 2 * mu == n ? Verdict::Yes : Verdict::No;
  g.evidence["mu"] = static_cast<double>(mu);
  g.evidence["edges_read"] = static_cast<double>(edges.size());
  return g;
}

// YES iff estimate ≥ (n/2 − N_1/4)/n.
inline double greedy_threshold(const QuerySession& s) {
  const double n = static_cast<double>(s.n());
  return (n / 2 - to_double(Rational(s.params().N1)) / 4) / n;
}

// Samples core vertices, probes their lists, matches greedily on discovered core edges and
// scales the matched fraction up: estimate = (f·n_core/2 + t/2)/n.
inline Guess run_sampled_greedy(QuerySession& s, std::uint64_t sample_vertices, std::uint64_t per_vertex_probes,
                                Rng& rng) {
  Guess g;
  const std::uint64_t n = s.n();
  const std::uint64_t t = s.dummies().size();
  const std::uint64_t n_core = n - t;
  g.evidence["threshold"] = greedy_threshold(s);
  if (sample_vertices == 0 || n_core == 0) {
    g.verdict = Verdict::No;
    return g;
  }
  std::vector<std::uint32_t> core;
  core.reserve(n_core);
  for (std::uint32_t v = 0; v < n; ++v)
    if (!s.is_dummy(v)) core.push_back(v);

  std::unordered_set<std::uint32_t> matched;
  std::uint64_t sampled = 0, hits = 0, edges_found = 0;
  try {
    for (std::uint64_t k = 0; k < sample_vertices; ++k) {
      const std::uint32_t u = core[rng.below(core.size())];
      ++sampled;
      bool done = matched.count(u) > 0;
      if (done) ++hits;
      for (std::uint64_t i = 1; i <= per_vertex_probes; ++i) {
        const std::uint32_t a = s.query(u, i);
        if (a == kNull) break;
        if (s.is_dummy(a)) continue;
        ++edges_found;
        if (!done && !matched.count(a)) {
          matched.insert(u);
          matched.insert(a);
          done = true;
          ++hits;
        }
      }
    }
  } catch (const BudgetExhausted&) {
  }
  g.queries_used = s.spent();
  const double f = sampled ? static_cast<double>(hits) / static_cast<double>(sampled) : 0.0;
  g.estimate = (f * static_cast<double>(n_core) / 2 + static_cast<double>(t) / 2) / static_cast<double>(n);
  g.verdict = g.estimate >= greedy_threshold(s) ? Verdict::Yes : Verdict::No;
  g.evidence["sampled"] = static_cast<double>(sampled);
  g.evidence["matched_fraction"] = f;
  g.evidence["core_edges_found"] = static_cast<double>(edges_found);
  return g;
}

enum class BlockTest : std::uint8_t { SameBlockLikely, Different, Inconclusive };

inline const char* to_string(BlockTest b) {
  switch (b) {
    case BlockTest::SameBlockLikely: return "same-block-likely";
    case BlockTest::Different: return "different";
    default: return "inconclusive";
  }
}

// Alternating BFS over core lists from u and v; the first vertex seen from both sides is a
// collision. walk_budget bounds the probes spent by this call.
inline BlockTest run_block_birthday_test(ListReader& reader, std::uint32_t u, std::uint32_t v,
                                         std::uint64_t walk_budget) {
  QuerySession& s = reader.session();
  if (u == v) return BlockTest::SameBlockLikely;
  if (s.is_dummy(u) || s.is_dummy(v)) return BlockTest::Different;
  const std::uint64_t start = s.spent();
  std::unordered_set<std::uint32_t> seen[2] = {{u}, {v}};
  std::vector<std::uint32_t> frontier[2] = {{u}, {v}};
  std::size_t head[2] = {0, 0};
  try {
    while (head[0] < frontier[0].size() || head[1] < frontier[1].size()) {
      for (int side = 0; side < 2; ++side) {
        if (head[side] >= frontier[side].size()) continue;
        const std::uint32_t x = frontier[side][head[side]++];
        const auto* list = reader.core_list_until(x, start + walk_budget);
        if (!list) return BlockTest::Inconclusive;
        for (std::uint32_t y : *list) {
          if (seen[1 - side].count(y)) return BlockTest::SameBlockLikely;
          if (seen[side].insert(y).second) frontier[side].push_back(y);
        }
      }
    }
  } catch (const BudgetExhausted&) {
    return BlockTest::Inconclusive;
  }
  return BlockTest::Different;
}

inline BlockTest run_block_birthday_test(QuerySession& s, std::uint32_t u, std::uint32_t v,
                                         std::uint64_t walk_budget) {
  ListReader reader(s);
  return run_block_birthday_test(reader, u, v, walk_budget);
}

struct ChaserConfig {
  std::uint64_t max_hops = 0;  // 0: 2r + 2
};

// One realization of the special-edge chasing idea; the verdict rule is a heuristic.
// From each start, read the current vertex's core neighbors and the neighbors' lists; the
// neighbor whose list overlaps least with the others' lists is taken to leave the block.
// A chain ends at a vertex whose S-label is disclosed.
inline Guess run_special_edge_chaser(QuerySession& s, std::uint64_t starts, Rng& rng, const ChaserConfig& cfg = {}) {
  Guess g;
  g.evidence["heuristic"] = 1;
  if (starts == 0) return g;
  const std::uint64_t n = s.n();
  std::vector<std::uint32_t> core;
  for (std::uint32_t v = 0; v < n; ++v)
    if (!s.is_dummy(v)) core.push_back(v);
  if (core.empty()) return g;
  const std::uint64_t max_hops =
      cfg.max_hops ? cfg.max_hops : 2 * static_cast<std::uint64_t>(s.params().r) + 2;
  ListReader reader(s);
  std::uint64_t reached = 0, finished = 0, total_len = 0;
  std::uint64_t max_len = 0;
  std::map<int, std::uint64_t> end_part;
  try {
    for (std::uint64_t k = 0; k < starts; ++k) {
      std::uint32_t x = core[rng.below(core.size())];
      std::uint32_t prev = kNone;
      std::unordered_set<std::uint32_t> visited{x};
      std::uint64_t len = 0;
      bool hit = false;
      while (true) {
        if (s.s_label(x)) {
          hit = true;
          break;
        }
        if (len >= max_hops) break;
        const std::vector<std::uint32_t> nb = reader.core_list(x);
        if (s.s_label(x)) {
          hit = true;
          break;
        }
        std::vector<std::uint32_t> cand;
        for (std::uint32_t y : nb)
          if (y != prev && !visited.count(y)) cand.push_back(y);
        if (cand.empty()) break;
        std::uint32_t next = kNone;
        for (std::uint32_t y : cand)
          if (s.s_label(y)) next = y;
        if (next == kNone) {
          std::unordered_map<std::uint32_t, std::uint32_t> count;
          std::vector<std::vector<std::uint32_t>> lists;
          for (std::uint32_t y : cand) {
            lists.push_back(reader.core_list(y));
            for (std::uint32_t w : lists.back())
              if (w != x) ++count[w];
          }
          std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
          for (std::size_t c = 0; c < cand.size(); ++c) {
            std::uint64_t score = 0;
            for (std::uint32_t w : lists[c])
              if (w != x) score += count[w] - 1;
            if (score < best || (score == best && cand[c] < next)) best = score, next = cand[c];
          }
        }
        prev = x;
        x = next;
        visited.insert(x);
        ++len;
      }
      ++finished;
      total_len += len;
      max_len = std::max(max_len, len);
      if (hit) {
        ++reached;
        ++end_part[*s.s_label(x)];
      }
    }
  } catch (const BudgetExhausted&) {
  }
  g.queries_used = s.spent();
  g.evidence["chains"] = static_cast<double>(finished);
  g.evidence["reached_s"] = static_cast<double>(reached);
  g.evidence["mean_chain_length"] = finished ? static_cast<double>(total_len) / static_cast<double>(finished) : 0.0;
  g.evidence["max_chain_length"] = static_cast<double>(max_len);
  if (finished == 0) return g;
  const double frac = static_cast<double>(reached) / static_cast<double>(finished);
  g.estimate = frac;
  g.verdict = frac >= 0.5 ? Verdict::Yes : Verdict::No;
  return g;
}

// ---------------------------------------------------------------------------
// Distinguishing game

enum class Algorithm : std::uint8_t { FullScan, SampledGreedy, SpecialEdgeChaser };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::FullScan: return "full_scan";
    case Algorithm::SampledGreedy: return "sampled_greedy";
    default: return "special_edge_chaser";
  }
}

inline std::optional<Algorithm> parse_algorithm(const std::string& s) {
  if (s == "full_scan") return Algorithm::FullScan;
  if (s == "sampled_greedy") return Algorithm::SampledGreedy;
  if (s == "special_edge_chaser" || s == "chaser") return Algorithm::SpecialEdgeChaser;
  return std::nullopt;
}

struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::FullScan;
  std::uint64_t sample_vertices = 64;
  std::uint64_t per_vertex_probes = 64;
  std::uint64_t starts = 8;
  ChaserConfig chaser;
};

struct TrialOutcome {
  Side side = Side::Yes;
  Verdict verdict = Verdict::Abstain;
  bool success = false;
  std::uint64_t queries_used = 0;
};

struct GameResult {
  std::string algorithm;
  std::uint64_t budget = 0;
  std::uint64_t trials = 0;
  std::uint64_t success_count = 0;
  std::uint64_t abstentions = 0;
  std::uint64_t yes_trials = 0;
  double success_rate = 0;
  double wilson_lo = 0;
  double wilson_hi = 0;
  double mean_queries = 0;
  std::vector<TrialOutcome> outcomes;

  bool operator==(const GameResult& o) const {
    return algorithm == o.algorithm && budget == o.budget && trials == o.trials &&
           success_count == o.success_count && abstentions == o.abstentions && yes_trials == o.yes_trials;
  }
};

// 95% Wilson score interval.
inline std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n), p = static_cast<double>(k) / nn, z2 = z * z;
  const double center = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

inline Guess run_algorithm(const AlgorithmConfig& cfg, QuerySession& s, Rng& rng) {
  switch (cfg.algorithm) {
    case Algorithm::FullScan: return run_full_scan(s);
    case Algorithm::SampledGreedy: return run_sampled_greedy(s, cfg.sample_vertices, cfg.per_vertex_probes, rng);
    default: return run_special_edge_chaser(s, cfg.starts, rng, cfg.chaser);
  }
}

// Trial k: side coin, instance and algorithm streams all derive from (master_seed, k), so
// runs at different budgets see the same instances. An abstention is scored by its own coin.
inline TrialOutcome play_trial(const AlgorithmConfig& cfg, const ParamSet& p, std::uint64_t budget,
                               std::uint64_t master_seed, std::uint64_t k) {
  const std::uint64_t tseed = derive_seed(master_seed, 0x67616D65ULL, k);
  TrialOutcome o;
  o.side = Rng(derive_seed(tseed, 1)).coin() ? Side::No : Side::Yes;
  const Instance inst = assemble(p, o.side, derive_seed(tseed, 2));
  QuerySession s(inst, budget);
  Rng rng(derive_seed(tseed, 3));
  const Guess g = run_algorithm(cfg, s, rng);
  o.verdict = g.verdict;
  o.queries_used = g.queries_used;
  if (g.verdict == Verdict::Abstain) o.success = Rng(derive_seed(tseed, 4)).coin();
  else o.success = (g.verdict == Verdict::Yes) == (o.side == Side::Yes);
  return o;
}

inline GameResult play_game(const AlgorithmConfig& cfg, const ParamSet& p, std::uint64_t budget,
                            std::uint64_t trials, std::uint64_t master_seed, unsigned jobs = 1) {
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
  GameResult r;
  r.algorithm = to_string(cfg.algorithm);
  r.budget = budget;
  r.trials = trials;
  r.outcomes.resize(trials);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(trials)));
  auto work = [&](unsigned j) {
    for (std::uint64_t k = j; k < trials; k += jobs) r.outcomes[k] = play_trial(cfg, p, budget, master_seed, k);
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j);
    for (auto& th : pool) th.join();
  }
  double q = 0;
  for (const TrialOutcome& o : r.outcomes) {
    r.success_count += o.success;
    r.abstentions += o.verdict == Verdict::Abstain;
    r.yes_trials += o.side == Side::Yes;
    q += static_cast<double>(o.queries_used);
  }
  r.success_rate = static_cast<double>(r.success_count) / static_cast<double>(trials);
  std::tie(r.wilson_lo, r.wilson_hi) = wilson_interval(r.success_count, trials);
  r.mean_queries = q / static_cast<double>(trials);
  return r;
}

inline std::string game_csv_header() {
  return "algorithm,budget,trials,success_count,abstentions,yes_trials,success_rate,wilson_lo,wilson_hi,mean_queries";
}

inline std::string game_csv_row(const GameResult& r) {
  std::ostringstream os;
  os << r.algorithm << ',' << (r.budget == kUnlimited ? std::string("unlimited") : std::to_string(r.budget)) << ','
     << r.trials << ',' << r.success_count << ',' << r.abstentions << ',' << r.yes_trials << ',' << r.success_rate
     << ',' << r.wilson_lo << ',' << r.wilson_hi << ',' << r.mean_queries;
  return os.str();
}

}  // namespace mmhard
