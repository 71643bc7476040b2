#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mmhard/hopcroft_karp.hpp"
#include "mmhard/instance.hpp"

namespace mmhard {

class NotBipartite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MatchingCertificate {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> matching;
  std::vector<std::uint32_t> cover;
  std::uint64_t size = 0;
};

// CSR with sorted rows. Throws NotBipartite if an edge joins two vertices of one side.
inline CsrGraph to_csr(std::uint64_t n, const std::vector<std::uint8_t>& side,
                       const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  CsrGraph g;
  g.n = n;
  g.side = side;
  g.offsets.assign(n + 1, 0);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw std::out_of_range("edge endpoint out of range");
    if (side[u] == side[v]) throw NotBipartite("edge joins two vertices on one side");
    ++g.offsets[u + 1];
    ++g.offsets[v + 1];
  }
  for (std::uint64_t v = 0; v < n; ++v) g.offsets[v + 1] += g.offsets[v];
  g.adj.resize(g.offsets[n]);
  std::vector<std::uint64_t> fill(g.offsets.begin(), g.offsets.end() - 1);
  for (auto [u, v] : edges) {
    g.adj[fill[u]++] = v;
    g.adj[fill[v]++] = u;
  }
  for (std::uint64_t v = 0; v < n; ++v)
    std::sort(g.adj.begin() + static_cast<std::ptrdiff_t>(g.offsets[v]),
              g.adj.begin() + static_cast<std::ptrdiff_t>(g.offsets[v + 1]));
  return g;
}

inline CsrGraph to_csr(const LevelGraph& lg) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(lg.edges.size());
  for (const EdgeRec& e : lg.edges) edges.emplace_back(e.u, e.v);
  return to_csr(lg.n, lg.vertex_side, edges);
}

namespace detail {

inline MatchingCertificate certificate_from(const HopcroftKarpResult& hk, const CsrView& g) {
  MatchingCertificate cert;
  cert.size = hk.size;
  for (std::uint32_t u = 0; u < g.n; ++u)
    if (g.side[u] == 0 && hk.mate[u] != kNone) cert.matching.emplace_back(u, hk.mate[u]);
  cert.cover = hk.cover;
  return cert;
}

inline bool csr_has_edge(const CsrView& g, std::uint32_t u, std::uint32_t v) {
  if (g.degree(u) > g.degree(v)) std::swap(u, v);
  for (std::uint64_t k = g.offsets[u]; k < g.offsets[u + 1]; ++k)
    if (g.adj[k] == v) return true;
  return false;
}

inline bool matching_disjoint(std::uint64_t n, const MatchingCertificate& c) {
  std::vector<std::uint8_t> used(n, 0);
  for (auto [u, v] : c.matching) {
    if (u >= n || v >= n || u == v || used[u] || used[v]) return false;
    used[u] = used[v] = 1;
  }
  return true;
}

inline std::vector<std::uint8_t> cover_marks(std::uint64_t n, const MatchingCertificate& c, bool& ok) {
  std::vector<std::uint8_t> in(n, 0);
  ok = true;
  for (std::uint32_t v : c.cover) {
    if (v >= n || in[v]) ok = false;
    else in[v] = 1;
  }
  return in;
}

}  // namespace detail

inline MatchingCertificate max_matching(const CsrView& g) {
  for (std::uint32_t u = 0; u < g.n; ++u)
    for (std::uint64_t k = g.offsets[u]; k < g.offsets[u + 1]; ++k)
      if (g.side[g.adj[k]] == g.side[u]) throw NotBipartite("edge joins two vertices on one side");
  return detail::certificate_from(hopcroft_karp(g), g);
}

inline MatchingCertificate max_matching(const LevelGraph& lg) { return max_matching(CsrView(to_csr(lg))); }

// Dummies are matched arithmetically: with core matching μ_H, t dummies per side and
// f_s = |core side s| − μ_H unmatched core vertices per side,
// μ = μ_H + t + min(t, f_0, f_1).
inline MatchingCertificate max_matching(const Instance& inst) {
  const CsrView core(inst.n, inst.vertex_side.data(), inst.offsets.data(), inst.neighbors.data());
  const HopcroftKarpResult hk = hopcroft_karp(core);
  MatchingCertificate cert = detail::certificate_from(hk, core);
  const auto& D0 = inst.dummies_of_side[0];
  const auto& D1 = inst.dummies_of_side[1];
  const std::uint64_t t = D0.size();
  const std::uint64_t mu_h = hk.size;
  const std::uint64_t f0 = inst.core_of_side[0].size() - mu_h;
  const std::uint64_t f1 = inst.core_of_side[1].size() - mu_h;
  const std::uint64_t k = std::min({t, f0, f1});

  std::vector<std::uint32_t> free0, free1;
  for (std::uint32_t v : inst.core_of_side[0])
    if (hk.mate[v] == kNone && free0.size() < k) free0.push_back(v);
  for (std::uint32_t v : inst.core_of_side[1])
    if (hk.mate[v] == kNone && free1.size() < k) free1.push_back(v);
  for (std::uint64_t i = 0; i < t; ++i) {
    if (i < k) {
      cert.matching.emplace_back(free0[i], D1[i]);
      cert.matching.emplace_back(D0[i], free1[i]);
    } else {
      cert.matching.emplace_back(D0[i], D1[i]);
    }
  }
  cert.size = mu_h + t + k;

  if (t <= std::min(f0, f1)) {
    cert.cover.insert(cert.cover.end(), D0.begin(), D0.end());
    cert.cover.insert(cert.cover.end(), D1.begin(), D1.end());
  } else {
    const int s = f0 <= f1 ? 0 : 1;
    cert.cover.assign(inst.core_of_side[s].begin(), inst.core_of_side[s].end());
    cert.cover.insert(cert.cover.end(), inst.dummies_of_side[s].begin(), inst.dummies_of_side[s].end());
  }
  std::sort(cert.cover.begin(), cert.cover.end());
  return cert;
}

inline bool verify_certificate(const CsrView& g, const MatchingCertificate& c) {
  if (c.matching.size() != c.size || c.cover.size() != c.size) return false;
  if (!detail::matching_disjoint(g.n, c)) return false;
  for (auto [u, v] : c.matching)
    if (!detail::csr_has_edge(g, u, v)) return false;
  bool ok = true;
  const auto in = detail::cover_marks(g.n, c, ok);
  if (!ok) return false;
  for (std::uint32_t u = 0; u < g.n; ++u)
    for (std::uint64_t k = g.offsets[u]; k < g.offsets[u + 1]; ++k)
      if (!in[u] && !in[g.adj[k]]) return false;
  return true;
}

inline bool verify_certificate(const LevelGraph& lg, const MatchingCertificate& c) {
  const CsrGraph g = to_csr(lg);
  return verify_certificate(CsrView(g), c);
}

inline bool verify_certificate(const Instance& inst, const MatchingCertificate& c) {
  if (c.matching.size() != c.size || c.cover.size() != c.size) return false;
  if (!detail::matching_disjoint(inst.n, c)) return false;
  for (auto [u, v] : c.matching)
    if (!inst.adjacent(u, v)) return false;
  bool ok = true;
  const auto in = detail::cover_marks(inst.n, c, ok);
  if (!ok) return false;
  std::uint64_t covered_core[2] = {0, 0};
  for (std::uint32_t u = 0; u < inst.n; ++u) {
    if (inst.is_dummy(u)) continue;
    if (in[u]) ++covered_core[inst.vertex_side[u]];
    for (std::uint64_t k = inst.offsets[u]; k < inst.offsets[u + 1]; ++k)
      if (!in[u] && !in[inst.neighbors[k]]) return false;
  }
  for (int s = 0; s < 2; ++s)
    for (std::uint32_t d : inst.dummies_of_side[s]) {
      if (in[d]) continue;
      // An uncovered dummy needs every opposite core vertex and its partner covered.
      if (covered_core[1 - s] != inst.core_of_side[1 - s].size()) return false;
      if (!in[inst.dummies_of_side[1 - s][inst.dummy_rank[d]]]) return false;
    }
  return true;
}

struct GapReport {
  std::uint64_t n = 0;
  std::uint64_t n_L = 0;
  std::uint64_t N1 = 0;
  std::uint64_t mu_yes = 0;
  std::uint64_t mu_no = 0;
  std::int64_t gap = 0;
  bool yes_perfect = false;    // μ(yes) = n/2
  bool no_bound = false;       // μ(no) ≤ n/2 − N_1/2
  bool gap_ok = false;         // gap ≥ N_1/2
  bool certificates_ok = false;
  double eps_times_n = 0;      // ε·n
  bool eps_ok = false;         // ε·n ≤ N_1/2
  bool pass = false;
};

inline GapReport verify_gap(const Instance& yes, const Instance& no, const ParamSet& p) {
  GapReport g;
  g.n = yes.n;
  g.n_L = yes.n_core;
  g.N1 = to_u64(p.N1, "N1");
  const MatchingCertificate cy = max_matching(yes);
  const MatchingCertificate cn = max_matching(no);
  g.certificates_ok = verify_certificate(yes, cy) && verify_certificate(no, cn);
  g.mu_yes = cy.size;
  g.mu_no = cn.size;
  g.gap = static_cast<std::int64_t>(g.mu_yes) - static_cast<std::int64_t>(g.mu_no);
  // Compare doubled quantities to stay in integers.
  g.yes_perfect = 2 * g.mu_yes == yes.n;
  g.no_bound = 2 * g.mu_no + g.N1 <= no.n;
  g.gap_ok = 2 * g.gap >= static_cast<std::int64_t>(g.N1);
  const double log10_n = log_big(to_int(p.n_total)) / std::log(10.0);
  g.eps_times_n = std::pow(10.0, p.log10_epsilon + log10_n);
  g.eps_ok = p.log10_epsilon + log10_n <= std::log10(static_cast<double>(g.N1) / 2.0) + 1e-12;
  g.pass = g.yes_perfect && g.no_bound && g.gap_ok && g.certificates_ok && g.eps_ok;
  return g;
}

inline std::string to_json(const GapReport& g) {
  nlohmann::json j = {{"n", g.n},           {"n_L", g.n_L},
                      {"N1", g.N1},         {"mu_yes", g.mu_yes},
                      {"mu_no", g.mu_no},   {"gap", g.gap},
                      {"yes_perfect", g.yes_perfect},
                      {"no_bound", g.no_bound},
                      {"gap_ok", g.gap_ok}, {"certificates_ok", g.certificates_ok},
                      {"eps_times_n", g.eps_times_n},
                      {"eps_ok", g.eps_ok}, {"pass", g.pass}};
  return j.dump();
}

inline std::string gap_csv_header() {
  return "n,n_L,N1,mu_yes,mu_no,gap,yes_perfect,no_bound,gap_ok,certificates_ok,eps_times_n,eps_ok,pass";
}

inline std::string gap_csv_row(const GapReport& g) {
  std::ostringstream os;
  os << g.n << ',' << g.n_L << ',' << g.N1 << ',' << g.mu_yes << ',' << g.mu_no << ',' << g.gap << ','
     << g.yes_perfect << ',' << g.no_bound << ',' << g.gap_ok << ',' << g.certificates_ok << ','
     << g.eps_times_n << ',' << g.eps_ok << ',' << g.pass;
  return os.str();
}

}  // namespace mmhard
