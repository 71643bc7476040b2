#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "mmhard/params.hpp"
#include "mmhard/rng.hpp"

namespace mmhard {

// Named valid parameter sets, from desk scale up to n ≈ 10⁶.
inline ParamSet preset(const std::string& name) {
  if (name == "small")  // n = 516
    return toy_params(1, 2, {16}, 48, Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 42));
  if (name == "small-r3")  // n = 2196
    return toy_params(1, 3, {36}, 144, Rational(1, 2), Rational(1, 4), Rational(1, 12), Rational(1, 60));
  if (name == "small-l2")  // n = 22440
    return toy_params(2, 2, {16, 32}, 48, Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 84));
  if (name == "medium")  // n = 100596
    return toy_params(1, 2, {32}, 9600, Rational(1, 4), Rational(1, 16), Rational(1, 16), Rational(1, 100));
  if (name == "large")  // n = 1010000
    return toy_params(1, 2, {32}, 100000, Rational(1, 4), Rational(1, 4), Rational(1, 16), Rational(1, 100));
  throw std::invalid_argument("unknown preset '" + name + "'");
}

inline std::vector<std::string> preset_names() { return {"small", "small-r3", "small-l2", "medium", "large"}; }

// Exhaustive maximum matching of a bipartite graph given as left-indexed adjacency over right
// vertices 0..nr-1 (nr ≤ 63): tries every choice for every left vertex.
inline std::uint64_t brute_force_matching(const std::vector<std::vector<std::uint32_t>>& adj, std::uint32_t nr) {
  if (nr > 63) throw std::invalid_argument("brute force limited to 63 right vertices");
  std::map<std::pair<std::size_t, std::uint64_t>, std::uint64_t> memo;
  auto rec = [&](auto&& self, std::size_t i, std::uint64_t used) -> std::uint64_t {
    if (i == adj.size()) return 0;
    auto it = memo.find({i, used});
    if (it != memo.end()) return it->second;
    std::uint64_t best = self(self, i + 1, used);
    for (std::uint32_t v : adj[i])
      if (!(used >> v & 1)) best = std::max(best, 1 + self(self, i + 1, used | (std::uint64_t{1} << v)));
    memo[{i, used}] = best;
    return best;
  };
  return rec(rec, 0, 0);
}

struct RandomBipartite {
  std::uint32_t nl = 0, nr = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // (left, right)
};

inline RandomBipartite random_bipartite(Rng& rng, std::uint32_t max_vertices) {
  RandomBipartite g;
  const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng.below(max_vertices));
  g.nl = static_cast<std::uint32_t>(rng.below(n + 1));
  g.nr = n - g.nl;
  const double p = rng.uniform01();
  for (std::uint32_t a = 0; a < g.nl; ++a)
    for (std::uint32_t b = 0; b < g.nr; ++b)
      if (rng.uniform01() < p) g.edges.emplace_back(a, b);
  return g;
}

struct ChiSquare {
  double statistic = 0;
  double dof = 0;
  double p_value = 1;
};

// Pearson test of observed counts against equal expected frequencies.
inline ChiSquare chi_square_uniform(const std::vector<std::uint64_t>& counts) {
  ChiSquare c;
  if (counts.size() < 2) return c;
  std::uint64_t total = 0;
  for (auto k : counts) total += k;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  for (auto k : counts) c.statistic += (static_cast<double>(k) - expected) * (static_cast<double>(k) - expected) / expected;
  c.dof = static_cast<double>(counts.size() - 1);
  c.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(c.dof), c.statistic));
  return c;
}

}  // namespace mmhard
