#include <gtest/gtest.h>

#include <set>

#include "mmhard/mmhard.hpp"
#include "tiny.hpp"

using namespace mmhard;

namespace {

const Instance& small_yes() {
  static const Instance inst = assemble(preset("small"), Side::Yes, 7);
  return inst;
}
const Instance& small_no() {
  static const Instance inst = assemble(preset("small"), Side::No, 7);
  return inst;
}
const Instance& l2_no() {
  static const Instance inst = assemble(preset("small-l2"), Side::No, 7);
  return inst;
}

// Two-colors the full graph (dummies included) by BFS, ignoring declared sides.
bool two_colorable(const Instance& inst) {
  std::vector<int> color(inst.n, -1);
  for (std::uint32_t r = 0; r < inst.n; ++r) {
    if (color[r] != -1) continue;
    color[r] = 0;
    std::vector<std::uint32_t> q{r};
    for (std::size_t h = 0; h < q.size(); ++h) {
      const std::uint32_t u = q[h];
      for (std::uint64_t j = 0; j < inst.degree(u); ++j) {
        const std::uint32_t w = inst.list_entry(u, j);
        if (color[w] == -1) {
          color[w] = 1 - color[u];
          q.push_back(w);
        } else if (color[w] == color[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

std::set<std::pair<std::uint32_t, std::uint32_t>> core_edge_set(const Instance& inst) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> s;
  for (std::uint32_t v = 0; v < inst.n; ++v)
    for (std::uint64_t k = inst.offsets[v]; k < inst.offsets[v + 1]; ++k)
      if (v < inst.neighbors[k]) s.emplace(v, inst.neighbors[k]);
  return s;
}

}  // namespace

TEST(Assemble, VertexCounts) {
  for (const Instance* inst : {&small_yes(), &small_no(), &l2_no()}) {
    const ParamSet& p = inst->params;
    EXPECT_EQ(Rational(inst->n), p.n_total);
    EXPECT_EQ(Rational(inst->n_core), p.n_level.back());
    EXPECT_EQ(Rational(inst->dummy_count), p.dummy_count);
    EXPECT_EQ(inst->core_of_side[0].size(), inst->core_of_side[1].size());
    EXPECT_EQ(inst->dummies_of_side[0].size(), inst->dummy_count / 2);
    EXPECT_EQ(inst->dummies_of_side[1].size(), inst->dummy_count / 2);
  }
}

TEST(Assemble, TwoColorable) {
  for (const Instance* inst : {&small_yes(), &small_no(), &l2_no()}) {
    EXPECT_TRUE(two_colorable(*inst));
    for (std::uint32_t v = 0; v < inst->n; ++v)
      for (std::uint64_t k = inst->offsets[v]; k < inst->offsets[v + 1]; ++k)
        ASSERT_NE(inst->vertex_side[v], inst->vertex_side[inst->neighbors[k]]);
  }
}

TEST(Assemble, CoreRowsSortedAndSymmetric) {
  const Instance& inst = l2_no();
  for (std::uint32_t v = 0; v < inst.n; ++v) {
    for (std::uint64_t k = inst.offsets[v]; k + 1 < inst.offsets[v + 1]; ++k)
      ASSERT_LT(inst.neighbors[k], inst.neighbors[k + 1]);
    for (std::uint64_t k = inst.offsets[v]; k < inst.offsets[v + 1]; ++k) {
      const std::uint32_t u = inst.neighbors[k];
      const std::uint64_t back = inst.find_core(u, v);
      ASSERT_NE(back, kNone);
      ASSERT_EQ(inst.edge_tags[back], inst.edge_tags[k]);
    }
  }
}

// Degree law: non-S core vertices of one top-level subset share a degree; S vertices at the
// base have one pairing edge on top of what higher levels give.
TEST(Assemble, DegreeContract) {
  for (const Instance* inst : {&small_yes(), &small_no(), &l2_no()}) {
    const auto plans = plan_all(inst->params);
    for (std::uint32_t v = 0; v < inst->n; ++v) {
      if (inst->is_dummy(v)) {
        EXPECT_EQ(inst->core_degree(v), 0u);
        continue;
      }
      std::uint64_t expect = 0;
      for (int m = 1; m <= inst->L(); ++m) {
        const bool s = inst->label(m, v).kind == Kind::S;
        const auto T = to_u64(plans[m - 1].T, "T");
        expect += m == 1 ? (s ? 1 : T + 1) : (s ? 0 : T);
      }
      ASSERT_EQ(inst->core_degree(v), expect) << "vertex " << v << " " << subset_name(inst->label(inst->L(), v));
    }
  }
}

TEST(Assemble, DummyNeighbourhoods) {
  const Instance& inst = small_no();
  const std::uint64_t half = inst.dummy_count / 2;
  for (std::uint32_t v = 0; v < inst.n; ++v) {
    std::uint64_t dummies = 0;
    std::set<std::uint32_t> seen;
    for (std::uint64_t j = 0; j < inst.degree(v); ++j) {
      const std::uint32_t u = inst.list_entry(v, j);
      ASSERT_TRUE(seen.insert(u).second);
      ASSERT_TRUE(inst.adjacent(v, u));
      ASSERT_TRUE(inst.adjacent(u, v));
      dummies += inst.is_dummy(u);
    }
    if (inst.is_dummy(v)) {
      // Every opposite core vertex plus one dummy partner.
      EXPECT_EQ(inst.degree(v), inst.n_core / 2 + 1);
      EXPECT_EQ(dummies, 1u);
    } else {
      EXPECT_EQ(dummies, half);
    }
  }
}

// Origin level 1 exactly when both endpoints lie in one embedded base copy. Those copies sit
// between paired level-2 subsets: S–B_1, A_i–B_{i+1}, D quarters, A_r^1–A_r^2.
TEST(Assemble, OriginLevelConsistentWithLabels) {
  const Instance& inst = l2_no();
  const auto r = static_cast<std::uint16_t>(inst.params.r);
  auto paired = [&](const LabelEntry& a, const LabelEntry& b) {
    auto one_way = [&](const LabelEntry& x, const LabelEntry& y) {
      if (x.kind == Kind::S && y.kind == Kind::B) return y.layer == 1 && x.part == y.part;
      if (x.kind == Kind::A && y.kind == Kind::B) return y.layer == x.layer + 1 && x.part == y.part;
      if (x.kind == Kind::A && y.kind == Kind::A) return x.layer == r && y.layer == r && x.part != y.part;
      if (x.kind == Kind::D && y.kind == Kind::D) return x.layer == y.layer && x.part != y.part;
      return false;
    };
    return one_way(a, b) || one_way(b, a);
  };
  std::uint64_t per_level[3] = {0, 0, 0};
  for (std::uint32_t v = 0; v < inst.n; ++v)
    for (std::uint64_t k = inst.offsets[v]; k < inst.offsets[v + 1]; ++k) {
      const std::uint32_t u = inst.neighbors[k];
      const int lvl = tag_level(inst.edge_tags[k]);
      ASSERT_GE(lvl, 1);
      ASSERT_LE(lvl, inst.L());
      ++per_level[lvl];
      const bool same_copy = inst.label(1, v).copy == inst.label(1, u).copy;
      ASSERT_EQ(lvl == 1, same_copy) << v << "-" << u;
      if (lvl == 1)
        ASSERT_TRUE(paired(inst.label(2, v), inst.label(2, u)))
            << subset_name(inst.label(2, v)) << " " << subset_name(inst.label(2, u));
    }
  EXPECT_GT(per_level[1], 0u);
  EXPECT_GT(per_level[2], 0u);
}

TEST(Assemble, LabelPathsWellFormed) {
  const Instance& inst = l2_no();
  const auto r = inst.params.r;
  for (std::uint32_t v = 0; v < inst.n; ++v) {
    const LabelPath lp = inst.label_path(v);
    if (inst.is_dummy(v)) {
      EXPECT_TRUE(lp.dummy);
      EXPECT_TRUE(lp.entries.empty());
      continue;
    }
    ASSERT_EQ(lp.entries.size(), 2u);
    EXPECT_EQ(lp.entries[0].level, 2);
    EXPECT_EQ(lp.entries[1].level, 1);
    EXPECT_EQ(lp.entries[0].side, inst.vertex_side[v]);
    for (const auto& e : lp.entries) {
      if (e.label.kind == Kind::S) {
        EXPECT_EQ(e.label.layer, 0);
        EXPECT_TRUE(e.label.part == 1 || e.label.part == 2);
      } else if (e.label.kind == Kind::D) {
        EXPECT_GE(e.label.part, 1);
        EXPECT_LE(e.label.part, 4);
      } else {
        EXPECT_TRUE(e.label.part == 1 || e.label.part == 2);
      }
      if (e.label.kind != Kind::S) {
        EXPECT_GE(e.label.layer, 1);
        EXPECT_LE(e.label.layer, r);
      }
    }
  }
}

TEST(Assemble, SameSeedSameInstance) {
  const ParamSet p = preset("small");
  EXPECT_EQ(assemble(p, Side::No, 7), small_no());
  EXPECT_FALSE(assemble(p, Side::No, 8) == small_no());
}

TEST(Assemble, YesIsPerfectNoIsNot) {
  EXPECT_EQ(2 * max_matching(small_yes()).size, small_yes().n);
  EXPECT_LT(2 * max_matching(small_no()).size, small_no().n);
}

// Coupled YES/NO differ only among level-1 A_r and B_r vertices.
TEST(Coupled, DifferenceConfinedToDistinguishingRegion) {
  for (const char* name : {"small", "small-l2"}) {
    const ParamSet p = preset(name);
    const Instance yes = assemble(p, Side::Yes, 3, {.coupled = true});
    const Instance no = assemble(p, Side::No, 3, {.coupled = true});
    EXPECT_TRUE(yes.coupled);
    EXPECT_EQ(yes.labels, no.labels);
    EXPECT_EQ(yes.vertex_side, no.vertex_side);
    const auto ey = core_edge_set(yes), en = core_edge_set(no);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> diff;
    std::set_symmetric_difference(ey.begin(), ey.end(), en.begin(), en.end(), std::back_inserter(diff));
    EXPECT_FALSE(diff.empty());
    const auto r = static_cast<std::uint16_t>(p.r);
    for (auto [u, v] : diff)
      for (std::uint32_t x : {u, v}) {
        const LabelEntry& e = yes.label(1, x);
        ASSERT_TRUE((e.kind == Kind::A || e.kind == Kind::B) && e.layer == r)
            << name << " " << subset_name(e);
      }
  }
}

TEST(Coupled, UncoupledSidesShareNothingByDesign) {
  const ParamSet p = preset("small");
  const Instance yes = assemble(p, Side::Yes, 3);
  const Instance no = assemble(p, Side::No, 3);
  EXPECT_NE(yes.perm_seeds, no.perm_seeds);
}

TEST(Assemble, EmptyCoreDiagnostic) {
  const Instance inst = assemble(preset("small"), Side::Yes, 1, {.empty_core = true});
  EXPECT_EQ(inst.core_edge_count(), 0u);
  EXPECT_EQ(inst.n, 516u);
  // Only the dummy matching and dummy–core edges remain: μ = t + min(t, n_core/2).
  EXPECT_EQ(max_matching(inst).size, 12u);
}

TEST(Assemble, LevelGraphMatchesPlan) {
  const ParamSet p = preset("small-l2");
  const LevelGraph base = build_base(p, Side::Yes, 1);
  EXPECT_EQ(Rational(base.n), p.n_level[0]);
  const LevelGraph top = build_level(2, p, Side::No, 1);
  EXPECT_EQ(Rational(top.n), p.n_level[1]);
  EXPECT_EQ(top.labels.size(), 2u);
}

TEST(Assemble, InvalidParamsRejected) {
  ParamSet p = preset("small");
  p.N1 = 35;
  complete(p);
  EXPECT_THROW(assemble(p, Side::Yes, 1), ParamError);
}

TEST(Assemble, AdjacentRejectsSameSideAndOutOfRange) {
  const Instance& inst = small_yes();
  const std::uint32_t a = inst.core_of_side[0][0], b = inst.core_of_side[0][1];
  EXPECT_FALSE(inst.adjacent(a, b));
  EXPECT_FALSE(inst.adjacent(a, static_cast<std::uint32_t>(inst.n)));
  const std::uint32_t d0 = inst.dummies_of_side[0][0];
  EXPECT_TRUE(inst.adjacent(d0, inst.dummies_of_side[1][0]));
  EXPECT_FALSE(inst.adjacent(d0, inst.dummies_of_side[1][1]));
  EXPECT_TRUE(inst.adjacent(d0, inst.core_of_side[1][0]));
}
