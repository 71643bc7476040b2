#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "mmhard/mmhard.hpp"
#include "tiny.hpp"

using namespace mmhard;

static_assert(!ExposesLabels<QuerySession>, "sessions must not expose ground-truth labels");
static_assert(ExposesLabels<Instance>);

namespace {

const Instance& inst() {
  static const Instance i = assemble(preset("small"), Side::No, 21);
  return i;
}

}  // namespace

TEST(SlotPermutation, IsBijection) {
  for (std::uint64_t m : {1u, 2u, 3u, 17u, 256u, 1000u, 4099u}) {
    const SlotPermutation pi(m, derive_seed(5, m));
    std::vector<char> hit(m, 0);
    for (std::uint64_t i = 0; i < m; ++i) {
      const std::uint64_t x = pi(i);
      ASSERT_LT(x, m);
      ASSERT_FALSE(hit[x]);
      hit[x] = 1;
    }
  }
}

TEST(SlotPermutation, KeyChangesOrder) {
  const SlotPermutation a(500, 1), b(500, 2);
  int same = 0;
  for (std::uint64_t i = 0; i < 500; ++i) same += a(i) == b(i);
  EXPECT_LT(same, 20);
}

TEST(Session, BudgetZero) {
  QuerySession s(inst(), 0);
  EXPECT_EQ(s.remaining(), 0u);
  EXPECT_THROW(s.query(0, 1), BudgetExhausted);
  EXPECT_EQ(s.spent(), 0u);
  EXPECT_TRUE(s.freeze().queries.empty());
}

TEST(Session, BudgetCountsEveryCall) {
  QuerySession s(inst(), 5);
  s.query(0, 1);
  s.query(0, 1);                      // repeat
  s.query(0, inst().degree(0) + 1);   // ⊥
  s.query(0, 0);                      // slot 0 is out of range too
  EXPECT_EQ(s.spent(), 4u);
  s.query(1, 1);
  EXPECT_THROW(s.query(1, 2), BudgetExhausted);
  EXPECT_EQ(s.spent(), 5u);
  EXPECT_EQ(s.freeze().queries.size(), 5u);
}

TEST(Session, UnknownVertex) {
  QuerySession s(inst(), 10);
  EXPECT_THROW(s.query(static_cast<std::uint32_t>(inst().n), 1), UnknownVertex);
  EXPECT_THROW(s.is_dummy(static_cast<std::uint32_t>(inst().n)), UnknownVertex);
  EXPECT_EQ(s.spent(), 0u);
}

TEST(Session, NullExactlyPastDegree) {
  const Instance& g = inst();
  for (std::uint32_t v : {0u, 17u, static_cast<std::uint32_t>(g.n - 1), g.dummies_of_side[0][0]}) {
    QuerySession s(g, 3);
    const std::uint64_t deg = g.degree(v);
    EXPECT_NE(s.query(v, deg), kNull);
    EXPECT_EQ(s.query(v, deg + 1), kNull);
    EXPECT_EQ(s.query(v, deg + 1000), kNull);
  }
}

// Slots 1..deg(v) return each neighbor once, for every vertex.
TEST(Session, ListsArePermutationsOfNeighbourhoods) {
  const Instance& g = inst();
  for (std::uint32_t v = 0; v < g.n; ++v) {
    const std::uint64_t deg = g.degree(v);
    QuerySession s(g, deg);
    std::set<std::uint32_t> got;
    for (std::uint64_t i = 1; i <= deg; ++i) {
      const std::uint32_t a = s.query(v, i);
      ASSERT_NE(a, kNull);
      ASSERT_TRUE(g.adjacent(v, a));
      got.insert(a);
    }
    ASSERT_EQ(got.size(), deg) << "vertex " << v;
  }
}

TEST(Session, RepeatsAnswerIdentically) {
  QuerySession s(inst(), 2000);
  Rng rng(3);
  for (int k = 0; k < 500; ++k) {
    const auto v = static_cast<std::uint32_t>(rng.below(inst().n));
    const std::uint64_t i = 1 + rng.below(inst().degree(v) + 1);
    EXPECT_EQ(s.query(v, i), s.query(v, i));
  }
}

// Changing one vertex's permutation seed reorders that vertex's list only.
TEST(Session, PerVertexOrderingsIndependent) {
  Instance g = inst();
  const std::uint32_t target = 5;
  std::vector<std::vector<std::uint32_t>> before(20);
  {
    QuerySession s(g, 100000);
    for (std::uint32_t v = 0; v < 20; ++v)
      for (std::uint64_t i = 1; i <= g.degree(v); ++i) before[v].push_back(s.query(v, i));
  }
  g.perm_seeds[target] ^= 0xDEADBEEF;
  QuerySession s(g, 100000);
  for (std::uint32_t v = 0; v < 20; ++v) {
    std::vector<std::uint32_t> after;
    for (std::uint64_t i = 1; i <= g.degree(v); ++i) after.push_back(s.query(v, i));
    if (v == target) {
      EXPECT_NE(after, before[v]);
      std::sort(after.begin(), after.end());
      std::sort(before[v].begin(), before[v].end());
      EXPECT_EQ(after, before[v]);
    } else {
      EXPECT_EQ(after, before[v]);
    }
  }
}

TEST(Session, RevealsOnlySLabels) {
  const Instance& g = inst();
  QuerySession s(g, 10000);
  Rng rng(8);
  for (int k = 0; k < 3000; ++k) {
    const auto v = static_cast<std::uint32_t>(rng.below(g.n));
    s.query(v, 1 + rng.below(g.degree(v)));
  }
  ASSERT_FALSE(s.revealed().empty());
  for (auto [v, j] : s.revealed()) {
    EXPECT_EQ(g.label(g.L(), v).kind, Kind::S);
    EXPECT_EQ(g.label(g.L(), v).part, j);
  }
  // A queried non-S vertex stays hidden.
  for (std::uint32_t v = 0; v < g.n; ++v)
    if (!g.is_dummy(v) && g.label(1, v).kind == Kind::A) {
      QuerySession t(g, 1);
      t.query(v, g.degree(v) + 1);
      EXPECT_FALSE(t.s_label(v).has_value());
      break;
    }
}

TEST(Session, DummiesArePublic) {
  QuerySession s(inst(), 0);
  EXPECT_EQ(s.dummies().size(), inst().dummy_count);
  for (std::uint32_t d : s.dummies()) EXPECT_TRUE(s.is_dummy(d));
  EXPECT_EQ(s.params(), inst().params);
}

TEST(Transcript, FirstDiscoveryFixesDirection) {
  const Instance g = mmhard::testing::tiny_instance(2, 2, {{0, 0}, {0, 1}, {1, 1}}, 1);
  QuerySession s(g, 100);
  // Read vertex 2's list (right 0), then vertex 0's list: the 0–2 edge is owned by 2.
  for (std::uint64_t i = 1; i <= g.degree(2); ++i) s.query(2, i);
  for (std::uint64_t i = 1; i <= g.degree(0); ++i) s.query(0, i);
  const Transcript t = s.freeze();
  ASSERT_EQ(t.edges.size(), 2u);
  EXPECT_EQ(t.edges[0].from, 2u);
  EXPECT_EQ(t.edges[0].to, 0u);
  EXPECT_EQ(t.edges[1].from, 0u);
  EXPECT_EQ(t.edges[1].to, 3u);
  EXPECT_EQ(t.dummy_edges.size(), 2u);  // 2–dummy and 0–dummy
}

TEST(Transcript, CoreOnlyKeepsFreshCoreEdges) {
  const Instance& g = inst();
  QuerySession full(g, 5000, RecordMode::Full), core(g, 5000, RecordMode::CoreOnly);
  Rng rng(4);
  for (int k = 0; k < 5000; ++k) {
    const auto v = static_cast<std::uint32_t>(rng.below(g.n));
    const std::uint64_t i = 1 + rng.below(g.degree(v) + 1);
    full.query(v, i);
    core.query(v, i);
  }
  const Transcript tf = full.freeze(), tc = core.freeze();
  EXPECT_EQ(tf.edges, tc.edges);
  EXPECT_EQ(tc.queries.size(), tc.edges.size());
  EXPECT_TRUE(tc.dummy_edges.empty());
  EXPECT_EQ(tf.queries.size(), 5000u);
  for (const DirectedEdge& e : tf.edges) EXPECT_TRUE(g.adjacent(e.from, e.to));
}

TEST(Transcript, CsvRoundTrip) {
  QuerySession s(inst(), 300);
  Rng rng(12);
  for (int k = 0; k < 300; ++k) {
    const auto v = static_cast<std::uint32_t>(rng.below(inst().n));
    s.query(v, 1 + rng.below(inst().degree(v) + 3));
  }
  const Transcript t = s.freeze();
  const std::string text = transcript_csv(t);
  EXPECT_EQ(text.rfind("step,u,slot,answer_or_NULL\n", 0), 0u);
  EXPECT_NE(text.find("NULL"), std::string::npos);
  std::istringstream is(text);
  EXPECT_EQ(read_transcript_csv(is), t.queries);
}

TEST(Transcript, CsvFormatErrors) {
  for (const char* bad : {"step,u,slot\n1,2,3\n", "step,u,slot,answer_or_NULL\n1,2\n",
                          "step,u,slot,answer_or_NULL\n1,x,3,4\n", "step,u,slot,answer_or_NULL\n1,2,3,4,5\n"}) {
    std::istringstream is(bad);
    EXPECT_THROW(read_transcript_csv(is), TranscriptFormatError) << bad;
  }
}

TEST(Replay, ReproducesAnswers) {
  QuerySession s(inst(), 1000);
  Rng rng(13);
  for (int k = 0; k < 1000; ++k) {
    const auto v = static_cast<std::uint32_t>(rng.below(inst().n));
    s.query(v, 1 + rng.below(inst().degree(v) + 1));
  }
  const Transcript t = s.freeze();
  const ReplayResult r = replay(inst(), t.queries);
  EXPECT_EQ(r.mismatches, 0u);
  EXPECT_EQ(r.log, t.queries);
  EXPECT_EQ(r.transcript.edges, t.edges);
}

TEST(Replay, DetectsWrongInstance) {
  QuerySession s(inst(), 500);
  for (std::uint64_t i = 1; i <= 500; ++i) s.query(static_cast<std::uint32_t>(i % 50), 1 + i % 7);
  const Instance other = assemble(preset("small"), Side::No, 22);
  EXPECT_GT(replay(other, s.freeze().queries).mismatches, 0u);
}

TEST(RandomStrategy, Deterministic) {
  const Transcript a = random_query_transcript(inst(), 20000, 5);
  const Transcript b = random_query_transcript(inst(), 20000, 5);
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_EQ(a.spent, 20000u);
  EXPECT_GT(a.edges.size(), 0u);
  for (const DirectedEdge& e : a.edges) {
    EXPECT_FALSE(inst().is_dummy(e.from));
    EXPECT_FALSE(inst().is_dummy(e.to));
  }
}
