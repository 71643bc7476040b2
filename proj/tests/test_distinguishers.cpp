#include <gtest/gtest.h>

#include "mmhard/mmhard.hpp"
#include "tiny.hpp"

using namespace mmhard;

namespace {

const ParamSet& small() {
  static const ParamSet p = preset("small");
  return p;
}

}  // namespace

TEST(FullScan, DecidesCorrectlyWithFullBudget) {
  for (Side side : {Side::Yes, Side::No}) {
    const Instance inst = assemble(small(), side, 4);
    QuerySession s(inst, kUnlimited);
    const Guess g = run_full_scan(s);
    EXPECT_EQ(g.verdict, side == Side::Yes ? Verdict::Yes : Verdict::No);
    EXPECT_EQ(g.queries_used, full_read_cost(inst));
    EXPECT_EQ(g.queries_used, s.spent());
    EXPECT_EQ(static_cast<std::uint64_t>(g.evidence.at("mu")), max_matching(inst).size);
  }
}

TEST(FullScan, ExactBudgetSufficesOneLessAbstains) {
  const Instance inst = assemble(small(), Side::No, 4);
  const std::uint64_t cost = full_read_cost(inst);
  QuerySession exact(inst, cost);
  EXPECT_EQ(run_full_scan(exact).verdict, Verdict::No);
  QuerySession short_by_one(inst, cost - 1);
  const Guess g = run_full_scan(short_by_one);
  EXPECT_EQ(g.verdict, Verdict::Abstain);
  EXPECT_EQ(g.queries_used, cost - 1);
}

TEST(FullScan, ReadCostIsSumOfDegreesPlusN) {
  const Instance inst = assemble(small(), Side::Yes, 1);
  // 2·(core edges + dummy–core edges + dummy matching) + n.
  const std::uint64_t t = inst.dummy_count;
  const std::uint64_t expect = 2 * (inst.core_edge_count() + t / 2 * inst.n_core + t / 2) + inst.n;
  EXPECT_EQ(full_read_cost(inst), expect);
  EXPECT_EQ(full_read_cost(inst), 14424u);
}

TEST(SampledGreedy, ZeroSamplesSaysNo) {
  const Instance inst = assemble(small(), Side::Yes, 1);
  QuerySession s(inst, 1000);
  Rng rng(1);
  const Guess g = run_sampled_greedy(s, 0, 10, rng);
  EXPECT_EQ(g.verdict, Verdict::No);
  EXPECT_EQ(g.queries_used, 0u);
  EXPECT_EQ(s.spent(), 0u);
}

TEST(SampledGreedy, EmptyCoreEstimatesDummiesOnly) {
  const Instance inst = assemble(small(), Side::Yes, 1, {.empty_core = true});
  QuerySession s(inst, 100000);
  Rng rng(1);
  const Guess g = run_sampled_greedy(s, 50, 400, rng);
  EXPECT_DOUBLE_EQ(g.evidence.at("matched_fraction"), 0.0);
  EXPECT_DOUBLE_EQ(g.estimate, 6.0 / 516.0);
  EXPECT_EQ(g.verdict, Verdict::No);
}

TEST(SampledGreedy, RespectsBudget) {
  const Instance inst = assemble(small(), Side::Yes, 1);
  QuerySession s(inst, 77);
  Rng rng(2);
  const Guess g = run_sampled_greedy(s, 1000, 1000, rng);
  EXPECT_EQ(g.queries_used, 77u);
  EXPECT_NE(g.verdict, Verdict::Abstain);
}

TEST(SampledGreedy, ThresholdMidGap) {
  const Instance inst = assemble(small(), Side::Yes, 1);
  QuerySession s(inst, 0);
  EXPECT_DOUBLE_EQ(greedy_threshold(s), (258.0 - 12.0) / 516.0);
}

TEST(BlockTest, SameVertexAndDummies) {
  const Instance inst = assemble(small(), Side::Yes, 1);
  QuerySession s(inst, 100);
  EXPECT_EQ(run_block_birthday_test(s, 3, 3, 10), BlockTest::SameBlockLikely);
  EXPECT_EQ(run_block_birthday_test(s, 3, inst.dummies_of_side[0][0], 10), BlockTest::Different);
  EXPECT_EQ(s.spent(), 0u);
}

TEST(BlockTest, ComponentsOnTinyGraphs) {
  // Two disjoint paths: {0,1 | 4,5} and {2,3 | 6,7}.
  const Instance g = mmhard::testing::tiny_instance(4, 4, {{0, 0}, {1, 0}, {1, 1}, {2, 2}, {3, 2}, {3, 3}}, 0);
  QuerySession s(g, 1000);
  EXPECT_EQ(run_block_birthday_test(s, 0, 5, 1000), BlockTest::SameBlockLikely);
  EXPECT_EQ(run_block_birthday_test(s, 0, 2, 1000), BlockTest::Different);
  QuerySession tight(g, 1000);
  EXPECT_EQ(run_block_birthday_test(tight, 0, 2, 2), BlockTest::Inconclusive);
  EXPECT_LE(tight.spent(), 2u);
}

TEST(BlockTest, WalkBudgetBoundsSpend) {
  const Instance inst = assemble(small(), Side::No, 2);
  QuerySession s(inst, 1000000);
  ListReader reader(s);
  Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    const std::uint64_t before = s.spent();
    run_block_birthday_test(reader, inst.core_of_side[0][rng.below(10)], inst.core_of_side[1][rng.below(10)], 50);
    EXPECT_LE(s.spent() - before, 50u);
  }
}

TEST(Chaser, ZeroStartsAbstains) {
  const Instance inst = assemble(small(), Side::Yes, 1);
  QuerySession s(inst, 1000);
  Rng rng(1);
  const Guess g = run_special_edge_chaser(s, 0, rng);
  EXPECT_EQ(g.verdict, Verdict::Abstain);
  EXPECT_EQ(s.spent(), 0u);
}

TEST(Chaser, StaysWithinBudget) {
  const Instance inst = assemble(small(), Side::No, 1);
  QuerySession s(inst, 500);
  Rng rng(1);
  const Guess g = run_special_edge_chaser(s, 8, rng);
  EXPECT_LE(g.queries_used, 500u);
  EXPECT_EQ(g.queries_used, s.spent());
}

TEST(Game, Deterministic) {
  AlgorithmConfig cfg;
  cfg.algorithm = Algorithm::SampledGreedy;
  const GameResult a = play_game(cfg, small(), 2000, 30, 99);
  const GameResult b = play_game(cfg, small(), 2000, 30, 99, 3);
  EXPECT_EQ(a, b);
  for (std::size_t k = 0; k < a.outcomes.size(); ++k) {
    EXPECT_EQ(a.outcomes[k].side, b.outcomes[k].side);
    EXPECT_EQ(a.outcomes[k].verdict, b.outcomes[k].verdict);
  }
}

TEST(Game, BudgetZeroIsCoinFlip) {
  AlgorithmConfig cfg;
  const GameResult r = play_game(cfg, small(), 0, 1000, 1);
  EXPECT_EQ(r.abstentions, 1000u);
  EXPECT_EQ(r.mean_queries, 0.0);
  EXPECT_GE(r.success_rate, 0.45);
  EXPECT_LE(r.success_rate, 0.55);
  EXPECT_LE(r.success_count, r.trials);
}

// The side coin is fair: chi-square on the recorded sides.
TEST(Game, SideCoinBalanced) {
  AlgorithmConfig cfg;
  const GameResult r = play_game(cfg, small(), 0, 2000, 17);
  const ChiSquare c = chi_square_uniform({r.yes_trials, r.trials - r.yes_trials});
  EXPECT_GT(c.p_value, 0.01);
}

TEST(Game, FullBudgetAlwaysRight) {
  AlgorithmConfig cfg;
  const GameResult r = play_game(cfg, small(), kUnlimited, 10, 5);
  EXPECT_EQ(r.success_count, 10u);
  EXPECT_EQ(r.abstentions, 0u);
  for (const TrialOutcome& o : r.outcomes) EXPECT_EQ(o.queries_used, 14424u);
}

TEST(Game, SweepMonotone) {
  AlgorithmConfig cfg;
  std::vector<double> rates;
  for (std::uint64_t b : {0u, 3606u, 14424u}) rates.push_back(play_game(cfg, small(), b, 100, 8).success_rate);
  EXPECT_LE(rates[0], rates[1]);
  EXPECT_LE(rates[1], rates[2]);
  EXPECT_EQ(rates[2], 1.0);
}

TEST(Game, QueriesUsedWithinBudget) {
  for (Algorithm a : {Algorithm::FullScan, Algorithm::SampledGreedy, Algorithm::SpecialEdgeChaser}) {
    AlgorithmConfig cfg;
    cfg.algorithm = a;
    const GameResult r = play_game(cfg, small(), 1500, 6, 3);
    for (const TrialOutcome& o : r.outcomes) EXPECT_LE(o.queries_used, 1500u) << to_string(a);
  }
}

TEST(Game, ZeroTrialsRejected) {
  EXPECT_THROW(play_game(AlgorithmConfig{}, small(), 0, 0, 1), std::invalid_argument);
}

TEST(Wilson, KnownInterval) {
  // 50/100 at 95%: 0.5 ± 0.0957.
  const auto [lo, hi] = wilson_interval(50, 100);
  EXPECT_NEAR(lo, 0.4038, 1e-4);
  EXPECT_NEAR(hi, 0.5962, 1e-4);
  const auto [z0, z1] = wilson_interval(0, 0);
  EXPECT_EQ(z0, 0.0);
  EXPECT_EQ(z1, 1.0);
}

TEST(Algorithms, ParseNames) {
  for (Algorithm a : {Algorithm::FullScan, Algorithm::SampledGreedy, Algorithm::SpecialEdgeChaser})
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_FALSE(parse_algorithm("oracle").has_value());
}

TEST(Csv, GameRowMatchesHeader) {
  const GameResult r = play_game(AlgorithmConfig{}, small(), 0, 5, 1);
  const std::string h = game_csv_header(), row = game_csv_row(r);
  EXPECT_EQ(std::count(h.begin(), h.end(), ','), std::count(row.begin(), row.end(), ','));
}
