#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "wom/bundled.hpp"
#include "wom/error.hpp"
#include "wom/solver.hpp"

using namespace wom;

namespace {

constexpr double kTol = 1e-9;

void expect_all_agree(const Instance& inst, const std::string& label) {
  const SolveResult brute = solve_brute_force(inst);
  EXPECT_NEAR(brute.optimal_cost, oracle::exact_cost(inst, brute.strategy), kTol) << label;
  EXPECT_NEAR(solve_common_info_dp(inst).optimal_cost, brute.optimal_cost, kTol) << label;
  for (int k = 0; k < inst.agents(); ++k) {
    const SolveResult r = solve_prescription(inst, k);
    EXPECT_NEAR(r.optimal_cost, brute.optimal_cost, kTol) << label << " agent " << k;
    EXPECT_NEAR(oracle::exact_cost(inst, r.strategy), r.optimal_cost, kTol) << label;
    EXPECT_NEAR(r.search_value, r.optimal_cost, kTol) << label;
  }
}

}  // namespace

TEST(Solvers, AgreeOnTheStaticExample) {
  expect_all_agree(bundled::static3(), "static3");
  EXPECT_NEAR(solve_brute_force(bundled::static3()).optimal_cost, 0.6, kTol);
}

TEST(Solvers, AgreeOnTheTwoAgentExample) {
  expect_all_agree(bundled::d2(1), "d2");
  expect_all_agree(bundled::d2(2), "d2-t2");
  EXPECT_NEAR(solve_brute_force(bundled::d2(1)).optimal_cost, 1.74, kTol);
}

TEST(Solvers, ReversedLabelsGiveTheSameValue) {
  const Instance inst = bundled::static3_reindexed();
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(solve_prescription(inst, k).optimal_cost, 0.6, kTol);
}

TEST(Solvers, SingleAgentToy) {
  SystemSpec s;
  s.horizon = 1;
  s.state_size = 2;
  s.control_sizes = {2};
  s.observation_sizes = {2};
  s.disturbance = {2, {{0.7, 0.3}}};
  s.noises = {{2, {{0.9, 0.1}}}};
  s.initial_probs = {0.5, 0.5};
  // Noisy reading of the state; matching it is free, missing it costs 1.
  s.observation = {{{{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}}};
  s.transition = {{{{0, 1}, {1, 0}}, {{1, 0}, {0, 1}}}};
  s.cost = {{{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}};
  const Instance inst = validate_instance(s, {1, {}});
  expect_all_agree(inst, "toy");
}

TEST(Solvers, ZeroCostGivesZero) {
  Instance inst = bundled::d2(2);
  SystemSpec s = inst.system;
  for (auto& ct : s.cost)
    for (auto& cx : ct) std::fill(cx.begin(), cx.end(), 0.0);
  inst = validate_instance(s, inst.network);
  EXPECT_EQ(solve_brute_force(inst).optimal_cost, 0.0);
  EXPECT_EQ(solve_common_info_dp(inst).optimal_cost, 0.0);
  EXPECT_EQ(solve_prescription(inst, 0).optimal_cost, 0.0);
}

TEST(Solvers, LastAgentMatchesCommonInformation) {
  for (const std::string name : {"d2", "d2-t2", "static3"}) {
    const Instance inst = bundled::by_name(name);
    EXPECT_NEAR(solve_prescription(inst, inst.agents() - 1).optimal_cost, solve_common_info_dp(inst).optimal_cost, kTol) << name;
  }
}

TEST(Solvers, CapIsEnforced) {
  try {
    solve_brute_force(bundled::d2(1), {10});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CapExceeded);
  }
  EXPECT_THROW(solve_prescription(bundled::d2(2), 0, {1}), Error);
}

TEST(Solvers, SearchSizesGrowWithTheAgentIndex) {
  for (const std::string name : {"static3", "d2", "d2-t2"}) {
    const Instance inst = bundled::by_name(name);
    const BigInt brute = solve_brute_force(inst).search_size;
    BigInt prev = 0;
    for (int k = 0; k < inst.agents(); ++k) {
      const BigInt n = solve_prescription(inst, k).search_size;
      EXPECT_LE(prev, n) << name;
      prev = n;
    }
    EXPECT_LE(prev, brute) << name;
  }
  EXPECT_EQ(solve_prescription(bundled::d2(1), 0).search_size, 528);
  EXPECT_EQ(solve_prescription(bundled::d2(1), 1).search_size, 1040);
}

TEST(Solvers, Deterministic) {
  const Instance inst = bundled::d2(2);
  for (int k = 0; k < 2; ++k) {
    const SolveResult a = solve_prescription(inst, k), b = solve_prescription(inst, k);
    EXPECT_EQ(a.strategy.tables, b.strategy.tables);
    EXPECT_EQ(a.optimal_cost, b.optimal_cost);
  }
  EXPECT_EQ(solve_brute_force(inst).strategy.tables, solve_brute_force(inst).strategy.tables);
}

TEST(Solvers, EmittedPrescriptionStrategyEvaluatesToTheOptimum) {
  for (const std::string name : {"static3", "d2", "d2-t2"}) {
    const Instance inst = bundled::by_name(name);
    for (int k = 0; k < inst.agents(); ++k) {
      const SolveResult r = solve_prescription(inst, k);
      ASSERT_TRUE(r.prescription.has_value());
      EXPECT_NEAR(evaluate_prescription_strategy(inst, *r.prescription).expected_cost, r.optimal_cost, kTol) << name;
      EXPECT_EQ(strategy_to_control(inst, *r.prescription).tables, r.strategy.tables);
    }
  }
}

TEST(Solvers, PrescriptionsDependOnlyOnTheBeliefTuple) {
  for (const std::string name : {"d2", "d2-t2"}) {
    const Instance inst = bundled::by_name(name);
    for (int k = 0; k < inst.agents(); ++k) {
      const SolveResult r = solve_prescription_dp(inst, k);
      ASSERT_TRUE(r.prescription.has_value());
      ASSERT_EQ(r.tuple_keys.size(), static_cast<size_t>(inst.horizon() + 1));
      int shared = 0;
      for (size_t t = 0; t < r.tuple_keys.size(); ++t)
        for (size_t j = 0; j < r.tuple_keys[t].size(); ++j) {
          std::map<std::vector<int64_t>, size_t> first;
          for (const auto& [c, key] : r.tuple_keys[t][j]) {
            auto [it, fresh] = first.emplace(key, c);
            if (fresh) continue;
            ++shared;
            const auto& tables = r.prescription->laws[t][j].tables;
            EXPECT_EQ(tables[c], tables[it->second]) << name << " t " << t << " target " << j;
          }
        }
      (void)shared;
    }
  }
}

TEST(Solvers, StaticDecompositionReportsTheSeparableBound) {
  const Instance inst = bundled::static3();
  for (int k = 0; k < 3; ++k) {
    const SolveResult r = solve_prescription_static(inst, k);
    ASSERT_TRUE(r.separable_value.has_value());
    EXPECT_LE(*r.separable_value, r.optimal_cost + kTol);
    if (!r.tail_conflict) EXPECT_NEAR(*r.separable_value, r.optimal_cost, kTol);
  }
}

TEST(Compare, AllRowsAgree) {
  const Comparison c = compare_agents(bundled::d2(1));
  EXPECT_TRUE(c.consistent);
  EXPECT_LE(c.max_gap, kTol);
  EXPECT_EQ(c.rows.size(), 4u);
  for (const auto& row : c.rows) EXPECT_TRUE(row.ok) << row.method;
}

TEST(Compare, CappedRowsAreReportedNotFatal) {
  const Comparison c = compare_agents(bundled::d2(2), {5000});
  bool capped = false;
  for (const auto& row : c.rows)
    if (!row.ok) {
      capped = true;
      EXPECT_NE(row.error.find("cap"), std::string::npos) << row.error;
    }
  EXPECT_TRUE(capped);
  EXPECT_TRUE(c.consistent);
}

TEST(SolverProperty, RandomSmallInstancesAgree) {
  std::mt19937_64 rng(51);
  int accepted = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const int K = 1 + trial % 2;
    const int T = K == 1 ? trial % 3 : trial % 2;
    const Instance inst = oracle::random_instance(rng, K, 2, T);
    try {
      const SolveResult brute = solve_brute_force(inst, {1u << 20});
      EXPECT_NEAR(solve_common_info_dp(inst).optimal_cost, brute.optimal_cost, kTol) << "trial " << trial;
      for (int k = 0; k < K; ++k)
        EXPECT_NEAR(solve_prescription(inst, k).optimal_cost, brute.optimal_cost, kTol) << "trial " << trial << " agent " << k;
      ++accepted;
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::CapExceeded) << e.what();
    }
  }
  EXPECT_GE(accepted, 12);
}
