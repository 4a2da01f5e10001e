#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "wom/belief.hpp"
#include "wom/bundled.hpp"
#include "wom/error.hpp"

using namespace wom;

namespace {

constexpr double kTol = 1e-9;

std::vector<int> values_of(const InfoSchema& schema, const oracle::Trajectory& tr) {
  std::vector<int> out;
  for (const VariableId& v : schema) out.push_back(tr.values.at(v));
  return out;
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  EXPECT_EQ(a.size(), b.size());
  double worst = 0.0;
  for (size_t n = 0; n < std::min(a.size(), b.size()); ++n) worst = std::max(worst, std::abs(a[n] - b[n]));
  return worst;
}

// Every filtered belief and accessible probability against direct Bayes
// conditioning on the enumerated trajectories.
void expect_filter_matches_bayes(const Instance& inst, const ControlStrategy& g, const std::string& label) {
  const auto trs = oracle::trajectories(inst, g);
  for (int k = 0; k < inst.agents(); ++k) {
    const BeliefTrace trace = beliefs_under_strategy(inst, g, k);
    ASSERT_EQ(trace.states.size(), static_cast<size_t>(inst.horizon() + 1));
    for (int t = 0; t <= inst.horizon(); ++t) {
      double seen = 0.0;
      for (const auto& [a, pi] : trace.states[static_cast<size_t>(t)]) {
        double pa = 0.0;
        const auto bayes = oracle::bayes_posterior(inst, trs, k, t, a, &pa);
        ASSERT_FALSE(bayes.empty()) << label << " filter kept an impossible realization";
        EXPECT_LE(linf(pi.probs, bayes), kTol) << label << " k " << k << " t " << t;
        EXPECT_NEAR(trace.probs[static_cast<size_t>(t)].at(a), pa, kTol) << label;
        EXPECT_NEAR(std::accumulate(pi.probs.begin(), pi.probs.end(), 0.0), 1.0, kTol);
        seen += pa;
      }
      // Nothing with positive probability is missing.
      EXPECT_NEAR(seen, 1.0, kTol) << label << " k " << k << " t " << t;
    }
  }
}

}  // namespace

TEST(InformationState, InitialBeliefIsTheBayesPosterior) {
  const Instance inst = bundled::static3();
  const auto trs = oracle::trajectories(inst, zero_strategy(inst));
  for (int k = 0; k < 3; ++k) {
    const auto init = initial_information_state(inst, k);
    EXPECT_FALSE(init.empty());
    for (const auto& [a, pi] : init) {
      EXPECT_EQ(pi.support, inst.info.filter_state(0, k));
      EXPECT_EQ(pi.radices.front(), inst.system.state_size);
      EXPECT_LE(linf(pi.probs, oracle::bayes_posterior(inst, trs, k, 0, a)), kTol);
    }
  }
}

TEST(InformationState, EncodeDecodeRoundTrip) {
  const Instance inst = bundled::wom3();
  const InformationState pi = make_information_state(inst, 1, 1);
  for (size_t n = 0; n < pi.size(); ++n) EXPECT_EQ(encode_state(pi, decode_state(pi, n)), n);
}

TEST(Filter, MatchesBayesOnTheBundledExamples) {
  std::mt19937_64 rng(41);
  for (const std::string name : {"static3", "d2", "d2-t2", "wom3"}) {
    const Instance inst = bundled::by_name(name);
    expect_filter_matches_bayes(inst, zero_strategy(inst), name + " zero");
    for (int trial = 0; trial < 3; ++trial) expect_filter_matches_bayes(inst, oracle::random_strategy(inst, rng), name);
  }
}

TEST(FilterProperty, MatchesBayesOnRandomInstances) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const int K = 1 + trial % 3;
    const Instance inst = oracle::random_instance(rng, K, 2 + trial % 2, K == 3 ? 1 : 1 + trial % 2);
    expect_filter_matches_bayes(inst, oracle::random_strategy(inst, rng), "trial " + std::to_string(trial));
  }
}

TEST(EquivalentDynamics, ReproducesEveryTrajectory) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const int K = 1 + trial % 3;
    const Instance inst = oracle::random_instance(rng, K, 3, K == 3 ? 1 : 2);
    const ControlStrategy g = oracle::random_strategy(inst, rng);
    for (int k = 0; k < K; ++k) {
      const PrescriptionStrategy psi = control_law_to_strategy(inst, g, k);
      for (const oracle::Trajectory& tr : oracle::trajectories(inst, g)) {
        for (int t = 0; t <= inst.horizon(); ++t) {
          const EqState s{tr.x[static_cast<size_t>(t)], values_of(inst.info.filter_state(t, k), tr)};
          const CompletePrescription theta = psi.complete(inst, t, values_of(inst.info.accessible(t, k), tr));
          std::vector<int> u;
          for (int j = 0; j < K; ++j) u.push_back(tr.values.at(Uv(j, t)));
          ASSERT_EQ(prescribed_controls(inst, k, t, s, theta), u);
          ASSERT_DOUBLE_EQ(hat_cost(inst, k, t, s, theta), tr.stage_cost[static_cast<size_t>(t)]);
          if (t == inst.horizon()) break;
          const int w = tr.w[static_cast<size_t>(t)];
          const std::vector<int>& v = tr.v[static_cast<size_t>(t + 1)];
          const EqState next{tr.x[static_cast<size_t>(t + 1)], values_of(inst.info.filter_state(t + 1, k), tr)};
          ASSERT_EQ(hat_dynamics(inst, k, t, s, w, v, theta), next) << "trial " << trial;
          ASSERT_EQ(hat_observation(inst, k, t, s, w, v, theta), values_of(inst.info.new_info(t + 1, k), tr));
        }
      }
    }
  }
}

TEST(StageCost, PointMassGivesTheStateCost) {
  const Instance inst = bundled::d2(2);
  const PrescriptionStrategy psi = control_law_to_strategy(inst, zero_strategy(inst), 0);
  for (int t = 0; t <= 2; ++t) {
    InformationState pi = make_information_state(inst, 0, t);
    const CompletePrescription theta = psi.complete(inst, t, std::vector<int>(inst.info.accessible(t, 0).size(), 0));
    for (size_t n = 0; n < pi.size(); ++n) {
      std::fill(pi.probs.begin(), pi.probs.end(), 0.0);
      pi.probs[n] = 1.0;
      EXPECT_DOUBLE_EQ(expected_stage_cost(inst, pi, theta), hat_cost(inst, 0, t, decode_state(pi, n), theta));
    }
  }
}

TEST(StageCost, UniformBeliefAveragesTheCosts) {
  SystemSpec s;
  s.horizon = 0;
  s.state_size = 4;
  s.control_sizes = {2};
  s.observation_sizes = {1};
  s.noises = {PrimitiveSpec{}};
  s.initial_probs = {0.25, 0.25, 0.25, 0.25};
  s.observation = {{{{0}, {0}, {0}, {0}}}};
  s.cost = {{{0, 0}, {1, 1}, {2, 2}, {3, 3}}};
  const Instance inst = validate_instance(s, {1, {}});
  const auto init = initial_information_state(inst, 0);
  ASSERT_EQ(init.size(), 1u);
  const PrescriptionStrategy psi = control_law_to_strategy(inst, zero_strategy(inst), 0);
  EXPECT_DOUBLE_EQ(expected_stage_cost(inst, init.begin()->second, psi.complete(inst, 0, std::vector<int>{0})), 1.5);
}

TEST(Update, ImpossibleObservationIsRejected) {
  // Both agents observe the state exactly; a new observation contradicting
  // the belief support has probability zero.
  const Instance inst = bundled::d2(1);
  const PrescriptionStrategy psi = control_law_to_strategy(inst, zero_strategy(inst), 1);
  bool tried = false;
  for (const auto& [a, pi] : initial_information_state(inst, 1)) {
    const Domain a0(inst.info.accessible(0, 1), inst.card);
    const CompletePrescription theta = psi.complete(inst, 0, a0.decode(a));
    const auto outcomes = branch(inst, pi, theta);
    const Domain z(inst.info.new_info(1, 1), inst.card);
    for (size_t n = 0; n < z.size(); ++n) {
      if (outcomes.count(n)) continue;
      tried = true;
      try {
        update_information_state(inst, pi, theta, z.decode(n));
        FAIL();
      } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ImpossibleObservation);
      }
    }
  }
  EXPECT_TRUE(tried);
}

TEST(Update, BranchesSumToOne) {
  std::mt19937_64 rng(44);
  const Instance inst = bundled::wom3();
  const ControlStrategy g = oracle::random_strategy(inst, rng);
  for (int k = 0; k < 3; ++k) {
    const PrescriptionStrategy psi = control_law_to_strategy(inst, g, k);
    const Domain a0(inst.info.accessible(0, k), inst.card);
    for (const auto& [a, pi] : initial_information_state(inst, k)) {
      double total = 0.0;
      for (const auto& [zi, b] : branch(inst, pi, psi.complete(inst, 0, a0.decode(a)))) {
        EXPECT_GT(b.prob, 0.0);
        total += b.prob;
      }
      EXPECT_NEAR(total, 1.0, kTol);
    }
  }
}

TEST(FilterProperty, NextBeliefDependsOnlyOnBeliefPrescriptionAndObservation) {
  // Different strategies that reach the same (belief, prescription) pair and
  // see the same new information must produce the same Bayes posterior.
  std::mt19937_64 rng(45);
  const Instance inst = bundled::d2(2);
  const int k = 1, t = 1;
  std::map<std::vector<int64_t>, std::vector<double>> seen;
  int collisions = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const ControlStrategy g = oracle::random_strategy(inst, rng);
    const auto trs = oracle::trajectories(inst, g);
    const BeliefTrace trace = beliefs_under_strategy(inst, g, k);
    const PrescriptionStrategy psi = control_law_to_strategy(inst, g, k);
    const Domain at(inst.info.accessible(t, k), inst.card);
    const Domain an(inst.info.accessible(t + 1, k), inst.card);
    for (const auto& [a, pi] : trace.states[t]) {
      const CompletePrescription theta = psi.complete(inst, t, at.decode(a));
      std::vector<int64_t> key = belief_key(pi);
      for (const Prescription& p : theta.parts) key.insert(key.end(), p.table.begin(), p.table.end());
      for (const auto& [zi, b] : branch(inst, pi, theta)) {
        std::vector<int64_t> full = key;
        full.push_back(static_cast<int64_t>(zi));
        const auto post = oracle::bayes_posterior(inst, trs, k, t + 1, an.encode(extend_accessible(inst, k, t, at.decode(a), b.z)));
        auto [it, fresh] = seen.emplace(full, post);
        if (!fresh) {
          ++collisions;
          ASSERT_LE(linf(it->second, post), kTol);
        }
      }
    }
  }
  EXPECT_GT(collisions, 0);
}

TEST(Connection, TermIsTheConditionalOfTheExtraAccessibleVariables) {
  std::mt19937_64 rng(46);
  for (const std::string name : {"d2", "d2-t2", "wom3"}) {
    const Instance inst = bundled::by_name(name);
    const ControlStrategy g = oracle::random_strategy(inst, rng);
    const auto trs = oracle::trajectories(inst, g);
    for (int i = 1; i < inst.agents(); ++i) {
      const BeliefTrace trace = beliefs_under_strategy(inst, g, i);
      for (int k = 0; k < i; ++k)
        for (int t = 0; t <= inst.horizon(); ++t)
          for (const auto& [a, pi] : trace.states[static_cast<size_t>(t)]) {
            const ConnectionTerm lam = connection_term(inst, pi, k);
            const InfoSchema extra = schema_difference(inst.info.accessible(t, k), inst.info.accessible(t, i));
            ASSERT_EQ(lam.support, extra);
            std::vector<double> direct(lam.probs.size(), 0.0);
            double total = 0.0;
            for (const auto& tr : trs) {
              if (oracle::realization_index(inst, inst.info.accessible(t, i), tr) != a) continue;
              direct[oracle::realization_index(inst, extra, tr)] += tr.prob;
              total += tr.prob;
            }
            for (double& p : direct) p /= total;
            EXPECT_LE(linf(lam.probs, direct), kTol) << name;
          }
    }
  }
}

TEST(Connection, StarExampleDiffersByTheHubsLatestControlAndObservation) {
  const Instance inst = bundled::wom3(2);
  for (int t = 1; t <= 2; ++t)
    EXPECT_EQ(schema_difference(inst.info.equivalent_state(t, 1), inst.info.equivalent_state(t, 0)),
              make_schema({Uv(0, t - 1), Yv(0, t)}));
}

TEST(Factorization, HoldsAndDetectsACorruptedTerm) {
  std::mt19937_64 rng(47);
  for (const std::string name : {"d2", "d2-t2", "wom3", "wom3-t2"}) {
    const Instance inst = bundled::by_name(name);
    const ControlStrategy g = oracle::random_strategy(inst, rng);
    std::vector<BeliefTrace> traces;
    for (int k = 0; k < inst.agents(); ++k) traces.push_back(beliefs_under_strategy(inst, g, k));
    int corrupted_cases = 0;
    for (int i = 1; i < inst.agents(); ++i)
      for (int k = 0; k < i; ++k)
        for (int t = 0; t <= std::min(inst.horizon(), 2); ++t) {
          const Domain ai(inst.info.accessible(t, i), inst.card);
          for (const auto& [a, pi] : traces[static_cast<size_t>(i)].states[static_cast<size_t>(t)]) {
            const ConnectionTerm lam = connection_term(inst, pi, k);
            const auto& lower = traces[static_cast<size_t>(k)].states[static_cast<size_t>(t)];
            EXPECT_LE(factorization_check(inst, pi, ai.decode(a), lam, lower), kTol) << name << " t " << t;

            // Perturb the smallest positive entry by +0.1 and renormalize.
            size_t target = lam.probs.size(), positive = 0;
            for (size_t n = 0; n < lam.probs.size(); ++n)
              if (lam.probs[n] > 0.0) {
                ++positive;
                if (target == lam.probs.size() || lam.probs[n] < lam.probs[target]) target = n;
              }
            if (positive < 2) continue;
            ConnectionTerm bad = lam;
            bad.probs[target] += 0.1;
            for (double& p : bad.probs) p /= 1.1;
            EXPECT_GE(factorization_check(inst, pi, ai.decode(a), bad, lower), 0.01) << name << " t " << t;
            ++corrupted_cases;
          }
        }
    EXPECT_GT(corrupted_cases, 0) << name;
  }
}

TEST(Conditioning, LowerAgentBeliefFromAHigherOne) {
  std::mt19937_64 rng(48);
  const Instance inst = bundled::wom3();
  const ControlStrategy g = oracle::random_strategy(inst, rng);
  const BeliefTrace hi = beliefs_under_strategy(inst, g, 2);
  const BeliefTrace lo = beliefs_under_strategy(inst, g, 0);
  int checked = 0, rejected = 0;
  for (int t = 0; t <= 1; ++t) {
    const Domain a2(inst.info.accessible(t, 2), inst.card);
    const Domain a0(inst.info.accessible(t, 0), inst.card);
    const InfoSchema extra = schema_difference(inst.info.accessible(t, 0), inst.info.accessible(t, 2));
    const Domain ed(extra, inst.card);
    const auto p2 = positions_in(inst.info.accessible(t, 2), inst.info.accessible(t, 0));
    const auto pe = positions_in(extra, inst.info.accessible(t, 0));
    for (const auto& [a, pi] : hi.states[static_cast<size_t>(t)])
      for (size_t e = 0; e < ed.size(); ++e) {
        std::vector<int> full(inst.info.accessible(t, 0).size());
        const auto av = a2.decode(a), ev = ed.decode(e);
        for (size_t n = 0; n < p2.size(); ++n) full[static_cast<size_t>(p2[n])] = av[n];
        for (size_t n = 0; n < pe.size(); ++n) full[static_cast<size_t>(pe[n])] = ev[n];
        const auto it = lo.states[static_cast<size_t>(t)].find(a0.encode(full));
        if (it == lo.states[static_cast<size_t>(t)].end()) {
          try {
            condition_to_lower(inst, pi, 0, ev);
            ADD_FAILURE() << "expected a zero-probability condition";
          } catch (const Error& err) {
            EXPECT_EQ(err.kind(), ErrorKind::ZeroProbabilityCondition);
            ++rejected;
          }
          continue;
        }
        EXPECT_LE(linf(condition_to_lower(inst, pi, 0, ev).probs, it->second.probs), kTol);
        ++checked;
      }
  }
  EXPECT_GT(checked, 0);
  EXPECT_GT(rejected, 0);
}
