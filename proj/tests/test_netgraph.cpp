#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "wom/error.hpp"
#include "wom/netgraph.hpp"

using namespace wom;

namespace {

NetworkSpec star() { return {3, {{0, 1, 1}, {1, 0, 1}, {0, 2, 1}, {2, 0, 1}}}; }

ErrorKind kind_of(const NetworkSpec& spec) {
  try {
    validate_network(spec);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a validation error";
  return ErrorKind::Parse;
}

NetworkSpec random_connected(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> delay(1, 4);
  NetworkSpec net{n, {}};
  for (int a = 0; a < n && n > 1; ++a) net.links.push_back({a, (a + 1) % n, delay(rng)});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && b != (a + 1) % n && std::bernoulli_distribution(0.35)(rng)) net.links.push_back({a, b, delay(rng)});
  return net;
}

}  // namespace

TEST(Network, StarIsValidAndDelaysMatchTheWorkedExample) {
  const DelayMatrix d = compute_delay_matrix(validate_network(star()));
  EXPECT_EQ(d, DelayMatrix(3, {0, 1, 1, 1, 0, 2, 1, 2, 0}));
}

TEST(Network, SingleAgentNeedsNoLinks) {
  const DelayMatrix d = compute_delay_matrix(validate_network({1, {}}));
  EXPECT_EQ(d.size(), 1);
  EXPECT_EQ(d(0, 0), 0);
}

TEST(Network, MissingReversePathNamesThePair) {
  try {
    validate_network({2, {{0, 1, 1}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotStronglyConnected);
    EXPECT_NE(std::string(e.what()).find("(2,1)"), std::string::npos) << e.what();
  }
}

TEST(Network, RejectsMalformedLinks) {
  EXPECT_EQ(kind_of({2, {{0, 1, 0}, {1, 0, 1}}}), ErrorKind::NonPositiveDelay);
  EXPECT_EQ(kind_of({2, {{0, 1, 1}, {0, 1, 2}, {1, 0, 1}}}), ErrorKind::DuplicateLink);
  EXPECT_EQ(kind_of({2, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}}}), ErrorKind::ExplicitSelfLoop);
  EXPECT_EQ(kind_of({2, {{0, 2, 1}, {1, 0, 1}}}), ErrorKind::InvalidAgent);
}

TEST(Network, PathThroughTheHub) {
  const InfoPath p = information_path(star(), 1, 2);
  EXPECT_EQ(p.agents, (std::vector<int>{1, 0, 2}));
  EXPECT_EQ(p.total_delay, 2);
}

TEST(Network, SelfPathIsTrivial) {
  for (int k = 0; k < 3; ++k) {
    const InfoPath p = information_path(star(), k, k);
    EXPECT_EQ(p.agents, std::vector<int>{k});
    EXPECT_EQ(p.total_delay, 0);
  }
}

TEST(Network, EqualDelayPathsResolveToSmallestSequence) {
  NetworkSpec net{4, {{0, 1, 1}, {1, 3, 1}, {0, 2, 1}, {2, 3, 1}, {3, 0, 1}}};
  validate_network(net);
  const InfoPath p = information_path(net, 0, 3);
  EXPECT_EQ(p.agents, (std::vector<int>{0, 1, 3}));
  EXPECT_EQ(p.total_delay, 2);
  // Listing order of links must not matter.
  std::reverse(net.links.begin(), net.links.end());
  EXPECT_EQ(information_path(net, 0, 3).agents, (std::vector<int>{0, 1, 3}));
}

TEST(Network, DirectedRingMatchesPathEnumeration) {
  const NetworkSpec ring{4, {{0, 1, 1}, {1, 2, 2}, {2, 3, 3}, {3, 0, 4}}};
  const DelayMatrix d = compute_delay_matrix(validate_network(ring));
  const auto oracle = oracle::delays_by_paths(ring);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_EQ(d(a, b), oracle[static_cast<size_t>(a)][static_cast<size_t>(b)]);
  EXPECT_EQ(d(1, 0), 9);
}

TEST(NetworkProperty, RandomGraphsAgreeWithPathEnumeration) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    const NetworkSpec net = random_connected(rng, n);
    const DelayMatrix d = compute_delay_matrix(validate_network(net));
    const auto oracle = oracle::delays_by_paths(net);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        ASSERT_EQ(d(a, b), oracle[static_cast<size_t>(a)][static_cast<size_t>(b)]) << "trial " << trial;
        if (a == b)
          EXPECT_EQ(d(a, b), 0);
        else
          EXPECT_GE(d(a, b), 1);
      }
  }
}

TEST(NetworkProperty, TriangleInequalityAndPathConsistency) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 5;
    const NetworkSpec net = random_connected(rng, n);
    const DelayMatrix d = compute_delay_matrix(validate_network(net));
    for (int a = 0; a < n; ++a)
      for (int m = 0; m < n; ++m)
        for (int b = 0; b < n; ++b) EXPECT_LE(d(a, b), d(a, m) + d(m, b));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const InfoPath p = information_path(net, a, b);
        ASSERT_EQ(p.agents.front(), a);
        ASSERT_EQ(p.agents.back(), b);
        int sum = 0;
        for (size_t s = 0; s + 1 < p.agents.size(); ++s) {
          auto it = std::find_if(net.links.begin(), net.links.end(),
                                 [&](const Link& l) { return l.from == p.agents[s] && l.to == p.agents[s + 1]; });
          ASSERT_NE(it, net.links.end());
          sum += it->delay;
        }
        EXPECT_EQ(sum, p.total_delay);
        EXPECT_EQ(p.total_delay, d(a, b));
        // Smallest sequence among all minimum-delay simple paths.
        std::vector<int> best;
        for (const auto& [path, delay] : oracle::simple_paths(net, a, b))
          if (delay == d(a, b) && (best.empty() || path < best)) best = path;
        EXPECT_EQ(p.agents, best);
      }
  }
}
