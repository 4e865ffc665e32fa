#include <gtest/gtest.h>

#include <random>

#include "popproto/scc.hpp"
#include "support.hpp"

using namespace popproto;

TEST(Scc, SingleNode) {
  Digraph g(1);
  EXPECT_EQ(bottom_sccs(g), (std::vector<std::vector<std::uint32_t>>{{0}}));
}

TEST(Scc, ChainIntoCycle) {
  Digraph g{{1}, {2}, {3}, {2}, {0}};
  EXPECT_EQ(bottom_sccs(g), (std::vector<std::vector<std::uint32_t>>{{2, 3}}));
  auto all = strongly_connected_components(g);
  EXPECT_EQ(all.size(), 4u);
}

TEST(Scc, DeepPathDoesNotRecurse) {
  const std::uint32_t n = 200000;
  Digraph g(n);
  for (std::uint32_t v = 0; v + 1 < n; ++v) g[v].push_back(v + 1);
  auto b = bottom_sccs(g);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0], std::vector<std::uint32_t>{n - 1});
}

TEST(Scc, MatchesNaiveClosure) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<std::uint32_t> size(0, 60);
  for (int i = 0; i < 500; ++i) {
    auto g = oracle::random_digraph(rng, size(rng));
    EXPECT_EQ(bottom_sccs(g), oracle::naive_bottom_sccs(g));
  }
}
