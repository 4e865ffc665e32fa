#include <gtest/gtest.h>

#include <random>

#include "popproto/protolib.hpp"
#include "popproto/verifier.hpp"
#include "support.hpp"

using namespace popproto;

namespace {

const Protocol& threshold() { return builtin("threshold3").protocol(); }
const Protocol& parity() { return builtin("parity").protocol(); }
const Spec& threshold_pred() { return std::get<Spec>(builtin("spec:threshold3").spec()); }
const AnySpec& parity_spec() { return builtin("spec:parity").spec(); }

std::vector<std::uint32_t> counts(const Protocol& p, std::initializer_list<std::pair<const char*, std::uint32_t>> xs) {
  std::vector<std::uint32_t> c(p.num_states(), 0);
  for (const auto& [s, k] : xs) c[p.state(s)] = k;
  return c;
}

std::size_t non_silent_edges(const ReachGraph& g) {
  std::size_t n = 0;
  for (std::uint32_t v = 0; v < g.size(); ++v)
    for (const auto& e : g.edges(v)) n += e.target != v;
  return n;
}

VerifyOptions upto(std::uint32_t n, std::uint32_t r = 0) {
  VerifyOptions o;
  o.max_population = n;
  o.max_requests = r;
  return o;
}

}  // namespace

TEST(Graph, ThresholdTwoAgents) {
  auto g = build_graph(threshold(), {2, 0});
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.project(0).counts(), counts(threshold(), {{"q1", 2}}));
  EXPECT_EQ(g.project(1).counts(), counts(threshold(), {{"q0", 1}, {"q2", 1}}));
  EXPECT_EQ(non_silent_edges(g), 1u);
  auto b = g.bottom_sccs();
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0], std::vector<std::uint32_t>{1});
}

TEST(Graph, ThresholdThreeAgentsHasUniqueDeadlock) {
  auto g = build_graph(threshold(), {3, 0});
  auto b = g.bottom_sccs();
  ASSERT_EQ(b.size(), 1u);
  ASSERT_EQ(b[0].size(), 1u);
  EXPECT_EQ(g.project(b[0][0]).counts(), counts(threshold(), {{"q3", 3}}));
  EXPECT_TRUE(g.edges(b[0][0]).empty());
}

TEST(Graph, SingleAgentSingleNode) {
  for (const auto& key : builtin_protocol_keys()) {
    auto g = build_graph(builtin(key).protocol(), {1, 0});
    EXPECT_EQ(g.size(), builtin(key).protocol().inputs().size() - (builtin(key).protocol().has_shutdown() ? 1 : 0));
    EXPECT_EQ(g.edge_count(), 0u) << key;
  }
}

TEST(Graph, NodeCapRaisesExplosion) {
  try {
    build_graph(parity(), {5, 2, true, 10});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Explosion);
  }
  VerifyOptions o = upto(5, 2);
  o.node_cap = 10;
  EXPECT_THROW(check_implements_spec_with_shutdown(parity(), parity_spec(), o), Error);
}

TEST(Graph, BottomSccsMatchNaiveOracle) {
  for (const auto& key : builtin_protocol_keys()) {
    const auto& p = builtin(key).protocol();
    for (std::uint32_t n = 1; n <= 4; ++n) {
      auto g = build_graph(p, {n, p.has_shutdown() ? 2u : 0u});
      EXPECT_EQ(g.bottom_sccs(), oracle::naive_bottom_sccs(g.adjacency())) << key << " n=" << n;
    }
  }
}

TEST(Graph, DotExport) {
  auto dot = to_dot(build_graph(threshold(), {3, 0}));
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("doublecircle"), std::string::npos);
  EXPECT_NE(dot.find("PROTOCOL"), std::string::npos);
}

TEST(Predicate, ThresholdUpToSix) {
  auto r = check_computes_predicate(threshold(), threshold_pred(), upto(6));
  EXPECT_TRUE(r.passed());
  ASSERT_EQ(r.cases.size(), 6u);
  EXPECT_EQ(r.cases[0].verdict, Verdict::Pass);
}

TEST(Predicate, MutantFailsWithReplayableTrace) {
  auto mutant = oracle::without_transition(threshold(), "q2", "q2", "q1", "q3");
  VerifyOptions o = upto(4);
  o.min_population = 4;
  auto r = check_computes_predicate(mutant, threshold_pred(), o);
  ASSERT_FALSE(r.passed());
  const auto* f = r.first_failure();
  ASSERT_TRUE(f->counterexample);
  EXPECT_NO_THROW(replay(mutant, *f->counterexample));
  EXPECT_EQ(f->counterexample->initial.size(), 4u);
}

TEST(Predicate, AgreesWithConsensusSpec) {
  auto consensus = AnySpec{consensus_spec(threshold_pred())};
  auto mutant = oracle::without_transition(threshold(), "q2", "q2", "q1", "q3");
  for (const Protocol* p : {&threshold(), static_cast<const Protocol*>(&mutant)}) {
    auto a = check_computes_predicate(*p, threshold_pred(), upto(5));
    auto b = check_implements_spec(*p, consensus, upto(5));
    ASSERT_EQ(a.cases.size(), b.cases.size());
    for (std::size_t i = 0; i < a.cases.size(); ++i) EXPECT_EQ(a.cases[i].verdict, b.cases[i].verdict) << i;
  }
}

TEST(Predicate, RejectsPairAtoms) {
  EXPECT_THROW(check_computes_predicate(parity(), std::get<Spec>(parity_spec()), upto(2)), Error);
}

TEST(Spec, ThresholdAsOutputSpec) {
  auto s = make_spec("t", {"q1"}, {"true", "false"}, "(N >= 3 and n(q1,true) = N) or (N < 3 and n(q1,false) = N)");
  EXPECT_TRUE(check_implements_spec(threshold(), s, upto(5)).passed());
}

TEST(Spec, IdentityProtocol) {
  EXPECT_TRUE(check_implements_spec(builtin("identity3").protocol(), builtin("spec:identity3").spec(), upto(4)).passed());
}

TEST(Spec, SwappingOutputsNeverFreeze) {
  RawProtocol raw;
  raw.name = "swap";
  raw.states = {{"a", "x", std::nullopt, true, 0}, {"b", "y", std::nullopt, true, 0}};
  raw.transitions = {{"a", "b", "b", "a", 0}};
  auto p = validate_protocol(raw);
  auto anything = make_spec("any", {"a", "b"}, {"x", "y"}, "true");
  VerifyOptions o = upto(2);
  o.min_population = 2;
  auto r = check_implements_spec(p, anything, o);
  ASSERT_FALSE(r.passed());
  const auto* f = r.first_failure();
  EXPECT_NE(f->reason.find("keeps changing"), std::string::npos);
  ASSERT_TRUE(f->counterexample);
  replay(p, *f->counterexample);
  // The trace ends with the offending output-changing move.
  ASSERT_FALSE(f->counterexample->steps.empty());
  EXPECT_EQ(f->counterexample->steps.back().step.kind, StepKind::Protocol);
}

TEST(Shutdown, ParityNoRequests) {
  EXPECT_TRUE(check_implements_spec_with_shutdown(parity(), parity_spec(), upto(5, 0)).passed());
}

TEST(Shutdown, ParityOneRequestAtThree) {
  VerifyOptions o = upto(3, 1);
  o.min_population = 3;
  auto r = check_implements_spec_with_shutdown(parity(), parity_spec(), o);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.cases.size(), 2u);
}

TEST(Shutdown, PrintedRuleLosesParity) {
  VerifyOptions o = upto(3, 1);
  o.min_population = 3;
  const auto& printed = builtin("parity-as-printed").protocol();
  auto r = check_implements_spec_with_shutdown(printed, parity_spec(), o);
  ASSERT_FALSE(r.passed());
  replay(printed, *r.first_failure()->counterexample);
}

TEST(Shutdown, MutantFailsWithReplayableTrace) {
  auto mutant = oracle::with_transition_replaced(parity(), "even'", "odd", "bot", "odd");
  VerifyOptions o = upto(3, 1);
  o.min_population = 3;
  auto r = check_implements_spec_with_shutdown(mutant, parity_spec(), o);
  ASSERT_FALSE(r.passed());
  const auto* f = r.first_failure();
  EXPECT_EQ(f->requests, 1u);
  ASSERT_TRUE(f->counterexample);
  replay(mutant, *f->counterexample);
}

TEST(Shutdown, UnrequestedRemovalFails) {
  RawProtocol raw;
  raw.name = "leak";
  raw.mode = Mode::Shutdown;
  raw.states = {{"a", "x", "bot", true, 0}, {"bot", "_BOT_", "bot", true, 0}};
  raw.bot = "bot";
  raw.transitions = {{"a", "a", "bot", "a", 0}};
  auto p = validate_protocol(raw);
  auto s = make_spec("x", {"a"}, {"x"}, "true");
  VerifyOptions o = upto(2);
  o.min_population = 2;
  auto r = check_implements_spec_with_shutdown(p, s, o);
  ASSERT_FALSE(r.passed());
  EXPECT_NE(r.first_failure()->reason.find("never received"), std::string::npos);
  replay(p, *r.first_failure()->counterexample);
}

TEST(Shutdown, IdentityWithRequests) {
  EXPECT_TRUE(check_implements_spec_with_shutdown(builtin("identity3").protocol(), builtin("spec:identity3").spec(),
                                                  upto(4, 2))
                  .passed());
}

TEST(Shutdown, PlainProtocolRejected) {
  try {
    check_implements_spec_with_shutdown(threshold(), threshold_pred(), upto(2, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PlainModeNoRequests);
  }
}

TEST(Invariant, ParityCountInBottomSccs) {
  const auto& p = parity();
  for (std::uint32_t n = 1; n <= 5; ++n) {
    auto g = build_graph(p, {n, 0});
    for (const auto& b : g.bottom_sccs())
      for (auto v : b) {
        auto c = g.project(v);
        EXPECT_EQ((c.count(p.state("ODD")) + c.count(p.state("ODD'"))) % 2, n % 2);
      }
  }
}

TEST(Determinism, ThreadCountDoesNotChangeResults) {
  auto o1 = upto(5, 2);
  o1.threads = 1;
  auto o8 = o1;
  o8.threads = 8;
  auto a = check_implements_spec_with_shutdown(parity(), parity_spec(), o1);
  auto b = check_implements_spec_with_shutdown(parity(), parity_spec(), o8);
  ASSERT_EQ(a.cases.size(), b.cases.size());
  for (std::size_t i = 0; i < a.cases.size(); ++i) {
    EXPECT_EQ(a.cases[i].population, b.cases[i].population);
    EXPECT_EQ(a.cases[i].requests, b.cases[i].requests);
    EXPECT_EQ(a.cases[i].nodes, b.cases[i].nodes);
    EXPECT_EQ(a.cases[i].bsccs, b.cases[i].bsccs);
    EXPECT_EQ(a.cases[i].verdict, b.cases[i].verdict);
  }
}

TEST(Counterexample, RandomProtocolsReplay) {
  std::mt19937 rng(99);
  int failures = 0;
  for (int i = 0; i < 150; ++i) {
    bool sd = i % 2 == 0;
    auto p = oracle::random_protocol(rng, sd, 4);
    std::vector<std::string> ins;
    for (auto q : p.inputs())
      if (!sd || q != p.bot()) ins.push_back(p.state_name(q));
    auto s = make_spec("rnd", ins, {"a", "b", "c"}, i % 3 == 0 ? "N mod 2 = 0" : "n(s0,a) >= n(s0,b)");
    auto o = upto(3, sd ? 1 : 0);
    auto r = sd ? check_implements_spec_with_shutdown(p, s, o) : check_implements_spec(p, s, o);
    for (const auto& c : r.cases) {
      if (c.verdict == Verdict::Pass) continue;
      ++failures;
      ASSERT_TRUE(c.counterexample);
      EXPECT_NO_THROW(replay(p, *c.counterexample)) << c.reason;
      EXPECT_EQ(c.counterexample->initial.size(), c.population);
    }
  }
  EXPECT_GT(failures, 10);
}
