#pragma once

// Independent oracles and generators shared by the unit and acceptance tests.
// Nothing here calls the verifier's graph or SCC code.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "popproto/model.hpp"
#include "popproto/scc.hpp"
#include "popproto/semantics.hpp"
#include "popproto/specs.hpp"
#include "popproto/verifier.hpp"

namespace popproto::oracle {

/// Bottom SCCs by transitive closure: v is in a bottom SCC iff every node
/// reachable from v reaches v back. Components sorted as bottom_sccs() does.
std::vector<std::vector<std::uint32_t>> naive_bottom_sccs(const Digraph& g);

/// Random digraph with `n` nodes, edge probability chosen per graph.
Digraph random_digraph(std::mt19937& rng, std::uint32_t n);

/// Composed-spec truth by assigning an intermediate value to every agent in turn.
bool brute_force_composed(const ComposedSpec& cs, const PairMultiset& m);

/// Every pair multiset over inputs x outputs with total <= max_total.
std::vector<PairMultiset> all_pair_multisets(const std::vector<std::string>& inputs,
                                             const std::vector<std::string>& outputs, std::uint32_t max_total);

/// Base-protocol reachability from all input configurations of size n (the
/// shutdown state excluded), by plain BFS on count vectors: protocol steps and
/// removal of agents in the shutdown state, no requests.
std::set<std::vector<std::uint32_t>> reachable_base(const Protocol& p, std::uint32_t n);

/// All multisets of size n over the given states, as count vectors.
std::vector<std::vector<std::uint32_t>> multisets_over(const std::vector<StateIdx>& states, std::size_t num_states,
                                                       std::uint32_t n);

/// Graph node describing where a simulated run ended: each surviving agent's
/// initial input, current state and request flag, plus the requests issued.
NodeKey node_key_of(const AugmentedProtocol& aug, const Trace& trace);

/// Random valid protocol for property tests.
Protocol random_protocol(std::mt19937& rng, bool shutdown, std::uint32_t max_states = 5);

/// Copy of p with one transition's right-hand side replaced.
Protocol with_transition_replaced(const Protocol& p, const std::string& a, const std::string& b,
                                  const std::string& a_next, const std::string& b_next);
/// Copy of p without the given transition.
Protocol without_transition(const Protocol& p, const std::string& a, const std::string& b, const std::string& a_next,
                            const std::string& b_next);

}  // namespace popproto::oracle
