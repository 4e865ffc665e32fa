#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "popproto/model.hpp"
#include "popproto/scc.hpp"
#include "popproto/semantics.hpp"
#include "popproto/specs.hpp"

namespace popproto {

enum class EdgeKind : std::uint8_t { Protocol, Request, Remove };

std::string_view to_string(EdgeKind kind) noexcept;

/// A configuration of augmented agents (sorted (class, count) pairs) together
/// with the number of shutdown requests issued so far.
struct NodeKey {
  std::vector<std::pair<AugCode, std::uint32_t>> classes;
  std::uint32_t requests_used = 0;

  std::uint32_t size() const noexcept;
  bool operator==(const NodeKey&) const = default;
};

struct NodeKeyHash {
  std::size_t operator()(const NodeKey& k) const noexcept;
};

struct Edge {
  std::uint32_t target = 0;
  EdgeKind kind = EdgeKind::Protocol;
  /// A participant's output value differs before and after.
  bool output_changing = false;
  /// Removal of an agent that never received a shutdown request.
  bool unrequested_removal = false;

  auto operator<=>(const Edge&) const = default;
};

/// One concrete move out of a node; enough to replay it on agents.
struct Move {
  EdgeKind kind = EdgeKind::Protocol;
  AugCode first = 0;   // acting class (first role for protocol moves)
  AugCode second = 0;  // second role, protocol moves only
  Transition transition{};
};

struct GraphOptions {
  std::uint32_t population = 1;
  std::uint32_t max_requests = 0;
  /// Track each agent's initial input and request flag. Off gives the plain
  /// configuration graph of the base protocol.
  bool track_inputs = true;
  std::size_t node_cap = 5'000'000;
};

/// Explicit reachability graph from every input configuration of one size.
/// Nodes are numbered in BFS discovery order; roots come first.
class ReachGraph {
 public:
  const AugmentedProtocol& protocol() const noexcept { return aug_; }
  const GraphOptions& options() const noexcept { return options_; }
  std::size_t size() const noexcept { return keys_.size(); }
  const NodeKey& node(std::uint32_t id) const { return *keys_.at(id); }
  std::span<const Edge> edges(std::uint32_t id) const { return edges_.at(id); }
  const std::vector<std::uint32_t>& roots() const noexcept { return roots_; }
  std::optional<std::uint32_t> find(const NodeKey& key) const;
  std::size_t edge_count() const noexcept;

  Digraph adjacency() const;
  std::vector<std::vector<std::uint32_t>> bottom_sccs() const;

  /// Every enabled move from a node, with the resulting node key.
  void expand(const NodeKey& key, const std::function<void(const Move&, NodeKey&&)>& visit) const;

  /// Node ids along a shortest path from some root to `id`.
  std::vector<std::uint32_t> path_to(std::uint32_t id) const;
  /// Agent-level trace along path_to(id), optionally followed by one extra move.
  Trace trace_to(std::uint32_t id, const std::optional<Move>& last = std::nullopt) const;

  /// Counts per base state (initial inputs and flags forgotten).
  Configuration project(std::uint32_t id) const;
  std::string label(std::uint32_t id) const;

 private:
  friend ReachGraph build_graph(const Protocol& p, const GraphOptions& options);
  ReachGraph(const Protocol& p, const GraphOptions& options);
  std::uint32_t intern(NodeKey&& key, std::uint32_t parent);

  AugmentedProtocol aug_;
  GraphOptions options_;
  std::unordered_map<NodeKey, std::uint32_t, NodeKeyHash> index_;
  std::vector<const NodeKey*> keys_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> roots_;
};

/// BFS closure from all input configurations of the given size (the shutdown
/// state excluded). Request edges are offered while fewer than max_requests
/// have been used; removal edges from every node holding a shutdown-state agent.
/// Throws Explosion past options.node_cap nodes.
ReachGraph build_graph(const Protocol& p, const GraphOptions& options);

/// Graphviz rendering: count-vector labels, edge kinds as labels, bottom SCC
/// members double-circled.
std::string to_dot(const ReachGraph& g);

enum class CheckKind { Predicate, Spec, Shutdown };
enum class Verdict { Pass, Fail };

std::string_view to_string(CheckKind kind) noexcept;
std::string_view to_string(Verdict verdict) noexcept;

struct CaseResult {
  std::uint32_t population = 0;
  std::uint32_t requests = 0;
  Verdict verdict = Verdict::Pass;
  std::size_t nodes = 0;
  std::size_t bsccs = 0;
  double elapsed_ms = 0;
  std::string reason;
  std::optional<Trace> counterexample;
};

struct VerificationReport {
  std::string protocol;
  std::string spec;
  CheckKind kind = CheckKind::Spec;
  std::vector<CaseResult> cases;
  std::vector<std::string> notes;

  bool passed() const;
  const CaseResult* first_failure() const;
};

struct VerifyOptions {
  std::uint32_t max_population = 1;
  std::uint32_t min_population = 1;
  std::uint32_t max_requests = 0;
  std::size_t node_cap = 5'000'000;
  /// 0 = hardware concurrency.
  unsigned threads = 0;
};

/// Every bottom SCC reachable from an input configuration C must consist of
/// phi(C)-consensus configurations (outputs "true"/"false").
VerificationReport check_computes_predicate(const Protocol& p, const Spec& predicate, const VerifyOptions& options);

/// Bottom SCCs must be output-frozen and their (input, output) pairs satisfy phi.
VerificationReport check_implements_spec(const Protocol& p, const AnySpec& spec, const VerifyOptions& options);

/// As check_implements_spec, under every schedule with at most max_requests
/// shutdown requests; requested agents and only they must be removed. Bottom
/// SCCs where every survivor was requested carry no obligation.
VerificationReport check_implements_spec_with_shutdown(const Protocol& p, const AnySpec& spec,
                                                       const VerifyOptions& options);

/// Runs one (n, R) case of the given check against an already built graph.
CaseResult check_graph(CheckKind kind, const ReachGraph& g, const AnySpec& spec);

}  // namespace popproto
