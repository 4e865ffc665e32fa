#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "popproto/model.hpp"

namespace popproto {

/// Name of the composed protocol's shutdown state.
inline constexpr std::string_view kComposedBot = "_BOT_";

struct DisjointPair {
  Protocol first;
  Protocol second;
  /// Old name -> new name for every renamed state of the second protocol.
  std::map<std::string, std::string> renames;
};

/// Renames states of the second protocol that clash with the first ("x" becomes
/// "x__2", then "x__2_1", "x__2_2", ... while still taken). The shutdown states
/// are identified under the first protocol's name. Output tokens of the first
/// protocol that named a renamed state follow the rename, so compatibility is
/// preserved.
DisjointPair make_disjoint(const Protocol& first, const Protocol& second);

struct CompatiblePair {
  Protocol first;
  Protocol second;
  /// States added to the second protocol for first-protocol outputs it lacked.
  std::vector<std::string> padded;
  /// Fresh token replacing the shutdown output on non-shutdown states of the first protocol.
  std::optional<std::string> bot_output_rename;
};

/// Makes every output of the first protocol an input state of the second by
/// adding silent padding states (output = own name, shutdown straight to the
/// shutdown state). A shutdown output on a non-shutdown state of the first
/// protocol is first renamed to a fresh token.
CompatiblePair ensure_compatible(const Protocol& first, const Protocol& second);

struct ComposeOptions {
  /// Inner request writes the partner's second component (the displayed rule)
  /// instead of the acting agent's own.
  bool strict_paper_rule2 = false;
};

/// Direct composition of two disjoint, compatible shutdown protocols. States are
/// "(q1|q2|i|T)" / "(q1|q2|i|B)" tuples plus the shutdown state "_BOT_";
/// do-nothing transitions are omitted.
Protocol compose(const Protocol& first, const Protocol& second, const ComposeOptions& options = {});

/// Renames the composed input tuples after the first protocol's input states.
Protocol relabel_inputs(const Protocol& composed, const Protocol& first);

struct PipelineOptions {
  ComposeOptions compose;
  bool relabel = true;
};

/// make_disjoint, ensure_compatible, compose and (optionally) relabel_inputs.
Protocol compose_protocols(const Protocol& first, const Protocol& second, const PipelineOptions& options = {});

/// Components of a composed tuple state name; nullopt for the shutdown state or
/// a name that is not a tuple.
struct ComposedState {
  std::string first;
  std::string second;
  std::string input;
  bool top = true;
};

std::optional<ComposedState> parse_composed_state(const std::string& name);
std::string composed_state_name(const ComposedState& s);

}  // namespace popproto
