#pragma once

#include <string>
#include <variant>
#include <vector>

#include "popproto/model.hpp"
#include "popproto/specs.hpp"

namespace popproto {

struct NamedArtifact {
  std::string key;
  std::variant<Protocol, AnySpec> value;
  std::string provenance;

  bool is_protocol() const noexcept { return std::holds_alternative<Protocol>(value); }
  const Protocol& protocol() const { return std::get<Protocol>(value); }
  const AnySpec& spec() const { return std::get<AnySpec>(value); }
};

/// Built-in protocols and specifications. Throws UnknownKey.
///
///   threshold3   four-state protocol deciding "at least three q1 agents"
///   parity       shutdown-aware parity protocol with primed request states
///   parity-as-printed  the same with the token-losing (ODD', odd) rule
///   identity3    transition-free identity over {ODD, odd, even}
///   spec:threshold3            predicate n(q1) >= 3
///   spec:threshold3-consensus  the same as an output specification
///   spec:parity, spec:identity3
const NamedArtifact& builtin(const std::string& key);

std::vector<std::string> builtin_keys();

/// Protocol keys only, in registry order.
std::vector<std::string> builtin_protocol_keys();

}  // namespace popproto
