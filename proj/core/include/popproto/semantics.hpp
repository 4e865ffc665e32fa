#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "popproto/model.hpp"

namespace popproto {

enum class StepKind { Protocol, Request, Remove };

std::string_view to_string(StepKind kind) noexcept;

/// One scheduler move. For Protocol steps agent1 plays the first role of the
/// transition and agent2 the second; agent2 and transition are unused otherwise.
struct Step {
  StepKind kind = StepKind::Protocol;
  AgentId agent1 = 0;
  AgentId agent2 = 0;
  Transition transition{};

  bool operator==(const Step&) const = default;
};

struct TraceEntry {
  Step step;
  AgentConfiguration after;
};

struct Trace {
  AgentConfiguration initial;
  std::vector<TraceEntry> steps;
  std::optional<std::size_t> stabilization_index;
  bool deadlocked = false;

  std::size_t length() const noexcept { return steps.size(); }
  /// Configuration at index i, where 0 is the initial one.
  const AgentConfiguration& configuration(std::size_t i) const { return i == 0 ? initial : steps.at(i - 1).after; }
  const AgentConfiguration& final_configuration() const { return configuration(steps.size()); }
};

struct ScriptedRequest {
  std::uint64_t after_step = 0;
  std::optional<AgentId> target;  // nullopt = any agent still present

  bool operator==(const ScriptedRequest&) const = default;
};

using RequestScript = std::vector<ScriptedRequest>;

/// Parses "<step>:<agent|any>[,...]". Throws BadScript.
RequestScript parse_request_script(std::string_view text);

AgentConfiguration apply_protocol_step(const AgentConfiguration& c, AgentId a1, AgentId a2, const Transition& t);
AgentConfiguration apply_request(const AgentConfiguration& c, AgentId a, const Protocol& p);
AgentConfiguration apply_removal(const AgentConfiguration& c, AgentId a, const Protocol& p);

/// Transitions of p whose left pair can be drawn from c (two distinct agents).
/// Silent transitions are included only if p lists them.
std::vector<Transition> enabled_protocol_steps(const Configuration& c, const Protocol& p);

enum class SchedulerKind { UniformRandom };

struct RunOptions {
  std::uint64_t max_steps = 10000;
  std::uint64_t seed = 0;
  SchedulerKind scheduler = SchedulerKind::UniformRandom;
  /// An agent in the shutdown state is removed at most this many steps after reaching it.
  std::uint32_t removal_delay = 1;
  /// Steps that must follow an observed stabilization point unless the run deadlocked.
  std::size_t stabilization_window = 1000;
  bool allow_non_input_start = false;
};

/// Simulates one execution. The scheduler picks uniformly among agent-level
/// non-silent protocol steps; scripted requests and pending removals go first.
Trace run(const Protocol& p, const AgentConfiguration& init, const RequestScript& script, const RunOptions& options);

/// Agents 1..n all in state q.
AgentConfiguration uniform_configuration(StateIdx q, std::uint32_t n);

/// Smallest index from which every surviving agent keeps its output until the end
/// of the trace, if at least `window` steps follow it or the trace deadlocked.
/// Observed only: a finite trace cannot prove stability.
std::optional<std::size_t> detect_stabilization(const Trace& trace, const Protocol& p, std::size_t window);

/// Re-checks every step of the trace against p. Throws StateMismatch naming the
/// first step whose result does not follow from its predecessor.
void replay(const Protocol& p, const Trace& trace);

}  // namespace popproto
