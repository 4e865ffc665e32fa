#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "popproto/error.hpp"

namespace popproto {

using StateIdx = std::uint32_t;
using AgentId = std::uint32_t;

/// Output token reserved for the shutdown state. Never a user output value.
inline constexpr std::string_view kBotOutput = "_BOT_";

enum class Mode { Plain, Shutdown };

std::string_view to_string(Mode mode) noexcept;

/// Non-empty, no whitespace, no '#', and not the arrow literal.
bool is_valid_token(std::string_view token) noexcept;

/// One element of the step relation: (first, second) -> (first_next, second_next).
struct Transition {
  StateIdx first = 0;
  StateIdx second = 0;
  StateIdx first_next = 0;
  StateIdx second_next = 0;

  bool is_silent() const noexcept { return first == first_next && second == second_next; }

  auto operator<=>(const Transition&) const = default;
};

// Unvalidated protocol description, as produced by the file parser or built by hand.
// Line numbers are carried only for diagnostics (0 = not from a file).
struct RawState {
  std::string name;
  std::string output;
  std::optional<std::string> shutdown;
  bool input = false;
  int line = 0;
};

struct RawTransition {
  std::string first;
  std::string second;
  std::string first_next;
  std::string second_next;
  int line = 0;
};

struct RawProtocol {
  std::string name;
  Mode mode = Mode::Plain;
  std::vector<RawState> states;
  std::optional<std::string> bot;
  int bot_line = 0;
  std::vector<RawTransition> transitions;
};

class Protocol;

/// Checks every protocol invariant and builds the immutable value.
/// Throws Error naming the first violated invariant.
Protocol validate_protocol(const RawProtocol& raw);

/// A validated population protocol, optionally with shutdown requests.
///
/// States are indexed in declaration order. The transition set is kept sorted
/// and duplicate-free, so two protocols with the same declaration compare equal
/// regardless of the order transitions were listed in.
class Protocol {
 public:
  const std::string& name() const noexcept { return name_; }
  Mode mode() const noexcept { return mode_; }
  bool has_shutdown() const noexcept { return mode_ == Mode::Shutdown; }

  std::size_t num_states() const noexcept { return states_.size(); }
  const std::vector<std::string>& states() const noexcept { return states_; }
  const std::string& state_name(StateIdx q) const { return states_.at(q); }
  std::optional<StateIdx> find_state(std::string_view name) const;
  /// Like find_state but throws UnknownState.
  StateIdx state(std::string_view name) const;

  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  /// Right-hand sides of every transition whose left pair is (a, b), silent ones included.
  std::span<const std::pair<StateIdx, StateIdx>> successors(StateIdx a, StateIdx b) const;

  bool is_input(StateIdx q) const { return is_input_.at(q); }
  const std::vector<StateIdx>& inputs() const noexcept { return inputs_; }

  const std::string& output(StateIdx q) const { return output_.at(q); }
  /// Distinct output tokens in order of first appearance.
  std::vector<std::string> output_alphabet() const;

  /// Shutdown request function. Only valid in shutdown mode.
  StateIdx shutdown(StateIdx q) const;
  /// The shutdown state. Only valid in shutdown mode.
  StateIdx bot() const;

  RawProtocol to_raw() const;

  bool operator==(const Protocol& other) const;

 private:
  friend Protocol validate_protocol(const RawProtocol& raw);
  Protocol() = default;
  void build_index();

  static std::uint64_t pair_key(StateIdx a, StateIdx b) noexcept {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  std::string name_;
  Mode mode_ = Mode::Plain;
  std::vector<std::string> states_;
  std::unordered_map<std::string, StateIdx> by_name_;
  std::vector<Transition> transitions_;
  std::vector<bool> is_input_;
  std::vector<StateIdx> inputs_;
  std::vector<std::string> output_;
  std::vector<StateIdx> shutdown_;
  std::optional<StateIdx> bot_;
  std::unordered_map<std::uint64_t, std::vector<std::pair<StateIdx, StateIdx>>> index_;
};

/// Multiset of states: count per state index.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::size_t num_states) : counts_(num_states, 0) {}
  explicit Configuration(std::vector<std::uint32_t> counts);

  std::uint32_t count(StateIdx q) const { return counts_.at(q); }
  void add(StateIdx q, std::uint32_t k = 1);
  void remove(StateIdx q, std::uint32_t k = 1);
  std::uint32_t size() const noexcept { return size_; }
  std::vector<StateIdx> support() const;
  const std::vector<std::uint32_t>& counts() const noexcept { return counts_; }

  bool operator==(const Configuration&) const = default;
  auto operator<=>(const Configuration& other) const { return counts_ <=> other.counts_; }

 private:
  std::vector<std::uint32_t> counts_;
  std::uint32_t size_ = 0;
};

/// Agent identities mapped to states. Ordered by id for stable printing.
using AgentConfiguration = std::map<AgentId, StateIdx>;

Configuration project(const AgentConfiguration& agents, std::size_t num_states);

/// "name:count" pairs for the support, e.g. "{q0:1, q2:1}".
std::string format_configuration(const Protocol& p, const Configuration& c);

/// Adds a do-nothing transition for every ordered pair of states. Idempotent.
Protocol normalize_silent(const Protocol& p);

/// Agent state extended with the agent's initial input and whether it has been
/// asked to shut down. The initial slot equals inputs().size() for the marker
/// used when the initial state is not tracked (agents starting in the shutdown state).
struct AugmentedState {
  std::uint32_t initial_slot = 0;
  StateIdx current = 0;
  bool requested = false;

  auto operator<=>(const AugmentedState&) const = default;
};

using AugCode = std::uint32_t;

struct AugmentedTransition {
  AugCode first, second, first_next, second_next;
};

/// Product of a protocol with per-agent bookkeeping of the initial input and the
/// request flag. Protocol transitions act on the current component only.
class AugmentedProtocol {
 public:
  explicit AugmentedProtocol(Protocol base);

  const Protocol& base() const noexcept { return base_; }
  std::size_t num_states() const noexcept { return (base_.inputs().size() + 1) * base_.num_states() * 2; }
  std::uint32_t marker_slot() const noexcept { return static_cast<std::uint32_t>(base_.inputs().size()); }

  AugCode encode(const AugmentedState& s) const noexcept {
    return (s.initial_slot * static_cast<AugCode>(base_.num_states()) + s.current) * 2 + (s.requested ? 1 : 0);
  }
  AugmentedState decode(AugCode code) const noexcept {
    auto q = static_cast<AugCode>(base_.num_states());
    return {code / 2 / q, (code / 2) % q, (code & 1) != 0};
  }

  /// Code for an agent that starts in input state q.
  AugCode initial(StateIdx q) const;
  /// Base state name of the initial component, or empty for the marker.
  std::string initial_name(AugCode code) const;
  StateIdx current(AugCode code) const noexcept { return decode(code).current; }
  bool requested(AugCode code) const noexcept { return (code & 1) != 0; }
  const std::string& output(AugCode code) const { return base_.output(current(code)); }
  /// Applies the shutdown request function to the current component and sets the flag.
  AugCode request(AugCode code) const;
  AugCode with_current(AugCode code, StateIdx q) const noexcept;

  std::string state_name(AugCode code) const;

  /// Every augmented transition (silent ones included). Size grows quadratically
  /// in num_states(); meant for inspection and tests.
  std::vector<AugmentedTransition> transitions() const;

 private:
  Protocol base_;
  std::vector<std::uint32_t> slot_of_state_;
};

AugmentedProtocol augment_with_inputs(const Protocol& p);

}  // namespace popproto
