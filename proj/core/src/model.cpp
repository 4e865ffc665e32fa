#include "popproto/model.hpp"

#include <algorithm>
#include <sstream>

namespace popproto {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadToken: return "BadToken";
    case ErrorCode::DuplicateState: return "DuplicateState";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::BotNotSilent: return "BotNotSilent";
    case ErrorCode::BotBadMaps: return "BotBadMaps";
    case ErrorCode::EmptyInputs: return "EmptyInputs";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::StateMismatch: return "StateMismatch";
    case ErrorCode::SameAgent: return "SameAgent";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::PlainModeNoRequests: return "PlainModeNoRequests";
    case ErrorCode::PlainModeNoRemoval: return "PlainModeNoRemoval";
    case ErrorCode::NotInBot: return "NotInBot";
    case ErrorCode::BadScript: return "BadScript";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::UnknownPairAtom: return "UnknownPairAtom";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::Explosion: return "Explosion";
    case ErrorCode::NotDisjoint: return "NotDisjoint";
    case ErrorCode::NotCompatible: return "NotCompatible";
    case ErrorCode::BotOutputLeak: return "BotOutputLeak";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(Mode mode) noexcept {
  return mode == Mode::Plain ? "plain" : "shutdown";
}

bool is_valid_token(std::string_view token) noexcept {
  if (token.empty() || token == "->") return false;
  return std::none_of(token.begin(), token.end(), [](char c) {
    return c == '#' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  });
}

namespace {

std::string at_line(int line) {
  return line > 0 ? " (line " + std::to_string(line) + ")" : std::string();
}

}  // namespace

Protocol validate_protocol(const RawProtocol& raw) {
  Protocol p;
  if (!is_valid_token(raw.name)) throw Error(ErrorCode::BadToken, "invalid protocol name '" + raw.name + "'");
  p.name_ = raw.name;
  p.mode_ = raw.mode;

  for (const auto& s : raw.states) {
    if (!is_valid_token(s.name)) throw Error(ErrorCode::BadToken, "invalid state name '" + s.name + "'" + at_line(s.line));
    if (!is_valid_token(s.output))
      throw Error(ErrorCode::BadToken, "invalid output token '" + s.output + "' for state " + s.name + at_line(s.line));
    auto idx = static_cast<StateIdx>(p.states_.size());
    if (!p.by_name_.emplace(s.name, idx).second)
      throw Error(ErrorCode::DuplicateState, "state '" + s.name + "' declared twice" + at_line(s.line));
    p.states_.push_back(s.name);
    p.output_.push_back(s.output);
    p.is_input_.push_back(s.input);
    if (s.input) p.inputs_.push_back(idx);
  }

  auto lookup = [&](const std::string& name, int line) {
    auto it = p.by_name_.find(name);
    if (it == p.by_name_.end()) throw Error(ErrorCode::UnknownState, "undeclared state '" + name + "'" + at_line(line));
    return it->second;
  };

  for (const auto& t : raw.transitions) {
    p.transitions_.push_back({lookup(t.first, t.line), lookup(t.second, t.line), lookup(t.first_next, t.line),
                              lookup(t.second_next, t.line)});
  }
  std::sort(p.transitions_.begin(), p.transitions_.end());
  p.transitions_.erase(std::unique(p.transitions_.begin(), p.transitions_.end()), p.transitions_.end());

  if (raw.mode == Mode::Plain) {
    if (raw.bot) throw Error(ErrorCode::ModeMismatch, "bot declared in a plain protocol" + at_line(raw.bot_line));
    for (const auto& s : raw.states)
      if (s.shutdown)
        throw Error(ErrorCode::ModeMismatch, "shutdown= on state " + s.name + " in a plain protocol" + at_line(s.line));
  } else {
    for (const auto& s : raw.states) {
      if (!s.shutdown)
        throw Error(ErrorCode::ModeMismatch, "state " + s.name + " lacks shutdown= in a shutdown protocol" + at_line(s.line));
      p.shutdown_.push_back(lookup(*s.shutdown, s.line));
    }
    if (!raw.bot) throw Error(ErrorCode::ModeMismatch, "shutdown protocol without a bot declaration");
    p.bot_ = lookup(*raw.bot, raw.bot_line);
  }

  if (p.inputs_.empty()) throw Error(ErrorCode::EmptyInputs, "protocol " + p.name_ + " has no input states");

  if (p.bot_) {
    StateIdx bot = *p.bot_;
    const auto& bot_name = p.states_[bot];
    if (p.shutdown_[bot] != bot) throw Error(ErrorCode::BotBadMaps, "shutdown map of " + bot_name + " is not itself");
    if (p.output_[bot] != kBotOutput)
      throw Error(ErrorCode::BotBadMaps, "output of " + bot_name + " must be " + std::string(kBotOutput));
    if (!p.is_input_[bot]) throw Error(ErrorCode::BotBadMaps, "shutdown state " + bot_name + " must be an input state");
    for (const auto& t : p.transitions_) {
      if ((t.first == bot || t.second == bot) && !t.is_silent())
        throw Error(ErrorCode::BotNotSilent, "transition " + p.states_[t.first] + " " + p.states_[t.second] + " -> " +
                                                 p.states_[t.first_next] + " " + p.states_[t.second_next] +
                                                 " changes a state while interacting with " + bot_name);
    }
  }

  p.build_index();
  return p;
}

void Protocol::build_index() {
  index_.clear();
  for (const auto& t : transitions_) index_[pair_key(t.first, t.second)].emplace_back(t.first_next, t.second_next);
}

std::optional<StateIdx> Protocol::find_state(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

StateIdx Protocol::state(std::string_view name) const {
  auto q = find_state(name);
  if (!q) throw Error(ErrorCode::UnknownState, "no state '" + std::string(name) + "' in protocol " + name_);
  return *q;
}

std::span<const std::pair<StateIdx, StateIdx>> Protocol::successors(StateIdx a, StateIdx b) const {
  auto it = index_.find(pair_key(a, b));
  if (it == index_.end()) return {};
  return it->second;
}

std::vector<std::string> Protocol::output_alphabet() const {
  std::vector<std::string> out;
  for (const auto& o : output_)
    if (std::find(out.begin(), out.end(), o) == out.end()) out.push_back(o);
  return out;
}

StateIdx Protocol::shutdown(StateIdx q) const {
  if (mode_ != Mode::Shutdown) throw Error(ErrorCode::PlainModeNoRequests, "protocol " + name_ + " has no shutdown map");
  return shutdown_.at(q);
}

StateIdx Protocol::bot() const {
  if (!bot_) throw Error(ErrorCode::PlainModeNoRemoval, "protocol " + name_ + " has no shutdown state");
  return *bot_;
}

RawProtocol Protocol::to_raw() const {
  RawProtocol raw;
  raw.name = name_;
  raw.mode = mode_;
  for (StateIdx q = 0; q < states_.size(); ++q) {
    RawState s{states_[q], output_[q], std::nullopt, is_input_[q], 0};
    if (mode_ == Mode::Shutdown) s.shutdown = states_[shutdown_[q]];
    raw.states.push_back(std::move(s));
  }
  if (bot_) raw.bot = states_[*bot_];
  for (const auto& t : transitions_)
    raw.transitions.push_back(
        {states_[t.first], states_[t.second], states_[t.first_next], states_[t.second_next], 0});
  return raw;
}

bool Protocol::operator==(const Protocol& o) const {
  return name_ == o.name_ && mode_ == o.mode_ && states_ == o.states_ && transitions_ == o.transitions_ &&
         is_input_ == o.is_input_ && output_ == o.output_ && shutdown_ == o.shutdown_ && bot_ == o.bot_;
}

Configuration::Configuration(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {
  for (auto c : counts_) size_ += c;
}

void Configuration::add(StateIdx q, std::uint32_t k) {
  counts_.at(q) += k;
  size_ += k;
}

void Configuration::remove(StateIdx q, std::uint32_t k) {
  if (counts_.at(q) < k) throw Error(ErrorCode::StateMismatch, "configuration has too few agents in state");
  counts_[q] -= k;
  size_ -= k;
}

std::vector<StateIdx> Configuration::support() const {
  std::vector<StateIdx> out;
  for (StateIdx q = 0; q < counts_.size(); ++q)
    if (counts_[q] > 0) out.push_back(q);
  return out;
}

Configuration project(const AgentConfiguration& agents, std::size_t num_states) {
  Configuration c(num_states);
  for (const auto& [agent, q] : agents) c.add(q);
  return c;
}

std::string format_configuration(const Protocol& p, const Configuration& c) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (auto q : c.support()) {
    if (!first) os << ", ";
    first = false;
    os << p.state_name(q) << ':' << c.count(q);
  }
  os << '}';
  return os.str();
}

Protocol normalize_silent(const Protocol& p) {
  auto raw = p.to_raw();
  for (const auto& a : p.states())
    for (const auto& b : p.states()) raw.transitions.push_back({a, b, a, b, 0});
  return validate_protocol(raw);
}

AugmentedProtocol::AugmentedProtocol(Protocol base) : base_(std::move(base)) {
  slot_of_state_.assign(base_.num_states(), marker_slot());
  for (std::uint32_t i = 0; i < base_.inputs().size(); ++i) slot_of_state_[base_.inputs()[i]] = i;
}

AugCode AugmentedProtocol::initial(StateIdx q) const {
  return encode({slot_of_state_.at(q), q, false});
}

std::string AugmentedProtocol::initial_name(AugCode code) const {
  auto slot = decode(code).initial_slot;
  if (slot == marker_slot()) return {};
  return base_.state_name(base_.inputs()[slot]);
}

AugCode AugmentedProtocol::request(AugCode code) const {
  auto s = decode(code);
  s.current = base_.shutdown(s.current);
  s.requested = true;
  return encode(s);
}

AugCode AugmentedProtocol::with_current(AugCode code, StateIdx q) const noexcept {
  auto s = decode(code);
  s.current = q;
  return encode(s);
}

std::string AugmentedProtocol::state_name(AugCode code) const {
  auto s = decode(code);
  auto init = initial_name(code);
  std::string out = (init.empty() ? std::string("?") : init) + ">" + base_.state_name(s.current);
  if (s.requested) out += "*";
  return out;
}

std::vector<AugmentedTransition> AugmentedProtocol::transitions() const {
  std::vector<AugmentedTransition> out;
  auto slots = marker_slot() + 1;
  for (const auto& t : base_.transitions()) {
    for (std::uint32_t s1 = 0; s1 < slots; ++s1)
      for (int r1 = 0; r1 < 2; ++r1)
        for (std::uint32_t s2 = 0; s2 < slots; ++s2)
          for (int r2 = 0; r2 < 2; ++r2)
            out.push_back({encode({s1, t.first, r1 == 1}), encode({s2, t.second, r2 == 1}),
                           encode({s1, t.first_next, r1 == 1}), encode({s2, t.second_next, r2 == 1})});
  }
  return out;
}

AugmentedProtocol augment_with_inputs(const Protocol& p) { return AugmentedProtocol(p); }

}  // namespace popproto
