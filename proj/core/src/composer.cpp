#include "popproto/composer.hpp"

#include <algorithm>
#include <set>

namespace popproto {

namespace {

void require_shutdown(const Protocol& p) {
  if (!p.has_shutdown())
    throw Error(ErrorCode::ModeMismatch, "composition needs shutdown-mode protocols; " + p.name() + " is plain");
}

std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  auto candidate = base + "__2";
  for (int k = 1; taken.contains(candidate); ++k) candidate = base + "__2_" + std::to_string(k);
  return candidate;
}

void rename_states(RawProtocol& raw, const std::map<std::string, std::string>& renames) {
  auto apply = [&](std::string& s) {
    if (auto it = renames.find(s); it != renames.end()) s = it->second;
  };
  for (auto& s : raw.states) {
    apply(s.name);
    if (s.shutdown) apply(*s.shutdown);
  }
  if (raw.bot) apply(*raw.bot);
  for (auto& t : raw.transitions) {
    apply(t.first);
    apply(t.second);
    apply(t.first_next);
    apply(t.second_next);
  }
}

}  // namespace

std::string composed_state_name(const ComposedState& s) {
  return "(" + s.first + "|" + s.second + "|" + s.input + "|" + (s.top ? "T" : "B") + ")";
}

std::optional<ComposedState> parse_composed_state(const std::string& name) {
  if (name.size() < 2 || name.front() != '(' || name.back() != ')') return std::nullopt;
  std::vector<std::string> parts;
  std::string cur;
  for (std::size_t i = 1; i + 1 < name.size(); ++i) {
    if (name[i] == '|') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += name[i];
    }
  }
  parts.push_back(cur);
  if (parts.size() != 4 || (parts[3] != "T" && parts[3] != "B")) return std::nullopt;
  return ComposedState{parts[0], parts[1], parts[2], parts[3] == "T"};
}

DisjointPair make_disjoint(const Protocol& first, const Protocol& second) {
  require_shutdown(first);
  require_shutdown(second);
  std::set<std::string> taken(first.states().begin(), first.states().end());
  taken.insert(second.states().begin(), second.states().end());

  const auto& bot1 = first.state_name(first.bot());
  const auto& bot2 = second.state_name(second.bot());
  std::map<std::string, std::string> renames;
  for (StateIdx q = 0; q < second.num_states(); ++q) {
    const auto& name = second.state_name(q);
    if (q == second.bot() || !first.find_state(name)) continue;
    auto fresh = fresh_name(name, taken);
    taken.insert(fresh);
    renames[name] = fresh;
  }
  if (bot2 != bot1) renames[bot2] = bot1;

  auto raw2 = second.to_raw();
  rename_states(raw2, renames);

  auto raw1 = first.to_raw();
  for (auto& s : raw1.states) {
    if (auto it = renames.find(s.output); it != renames.end() && s.output != bot2) s.output = it->second;
  }
  return {validate_protocol(raw1), validate_protocol(raw2), std::move(renames)};
}

CompatiblePair ensure_compatible(const Protocol& first, const Protocol& second) {
  require_shutdown(first);
  require_shutdown(second);
  auto raw1 = first.to_raw();
  auto raw2 = second.to_raw();
  CompatiblePair result{first, second, {}, std::nullopt};

  std::set<std::string> names(first.states().begin(), first.states().end());
  names.insert(second.states().begin(), second.states().end());

  bool leaks = false;
  for (StateIdx q = 0; q < first.num_states(); ++q)
    leaks = leaks || (q != first.bot() && first.output(q) == kBotOutput);
  if (leaks) {
    std::set<std::string> used(names);
    for (const auto& o : first.output_alphabet()) used.insert(o);
    std::string token = "_BOTOUT_";
    for (int k = 1; used.contains(token); ++k) token = "_BOTOUT_" + std::to_string(k);
    for (StateIdx q = 0; q < first.num_states(); ++q)
      if (q != first.bot() && raw1.states[q].output == kBotOutput) raw1.states[q].output = token;
    result.bot_output_rename = token;
  }

  const auto bot2 = second.state_name(second.bot());
  std::map<std::string, std::string> padded_as;
  for (StateIdx q = 0; q < first.num_states(); ++q) {
    if (q == first.bot()) continue;
    auto& value = raw1.states[q].output;
    if (auto it = padded_as.find(value); it != padded_as.end()) {
      value = it->second;
      continue;
    }
    if (auto q2 = second.find_state(value)) {
      if (!second.is_input(*q2) || *q2 == second.bot())
        throw Error(ErrorCode::NotCompatible,
                    "output " + value + " of " + first.name() + " names a non-input state of " + second.name());
      continue;
    }
    // Padding state: silent, outputs the value itself, shuts down immediately.
    std::string name = names.contains(value) ? fresh_name(value, names) : value;
    names.insert(name);
    raw2.states.push_back({name, value, bot2, true, 0});
    result.padded.push_back(name);
    padded_as[value] = name;
    value = name;
  }

  result.first = validate_protocol(raw1);
  result.second = validate_protocol(raw2);
  return result;
}

Protocol compose(const Protocol& first, const Protocol& second, const ComposeOptions& options) {
  require_shutdown(first);
  require_shutdown(second);
  const StateIdx bot1 = first.bot(), bot2 = second.bot();

  for (StateIdx q = 0; q < first.num_states(); ++q) {
    if (q == bot1) continue;
    if (second.find_state(first.state_name(q)))
      throw Error(ErrorCode::NotDisjoint, "state " + first.state_name(q) + " occurs in both protocols");
  }
  if (first.find_state(second.state_name(bot2)) && first.state_name(bot1) != second.state_name(bot2))
    throw Error(ErrorCode::NotDisjoint, "shutdown state " + second.state_name(bot2) + " is an ordinary state of " + first.name());
  for (const auto* p : {&first, &second}) {
    for (StateIdx q = 0; q < p->num_states(); ++q)
      if (q != p->bot() && p->output(q) == kBotOutput)
        throw Error(ErrorCode::BotOutputLeak, "state " + p->state_name(q) + " of " + p->name() + " outputs the shutdown token");
  }

  // Second-protocol input states available as the tracked initial component.
  std::vector<StateIdx> slots;
  std::vector<std::int64_t> slot_of(second.num_states(), -1);
  for (auto q : second.inputs()) {
    if (q == bot2) continue;
    slot_of[q] = static_cast<std::int64_t>(slots.size());
    slots.push_back(q);
  }

  // o1 as a map into second-protocol states.
  std::vector<StateIdx> out1(first.num_states(), bot2);
  for (StateIdx q = 0; q < first.num_states(); ++q) {
    if (q == bot1) continue;
    auto target = second.find_state(first.output(q));
    if (!target || slot_of[*target] < 0)
      throw Error(ErrorCode::NotCompatible,
                  "output " + first.output(q) + " of " + first.name() + " is not an input state of " + second.name());
    out1[q] = *target;
  }

  const auto n1 = static_cast<StateIdx>(first.num_states());
  const auto n2 = static_cast<StateIdx>(second.num_states());
  const auto ni = static_cast<StateIdx>(slots.size());
  const StateIdx tuples = n1 * n2 * ni * 2;
  const StateIdx bot = tuples;
  auto id = [&](StateIdx q1, StateIdx q2, StateIdx slot, bool top) { return ((q1 * n2 + q2) * ni + slot) * 2 + (top ? 0 : 1); };
  struct Parts {
    StateIdx q1, q2, slot;
    bool top;
  };
  auto parts = [&](StateIdx s) { return Parts{s / 2 / ni / n2, (s / 2 / ni) % n2, (s / 2) % ni, s % 2 == 0}; };

  std::vector<std::string> names(tuples + 1);
  for (StateIdx s = 0; s < tuples; ++s) {
    auto [q1, q2, slot, top] = parts(s);
    names[s] = composed_state_name({first.state_name(q1), second.state_name(q2), second.state_name(slots[slot]), top});
  }
  names[bot] = std::string(kComposedBot);

  RawProtocol raw;
  raw.name = first.name() + "." + second.name();
  raw.mode = Mode::Shutdown;
  raw.bot = names[bot];

  std::set<StateIdx> inputs{bot};
  for (auto q1 : first.inputs())
    if (q1 != bot1) inputs.insert(id(q1, out1[q1], static_cast<StateIdx>(slot_of[out1[q1]]), true));

  for (StateIdx s = 0; s < tuples; ++s) {
    auto [q1, q2, slot, top] = parts(s);
    std::string output;
    if (top && slots[slot] == out1[q1]) output = second.output(q2);
    else output = second.output(out1[q1]);
    raw.states.push_back({names[s], output, names[id(first.shutdown(q1), q2, slot, top)], inputs.contains(s), 0});
  }
  raw.states.push_back({names[bot], std::string(kBotOutput), names[bot], true, 0});

  std::set<Transition> transitions;
  auto add = [&](StateIdx a, StateIdx b, StateIdx a2, StateIdx b2) {
    Transition t{a, b, a2, b2};
    if (!t.is_silent()) transitions.insert(t);
  };

  // Family 1: both components step in parallel; do-nothings on either side allowed.
  const auto t1s = normalize_silent(first).transitions();
  const auto t2s = normalize_silent(second).transitions();
  for (const auto& t1 : t1s) {
    for (const auto& t2 : t2s) {
      if (t1.is_silent() && t2.is_silent()) continue;
      for (StateIdx sa = 0; sa < ni; ++sa)
        for (int fa = 0; fa < 2; ++fa)
          for (StateIdx sb = 0; sb < ni; ++sb)
            for (int fb = 0; fb < 2; ++fb)
              add(id(t1.first, t2.first, sa, fa == 0), id(t1.second, t2.second, sb, fb == 0),
                  id(t1.first_next, t2.first_next, sa, fa == 0), id(t1.second_next, t2.second_next, sb, fb == 0));
    }
  }

  for (StateIdx x = 0; x < tuples; ++x) {
    auto [q1, q2, slot, top] = parts(x);
    for (StateIdx y = 0; y < tuples; ++y) {
      auto py = parts(y);
      // Family 2: first-protocol output moved away from the tracked input.
      if (top && py.top && out1[q1] != slots[slot]) {
        StateIdx requested = second.shutdown(options.strict_paper_rule2 ? py.q2 : q2);
        add(x, y, id(q1, requested, slot, false), y);
      }
      // Family 3: second component shut down, restart it from the current output.
      if (!top && q2 == bot2 && q1 != bot1) {
        auto fresh = out1[q1];
        add(x, y, id(q1, fresh, static_cast<StateIdx>(slot_of[fresh]), true), y);
      }
      // Family 4: both components shut down.
      if (q1 == bot1 && q2 == bot2) add(x, y, bot, y);
    }
  }

  for (const auto& t : transitions) raw.transitions.push_back({names[t.first], names[t.second], names[t.first_next], names[t.second_next], 0});
  return validate_protocol(raw);
}

Protocol relabel_inputs(const Protocol& composed, const Protocol& first) {
  std::map<std::string, std::string> renames;
  for (auto q : composed.inputs()) {
    if (composed.has_shutdown() && q == composed.bot()) continue;
    const auto& name = composed.state_name(q);
    auto parsed = parse_composed_state(name);
    if (!parsed) throw Error(ErrorCode::UnknownState, "input state " + name + " is not a composed tuple");
    auto q1 = first.find_state(parsed->first);
    if (!q1 || !first.is_input(*q1))
      throw Error(ErrorCode::UnknownState, "first component of " + name + " is not an input of " + first.name());
    renames[name] = parsed->first;
  }
  auto raw = composed.to_raw();
  rename_states(raw, renames);
  return validate_protocol(raw);
}

Protocol compose_protocols(const Protocol& first, const Protocol& second, const PipelineOptions& options) {
  auto disjoint = make_disjoint(first, second);
  auto compatible = ensure_compatible(disjoint.first, disjoint.second);
  auto composed = compose(compatible.first, compatible.second, options.compose);
  return options.relabel ? relabel_inputs(composed, compatible.first) : composed;
}

}  // namespace popproto
