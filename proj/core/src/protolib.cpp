#include "popproto/protolib.hpp"

#include <map>

namespace popproto {

namespace {

Protocol threshold3() {
  RawProtocol raw;
  raw.name = "threshold3";
  raw.mode = Mode::Plain;
  raw.states = {
      {"q0", "false", std::nullopt, false, 0},
      {"q1", "false", std::nullopt, true, 0},
      {"q2", "false", std::nullopt, false, 0},
      {"q3", "true", std::nullopt, false, 0},
  };
  raw.transitions = {
      {"q1", "q1", "q0", "q2", 0}, {"q2", "q1", "q0", "q3", 0}, {"q2", "q2", "q1", "q3", 0},
      {"q0", "q3", "q3", "q3", 0}, {"q1", "q3", "q3", "q3", 0}, {"q2", "q3", "q3", "q3", 0},
  };
  return validate_protocol(raw);
}

// `as_printed` keeps (ODD', odd) -> (bot, even), which loses the token carried by
// ODD'; the default hands it over as (bot, ODD).
Protocol parity(bool as_printed) {
  RawProtocol raw;
  raw.name = as_printed ? "parity-as-printed" : "parity";
  raw.mode = Mode::Shutdown;
  // Primed states report the value of their unprimed counterpart.
  raw.states = {
      {"ODD", "ODD", "even'", true, 0},  {"odd", "odd", "ODD'", false, 0},
      {"ODD'", "ODD", "ODD'", false, 0}, {"even", "even", "ODD'", false, 0},
      {"even'", "even", "even'", false, 0}, {"bot", std::string(kBotOutput), "bot", true, 0},
  };
  raw.bot = "bot";
  raw.transitions = {
      {"ODD", "ODD", "even", "even", 0},    {"ODD", "even", "ODD", "odd", 0},
      {"odd", "even", "even", "even", 0},   {"ODD'", "ODD", "bot", "even", 0},
      {"ODD'", "odd", "bot", as_printed ? "even" : "ODD", 0},
      {"ODD'", "even", "bot", "ODD", 0},
      {"ODD'", "ODD'", "bot", "even'", 0},  {"ODD'", "even'", "bot", "ODD'", 0},
      {"even'", "ODD", "bot", "ODD", 0},    {"even'", "odd", "bot", "even", 0},
      {"even'", "even", "bot", "even", 0},  {"even'", "ODD'", "bot", "ODD'", 0},
      {"even'", "even'", "bot", "even'", 0},
  };
  return validate_protocol(raw);
}

Protocol identity3() {
  RawProtocol raw;
  raw.name = "identity3";
  raw.mode = Mode::Shutdown;
  for (const char* s : {"ODD", "odd", "even"}) raw.states.push_back({s, s, "bot", true, 0});
  raw.states.push_back({"bot", std::string(kBotOutput), "bot", true, 0});
  raw.bot = "bot";
  return validate_protocol(raw);
}

struct Registry {
  std::vector<std::string> order;
  std::map<std::string, NamedArtifact> items;

  void add(NamedArtifact a) {
    order.push_back(a.key);
    auto key = a.key;
    items.emplace(std::move(key), std::move(a));
  }
};

const Registry& registry() {
  static const Registry r = [] {
    Registry reg;
    reg.add({"threshold3", threshold3(), "four-state threshold protocol, output true exactly in q3"});
    reg.add({"parity", parity(false), "parity with shutdown requests; primed states output their unprimed value"});
    reg.add({"parity-as-printed", parity(true), "parity with the (ODD', odd) rule exactly as printed; loses parity"});
    reg.add({"identity3", identity3(), "no transitions, every state is an input and shuts down directly"});
    auto pred = make_spec("threshold3", {"q1"}, {"true", "false"}, "n(q1) >= 3");
    reg.add({"spec:threshold3", AnySpec{pred}, "predicate C(q1) >= 3"});
    reg.add({"spec:threshold3-consensus", AnySpec{consensus_spec(pred)}, "consensus form of spec:threshold3"});
    reg.add({"spec:parity",
             AnySpec{make_spec("parity", {"ODD"}, {"ODD", "odd", "even"},
                               "(N mod 2 = 1 and n(ODD,ODD) = 1 and n(ODD,odd) = N - 1) or "
                               "(N mod 2 = 0 and n(ODD,even) = N)")},
             "one ODD and the rest odd for odd N, all even otherwise"});
    reg.add({"spec:identity3", AnySpec{identity_spec("identity3", {"ODD", "odd", "even"})},
             "every agent outputs its input"});
    return reg;
  }();
  return r;
}

}  // namespace

const NamedArtifact& builtin(const std::string& key) {
  const auto& r = registry();
  auto it = r.items.find(key);
  if (it == r.items.end()) throw Error(ErrorCode::UnknownKey, "no builtin named '" + key + "'");
  return it->second;
}

std::vector<std::string> builtin_keys() { return registry().order; }

std::vector<std::string> builtin_protocol_keys() {
  std::vector<std::string> keys;
  for (const auto& k : registry().order)
    if (registry().items.at(k).is_protocol()) keys.push_back(k);
  return keys;
}

}  // namespace popproto
