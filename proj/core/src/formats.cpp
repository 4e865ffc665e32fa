#include "popproto/formats.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <tuple>

#include "popproto/protolib.hpp"

namespace popproto {

namespace {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
  std::string rest;  // text after the first token, for formulas
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  for (int number = 1; std::getline(in, raw); ++number) {
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream words(raw);
    Line line{number, {}, {}};
    for (std::string w; words >> w;) line.tokens.push_back(w);
    if (line.tokens.empty()) continue;
    auto start = raw.find(line.tokens[0]) + line.tokens[0].size();
    auto first = raw.find_first_not_of(" \t\r", start);
    auto last = raw.find_last_not_of(" \t\r");
    if (first != std::string::npos) line.rest = raw.substr(first, last - first + 1);
    lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] void syntax(int line, const std::string& what) {
  throw Error(ErrorCode::SyntaxError, what + " (line " + std::to_string(line) + ")");
}

std::optional<std::string> key_value(const std::string& token, std::string_view key) {
  if (token.size() > key.size() && token.compare(0, key.size(), key) == 0 && token[key.size()] == '=')
    return token.substr(key.size() + 1);
  return std::nullopt;
}

std::uint64_t parse_uint(const std::string& s, int line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) syntax(line, "expected a number, got '" + s + "'");
  return v;
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += " " + x;
  return out;
}

struct SpecBlock {
  Spec spec;
  int line = 0;
};

std::vector<SpecBlock> parse_spec_blocks(const std::vector<Line>& lines, std::size_t from) {
  std::vector<SpecBlock> blocks;
  std::optional<std::string> name;
  std::optional<std::vector<std::string>> inputs, outputs;
  std::optional<std::string> formula;
  int start = 0;
  auto flush = [&](int at) {
    if (!name) return;
    if (!inputs || !outputs || !formula) syntax(at, "spec " + *name + " needs inputs, outputs and formula lines");
    blocks.push_back({make_spec(*name, *inputs, *outputs, *formula), start});
    name.reset();
    inputs.reset();
    outputs.reset();
    formula.reset();
  };
  for (std::size_t i = from; i < lines.size(); ++i) {
    const auto& l = lines[i];
    const auto& head = l.tokens[0];
    if (head == "spec") {
      flush(l.number);
      if (l.tokens.size() != 2) syntax(l.number, "expected 'spec <name>'");
      name = l.tokens[1];
      start = l.number;
      continue;
    }
    if (!name) syntax(l.number, "'" + head + "' outside a spec block");
    if (head == "inputs") {
      inputs = std::vector<std::string>(l.tokens.begin() + 1, l.tokens.end());
    } else if (head == "outputs") {
      outputs = std::vector<std::string>(l.tokens.begin() + 1, l.tokens.end());
    } else if (head == "formula") {
      if (l.rest.empty()) syntax(l.number, "empty formula");
      formula = l.rest;
    } else {
      syntax(l.number, "unknown directive '" + head + "'");
    }
  }
  flush(lines.empty() ? 0 : lines.back().number);
  return blocks;
}

void emit_plain_spec(std::ostringstream& out, const Spec& s) {
  out << "spec " << s.name << "\n";
  out << "inputs" << join(s.inputs) << "\n";
  out << "outputs" << join(s.outputs) << "\n";
  out << "formula " << s.formula.to_string() << "\n";
}

constexpr std::string_view kBuiltinPrefix = "builtin:";

}  // namespace

Protocol parse_protocol(const std::string& text) {
  auto lines = tokenize(text);
  if (lines.empty()) throw Error(ErrorCode::SyntaxError, "empty protocol file");
  RawProtocol raw;
  const auto& header = lines[0];
  if (header.tokens.size() != 3 || header.tokens[0] != "protocol")
    syntax(header.number, "expected 'protocol <name> mode=(plain|shutdown)'");
  raw.name = header.tokens[1];
  auto mode = key_value(header.tokens[2], "mode");
  if (mode == "plain") raw.mode = Mode::Plain;
  else if (mode == "shutdown") raw.mode = Mode::Shutdown;
  else syntax(header.number, "mode must be plain or shutdown");

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    const auto& t = l.tokens;
    if (t[0] == "state") {
      if (t.size() < 3) syntax(l.number, "expected 'state <id> output=<token> [shutdown=<id>] [input]'");
      RawState s;
      s.name = t[1];
      s.line = l.number;
      bool has_output = false;
      for (std::size_t k = 2; k < t.size(); ++k) {
        if (auto v = key_value(t[k], "output"); v && !has_output) {
          s.output = *v;
          has_output = true;
        } else if (auto v2 = key_value(t[k], "shutdown"); v2 && !s.shutdown) {
          s.shutdown = *v2;
        } else if (t[k] == "input" && !s.input) {
          s.input = true;
        } else {
          syntax(l.number, "unexpected '" + t[k] + "' in state line");
        }
      }
      if (!has_output) syntax(l.number, "state " + s.name + " lacks output=");
      raw.states.push_back(std::move(s));
    } else if (t[0] == "bot") {
      if (t.size() != 2) syntax(l.number, "expected 'bot <id>'");
      if (raw.bot) syntax(l.number, "second bot line");
      raw.bot = t[1];
      raw.bot_line = l.number;
    } else if (t[0] == "trans") {
      if (t.size() != 6 || t[3] != "->") syntax(l.number, "expected 'trans <q1> <q2> -> <q1'> <q2'>'");
      raw.transitions.push_back({t[1], t[2], t[4], t[5], l.number});
    } else if (t[0] == "protocol") {
      syntax(l.number, "second protocol header");
    } else {
      syntax(l.number, "unknown directive '" + t[0] + "'");
    }
  }
  return validate_protocol(raw);
}

std::string emit_protocol(const Protocol& p) {
  std::ostringstream out;
  out << "protocol " << p.name() << " mode=" << to_string(p.mode()) << "\n";
  for (StateIdx q = 0; q < p.num_states(); ++q) {
    out << "state " << p.state_name(q) << " output=" << p.output(q);
    if (p.has_shutdown()) out << " shutdown=" << p.state_name(p.shutdown(q));
    if (p.is_input(q)) out << " input";
    out << "\n";
  }
  if (p.has_shutdown()) out << "bot " << p.state_name(p.bot()) << "\n";
  using Names = std::tuple<std::string, std::string, std::string, std::string>;
  std::vector<Names> names;
  for (const auto& t : p.transitions())
    names.emplace_back(p.state_name(t.first), p.state_name(t.second), p.state_name(t.first_next),
                       p.state_name(t.second_next));
  std::sort(names.begin(), names.end());
  for (const auto& [a, b, c, d] : names) out << "trans " << a << " " << b << " -> " << c << " " << d << "\n";
  return out.str();
}

AnySpec parse_spec_file(const std::string& text, const std::filesystem::path& base_dir) {
  auto lines = tokenize(text);
  if (lines.empty()) throw Error(ErrorCode::SyntaxError, "empty spec file");
  if (lines[0].tokens[0] != "composed") {
    auto blocks = parse_spec_blocks(lines, 0);
    if (blocks.size() != 1) syntax(blocks.size() > 1 ? blocks[1].line : 1, "expected exactly one spec block");
    return blocks[0].spec;
  }
  const auto& head = lines[0];
  if (head.tokens.size() != 3) syntax(head.number, "expected 'composed <A> <B>'");
  auto blocks = parse_spec_blocks(lines, 1);
  auto half = [&](const std::string& ref) -> Spec {
    if (!blocks.empty()) {
      for (const auto& b : blocks)
        if (b.spec.name == ref) return b.spec;
      syntax(head.number, "no inline spec named " + ref);
    }
    AnySpec loaded = ref.starts_with(kBuiltinPrefix)
                         ? load_spec(ref)
                         : parse_spec_file(read_file(base_dir / ref), (base_dir / ref).parent_path());
    if (!std::holds_alternative<Spec>(loaded)) syntax(head.number, ref + " is itself a composed spec");
    return std::get<Spec>(loaded);
  };
  if (!blocks.empty() && blocks.size() != 2) syntax(head.number, "a composed spec needs exactly two inline blocks");
  return make_composed(half(head.tokens[1]), half(head.tokens[2]));
}

std::string emit_spec(const AnySpec& spec) {
  std::ostringstream out;
  if (const auto* s = std::get_if<Spec>(&spec)) {
    emit_plain_spec(out, *s);
  } else {
    const auto& cs = std::get<ComposedSpec>(spec);
    out << "composed " << cs.first.name << " " << cs.second.name << "\n";
    emit_plain_spec(out, cs.first);
    emit_plain_spec(out, cs.second);
  }
  return out.str();
}

std::string emit_trace(const Protocol& p, const Trace& trace) {
  std::ostringstream out;
  out << "INIT";
  for (const auto& [a, q] : trace.initial) out << " " << a << "=" << p.state_name(q);
  out << "\n";
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& s = trace.steps[k].step;
    out << "STEP " << k + 1 << " " << to_string(s.kind) << " " << s.agent1;
    if (s.kind == StepKind::Protocol) {
      const auto& t = s.transition;
      out << " " << s.agent2 << " " << p.state_name(t.first) << " " << p.state_name(t.second) << " -> "
          << p.state_name(t.first_next) << " " << p.state_name(t.second_next);
    }
    out << "\n";
  }
  return out.str();
}

Trace parse_trace(const Protocol& p, const std::string& text) {
  auto lines = tokenize(text);
  if (lines.empty() || lines[0].tokens[0] != "INIT") throw Error(ErrorCode::SyntaxError, "trace must start with INIT");
  Trace trace;
  for (std::size_t k = 1; k < lines[0].tokens.size(); ++k) {
    const auto& tok = lines[0].tokens[k];
    auto eq = tok.find('=');
    if (eq == std::string::npos) syntax(lines[0].number, "expected <agent>=<state>, got '" + tok + "'");
    auto agent = static_cast<AgentId>(parse_uint(tok.substr(0, eq), lines[0].number));
    trace.initial[agent] = p.state(tok.substr(eq + 1));
  }
  AgentConfiguration cur = trace.initial;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    const auto& t = l.tokens;
    if (t[0] != "STEP" || t.size() < 4) syntax(l.number, "expected 'STEP <k> <kind> ...'");
    if (parse_uint(t[1], l.number) != trace.steps.size() + 1) syntax(l.number, "step numbers must be consecutive");
    Step step;
    step.agent1 = static_cast<AgentId>(parse_uint(t[3], l.number));
    if (t[2] == "PROTOCOL") {
      if (t.size() != 10 || t[7] != "->") syntax(l.number, "malformed PROTOCOL step");
      step.kind = StepKind::Protocol;
      step.agent2 = static_cast<AgentId>(parse_uint(t[4], l.number));
      step.transition = {p.state(t[5]), p.state(t[6]), p.state(t[8]), p.state(t[9])};
      cur = apply_protocol_step(cur, step.agent1, step.agent2, step.transition);
    } else if (t[2] == "REQUEST" && t.size() == 4) {
      step.kind = StepKind::Request;
      cur = apply_request(cur, step.agent1, p);
    } else if (t[2] == "REMOVE" && t.size() == 4) {
      step.kind = StepKind::Remove;
      cur = apply_removal(cur, step.agent1, p);
    } else {
      syntax(l.number, "unknown step kind '" + t[2] + "'");
    }
    trace.steps.push_back({step, cur});
  }
  return trace;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

Protocol load_protocol(const std::string& ref) {
  if (ref.starts_with(kBuiltinPrefix)) {
    const auto& a = builtin(ref.substr(kBuiltinPrefix.size()));
    if (!a.is_protocol()) throw Error(ErrorCode::UnknownKey, a.key + " is a specification, not a protocol");
    return a.protocol();
  }
  return parse_protocol(read_file(ref));
}

AnySpec load_spec(const std::string& ref) {
  if (ref.starts_with(kBuiltinPrefix)) {
    const auto& a = builtin(ref.substr(kBuiltinPrefix.size()));
    if (a.is_protocol()) throw Error(ErrorCode::UnknownKey, a.key + " is a protocol, not a specification");
    return a.spec();
  }
  std::filesystem::path path(ref);
  return parse_spec_file(read_file(path), path.parent_path());
}

}  // namespace popproto
