#include "popproto/specs.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

namespace popproto {

void PairMultiset::add(const std::string& input, const std::string& output, std::uint32_t k) {
  if (k == 0) return;
  counts_[{input, output}] += k;
  total_ += k;
}

std::uint32_t PairMultiset::count(const std::string& input, const std::string& output) const {
  auto it = counts_.find({input, output});
  return it == counts_.end() ? 0 : it->second;
}

std::uint32_t PairMultiset::marginal(const std::string& input) const {
  std::uint32_t sum = 0;
  for (auto it = counts_.lower_bound({input, std::string()}); it != counts_.end() && it->first.first == input; ++it)
    sum += it->second;
  return sum;
}

std::string format_pairs(const PairMultiset& m) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [key, k] : m.counts()) {
    if (!first) os << ", ";
    first = false;
    os << '(' << key.first << ',' << key.second << "):" << k;
  }
  os << '}';
  return os.str();
}

PairMultiset pairs_multiset(const AgentConfiguration& initial, const AgentConfiguration& final, const Protocol& p) {
  PairMultiset m;
  for (const auto& [agent, q] : final) {
    auto it = initial.find(agent);
    if (it == initial.end())
      throw Error(ErrorCode::DomainMismatch, "agent " + std::to_string(agent) + " missing from the initial configuration");
    m.add(p.state_name(it->second), p.output(q));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

ExprPtr node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

ExprPtr binary(ExprNode::Kind kind, ExprPtr a, ExprPtr b) {
  ExprNode n;
  n.kind = kind;
  n.kids = {std::move(a), std::move(b)};
  return node(std::move(n));
}

bool is_linear(const ExprNode& n) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::Literal:
    case K::PairCount:
    case K::Marginal:
    case K::Total:
    case K::Add:
    case K::Sub:
    case K::Neg:
    case K::Scale: return true;
    default: return false;
  }
}

std::optional<std::int64_t> constant_value(const ExprNode& n) {
  using K = ExprNode::Kind;
  if (n.kind == K::Literal) return n.value;
  if (n.kind == K::Neg) {
    if (auto v = constant_value(*n.kids[0])) return -*v;
  }
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  ExprPtr parse() {
    auto e = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::SyntaxError, what + " at column " + std::to_string(pos_ + 1) + " in '" + text_ + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view s) {
    skip_ws();
    if (text_.compare(pos_, s.size(), s) == 0) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "'");
  }

  std::string peek_word() {
    skip_ws();
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) ++end;
    if (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) return {};
    return text_.substr(pos_, end - pos_);
  }

  bool accept_word(std::string_view w) {
    if (peek_word() == w) {
      pos_ += w.size();
      return true;
    }
    return false;
  }

  ExprPtr parse_or() {
    auto lhs = parse_and();
    while (accept_word("or") || accept("||")) lhs = binary(ExprNode::Kind::Or, lhs, parse_and());
    return lhs;
  }

  ExprPtr parse_and() {
    auto lhs = parse_not();
    while (accept_word("and") || accept("&&")) lhs = binary(ExprNode::Kind::And, lhs, parse_not());
    return lhs;
  }

  ExprPtr parse_not() {
    skip_ws();
    if (accept_word("not") || (text_.compare(pos_, 2, "!=") != 0 && accept("!"))) {
      ExprNode n;
      n.kind = ExprNode::Kind::Not;
      n.kids = {parse_not()};
      return node(std::move(n));
    }
    return parse_bool_primary();
  }

  ExprPtr parse_bool_primary() {
    for (auto [word, value] : {std::pair{"true", 1}, std::pair{"false", 0}}) {
      if (accept_word(word)) {
        ExprNode n;
        n.kind = ExprNode::Kind::BoolConst;
        n.value = value;
        return node(std::move(n));
      }
    }
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      // Either a parenthesised linear term starting a comparison or a
      // parenthesised boolean formula. Try the comparison first.
      auto saved = pos_;
      try {
        return parse_comparison();
      } catch (const Error&) {
        pos_ = saved;
      }
      expect("(");
      auto inner = parse_or();
      expect(")");
      return inner;
    }
    return parse_comparison();
  }

  ExprPtr parse_comparison() {
    auto lhs = parse_linear();
    if (accept_word("mod")) {
      ExprNode n;
      n.kind = ExprNode::Kind::Modulo;
      n.modulus = parse_int();
      expect("=");
      n.residue = parse_int();
      if (n.modulus < 1) fail("modulus must be at least 1");
      if (n.residue < 0 || n.residue >= n.modulus) fail("residue must be in [0, modulus)");
      n.kids = {lhs};
      return node(std::move(n));
    }
    ExprNode n;
    n.kind = ExprNode::Kind::Compare;
    if (accept("!=")) n.op = CmpOp::Ne;
    else if (accept("<=")) n.op = CmpOp::Le;
    else if (accept(">=")) n.op = CmpOp::Ge;
    else if (accept("<")) n.op = CmpOp::Lt;
    else if (accept(">")) n.op = CmpOp::Gt;
    else if (accept("=")) n.op = CmpOp::Eq;
    else fail("expected a comparison operator or 'mod'");
    n.kids = {lhs, parse_linear()};
    return node(std::move(n));
  }

  ExprPtr parse_linear() {
    auto lhs = parse_term();
    for (;;) {
      if (accept("+")) lhs = binary(ExprNode::Kind::Add, lhs, parse_term());
      else if (accept("-")) lhs = binary(ExprNode::Kind::Sub, lhs, parse_term());
      else return lhs;
    }
  }

  ExprPtr parse_term() {
    auto lhs = parse_factor();
    while (accept("*")) {
      auto rhs = parse_factor();
      auto kl = constant_value(*lhs);
      auto kr = constant_value(*rhs);
      if (!kl && !kr) fail("multiplication needs an integer literal operand");
      ExprNode n;
      n.kind = ExprNode::Kind::Scale;
      n.value = kl ? *kl : *kr;
      n.kids = {kl ? rhs : lhs};
      lhs = node(std::move(n));
    }
    return lhs;
  }

  ExprPtr parse_factor() {
    skip_ws();
    if (accept("-")) {
      ExprNode n;
      n.kind = ExprNode::Kind::Neg;
      n.kids = {parse_factor()};
      return node(std::move(n));
    }
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ExprNode n;
      n.kind = ExprNode::Kind::Literal;
      n.value = parse_int();
      return node(std::move(n));
    }
    if (accept("(")) {
      auto inner = parse_linear();
      expect(")");
      return inner;
    }
    if (accept_word("N")) {
      ExprNode n;
      n.kind = ExprNode::Kind::Total;
      return node(std::move(n));
    }
    if (accept_word("n")) {
      expect("(");
      ExprNode n;
      n.input = parse_name();
      if (accept(",")) {
        n.kind = ExprNode::Kind::PairCount;
        n.output = parse_name();
      } else {
        n.kind = ExprNode::Kind::Marginal;
      }
      expect(")");
      return node(std::move(n));
    }
    fail("expected a linear term");
  }

  std::int64_t parse_int() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return std::stoll(text_.substr(start, pos_ - start));
  }

  std::string parse_name() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_) fail("expected a state or output name");
    return text_.substr(start, pos_ - start);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

// Evaluation context: abstracts where the atoms get their values from.
struct EvalContext {
  std::function<std::int64_t(const std::string&, const std::string&)> pair;
  std::function<std::int64_t(const std::string&)> marginal;
  std::int64_t total = 0;
};

std::int64_t eval_linear(const ExprNode& n, const EvalContext& ctx) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::Literal: return n.value;
    case K::PairCount: return ctx.pair(n.input, n.output);
    case K::Marginal: return ctx.marginal(n.input);
    case K::Total: return ctx.total;
    case K::Add: return eval_linear(*n.kids[0], ctx) + eval_linear(*n.kids[1], ctx);
    case K::Sub: return eval_linear(*n.kids[0], ctx) - eval_linear(*n.kids[1], ctx);
    case K::Neg: return -eval_linear(*n.kids[0], ctx);
    case K::Scale: return n.value * eval_linear(*n.kids[0], ctx);
    default: throw Error(ErrorCode::SyntaxError, "boolean node in linear position");
  }
}

bool eval_bool(const ExprNode& n, const EvalContext& ctx) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::BoolConst: return n.value != 0;
    case K::Not: return !eval_bool(*n.kids[0], ctx);
    case K::And: return eval_bool(*n.kids[0], ctx) && eval_bool(*n.kids[1], ctx);
    case K::Or: return eval_bool(*n.kids[0], ctx) || eval_bool(*n.kids[1], ctx);
    case K::Modulo: {
      auto v = eval_linear(*n.kids[0], ctx) % n.modulus;
      if (v < 0) v += n.modulus;
      return v == n.residue;
    }
    case K::Compare: {
      auto a = eval_linear(*n.kids[0], ctx);
      auto b = eval_linear(*n.kids[1], ctx);
      switch (n.op) {
        case CmpOp::Eq: return a == b;
        case CmpOp::Ne: return a != b;
        case CmpOp::Le: return a <= b;
        case CmpOp::Lt: return a < b;
        case CmpOp::Ge: return a >= b;
        case CmpOp::Gt: return a > b;
      }
      return false;
    }
    default: throw Error(ErrorCode::SyntaxError, "linear node in boolean position");
  }
}

void print(const ExprNode& n, std::ostream& os) {
  using K = ExprNode::Kind;
  auto wrap = [&](const ExprNode& k) {
    bool atomic = k.kind == K::Literal || k.kind == K::PairCount || k.kind == K::Marginal || k.kind == K::Total ||
                  k.kind == K::BoolConst;
    if (!atomic) os << '(';
    print(k, os);
    if (!atomic) os << ')';
  };
  switch (n.kind) {
    case K::Literal: os << n.value; break;
    case K::PairCount: os << "n(" << n.input << ',' << n.output << ')'; break;
    case K::Marginal: os << "n(" << n.input << ')'; break;
    case K::Total: os << 'N'; break;
    case K::Add: print(*n.kids[0], os); os << " + "; wrap(*n.kids[1]); break;
    case K::Sub: print(*n.kids[0], os); os << " - "; wrap(*n.kids[1]); break;
    case K::Neg: os << '-'; wrap(*n.kids[0]); break;
    case K::Scale: os << n.value << " * "; wrap(*n.kids[0]); break;
    case K::Compare: {
      static constexpr const char* ops[] = {"=", "!=", "<=", "<", ">=", ">"};
      print(*n.kids[0], os);
      os << ' ' << ops[static_cast<int>(n.op)] << ' ';
      print(*n.kids[1], os);
      break;
    }
    case K::Modulo: wrap(*n.kids[0]); os << " mod " << n.modulus << " = " << n.residue; break;
    case K::BoolConst: os << (n.value ? "true" : "false"); break;
    case K::Not: os << "not "; wrap(*n.kids[0]); break;
    case K::And: wrap(*n.kids[0]); os << " and "; wrap(*n.kids[1]); break;
    case K::Or: wrap(*n.kids[0]); os << " or "; wrap(*n.kids[1]); break;
  }
}

void visit(const ExprNode& n, const std::function<void(const ExprNode&)>& f) {
  f(n);
  for (const auto& k : n.kids) visit(*k, f);
}

void check_tree_shape(const ExprNode& n, bool want_linear) {
  if (is_linear(n) != want_linear)
    throw Error(ErrorCode::SyntaxError, want_linear ? "expected a linear term" : "expected a boolean formula");
  using K = ExprNode::Kind;
  bool kids_linear = n.kind == K::Compare || n.kind == K::Modulo || is_linear(n);
  for (const auto& k : n.kids) check_tree_shape(*k, kids_linear);
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

ExprPtr sum_of(std::vector<ExprPtr> terms) {
  if (terms.empty()) {
    ExprNode zero;
    return node(zero);
  }
  auto acc = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) acc = binary(ExprNode::Kind::Add, acc, terms[i]);
  return acc;
}

ExprPtr compare(ExprPtr a, CmpOp op, ExprPtr b) {
  ExprNode n;
  n.kind = ExprNode::Kind::Compare;
  n.op = op;
  n.kids = {std::move(a), std::move(b)};
  return node(std::move(n));
}

ExprPtr pair_atom(const std::string& i, const std::string& o) {
  ExprNode n;
  n.kind = ExprNode::Kind::PairCount;
  n.input = i;
  n.output = o;
  return node(std::move(n));
}

}  // namespace

SpecExpr SpecExpr::parse(const std::string& text) {
  auto root = Parser(text).parse();
  check_tree_shape(*root, false);
  return SpecExpr(root);
}

std::string SpecExpr::to_string() const {
  std::ostringstream os;
  if (root_) print(*root_, os);
  return os.str();
}

bool SpecExpr::uses_pair_atoms() const {
  bool found = false;
  if (root_) visit(*root_, [&](const ExprNode& n) { found = found || n.kind == ExprNode::Kind::PairCount; });
  return found;
}

Spec make_spec(std::string name, std::vector<std::string> inputs, std::vector<std::string> outputs, SpecExpr formula) {
  if (!is_valid_token(name)) throw Error(ErrorCode::BadToken, "invalid spec name '" + name + "'");
  for (const auto* alphabet : {&inputs, &outputs}) {
    for (const auto& s : *alphabet) {
      if (!is_valid_token(s)) throw Error(ErrorCode::BadToken, "invalid alphabet token '" + s + "'");
      if (s == kBotOutput)
        throw Error(ErrorCode::UnknownPairAtom, "the reserved shutdown token may not appear in a specification");
    }
  }
  if (!formula.root()) throw Error(ErrorCode::SyntaxError, "empty formula");
  visit(*formula.root(), [&](const ExprNode& n) {
    if (n.kind != ExprNode::Kind::PairCount && n.kind != ExprNode::Kind::Marginal) return;
    if (n.input == kBotOutput || n.output == kBotOutput)
      throw Error(ErrorCode::UnknownPairAtom, "the reserved shutdown token may not appear in a specification");
    if (!contains(inputs, n.input))
      throw Error(ErrorCode::UnknownPairAtom, "input '" + n.input + "' not declared in spec " + name);
    if (n.kind == ExprNode::Kind::PairCount && !contains(outputs, n.output))
      throw Error(ErrorCode::UnknownPairAtom, "output '" + n.output + "' not declared in spec " + name);
  });
  auto text = formula.to_string();
  return Spec{std::move(name), std::move(inputs), std::move(outputs), std::move(formula), std::move(text)};
}

Spec make_spec(std::string name, std::vector<std::string> inputs, std::vector<std::string> outputs,
               const std::string& formula_text) {
  auto spec = make_spec(std::move(name), std::move(inputs), std::move(outputs), SpecExpr::parse(formula_text));
  spec.formula_text = formula_text;
  return spec;
}

bool eval_spec(const Spec& s, const PairMultiset& m) {
  for (const auto& [key, k] : m.counts()) {
    if (!contains(s.inputs, key.first) || !contains(s.outputs, key.second))
      throw Error(ErrorCode::UnknownPairAtom,
                  "pair (" + key.first + "," + key.second + ") is outside the alphabets of spec " + s.name);
  }
  EvalContext ctx;
  ctx.pair = [&](const std::string& i, const std::string& o) { return std::int64_t(m.count(i, o)); };
  ctx.marginal = [&](const std::string& i) { return std::int64_t(m.marginal(i)); };
  ctx.total = m.total();
  return eval_bool(*s.formula.root(), ctx);
}

bool eval_predicate(const Spec& s, const std::map<std::string, std::uint32_t>& input_counts) {
  if (s.formula.uses_pair_atoms())
    throw Error(ErrorCode::UnknownPairAtom, "predicate " + s.name + " may only use n(input) and N atoms");
  std::int64_t total = 0;
  for (const auto& [input, k] : input_counts) {
    if (!contains(s.inputs, input))
      throw Error(ErrorCode::UnknownPairAtom, "input '" + input + "' not declared in spec " + s.name);
    total += k;
  }
  EvalContext ctx;
  ctx.pair = [](const std::string&, const std::string&) -> std::int64_t { return 0; };
  ctx.marginal = [&](const std::string& i) {
    auto it = input_counts.find(i);
    return it == input_counts.end() ? std::int64_t(0) : std::int64_t(it->second);
  };
  ctx.total = total;
  return eval_bool(*s.formula.root(), ctx);
}

ComposedSpec make_composed(Spec first, Spec second) {
  std::set<std::string> mid_out(first.outputs.begin(), first.outputs.end());
  std::set<std::string> mid_in(second.inputs.begin(), second.inputs.end());
  if (mid_out != mid_in)
    throw Error(ErrorCode::AlphabetMismatch,
                "outputs of " + first.name + " differ from the inputs of " + second.name);
  return ComposedSpec{std::move(first), std::move(second)};
}

namespace {

// Number of ways to split k agents among b bins, saturating at `cap`.
std::uint64_t compositions(std::uint64_t k, std::uint64_t bins, std::uint64_t cap) {
  // C(k + bins - 1, bins - 1)
  if (bins == 0) return k == 0 ? 1 : 0;
  std::uint64_t r = bins - 1;
  long double v = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    v = v * static_cast<long double>(k + i) / static_cast<long double>(i);
    if (v > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::uint64_t>(v + 0.5L);
}

// Advances `parts` (summing to its fixed total) to the next composition in
// lexicographic order. Returns false after the last one.
bool next_composition(std::vector<std::uint32_t>& parts) {
  // Find the rightmost index i < last with a non-zero entry to the right of it
  // capable of moving: standard "move one unit left-to-right" enumeration.
  auto n = parts.size();
  if (n <= 1) return false;
  // Locate the last non-zero among [0, n-2].
  std::size_t i = n - 1;
  while (i > 0 && parts[i - 1] == 0) --i;
  if (i == 0) return false;
  --i;
  // Move one unit from position i to i+1 and gather the tail into i+1.
  std::uint32_t tail = parts[n - 1];
  parts[n - 1] = 0;
  parts[i] -= 1;
  parts[i + 1] += 1 + tail;
  return true;
}

}  // namespace

bool eval_composed(const ComposedSpec& cs, const PairMultiset& m, std::uint64_t budget) {
  for (const auto& [key, k] : m.counts()) {
    if (!contains(cs.first.inputs, key.first) || !contains(cs.second.outputs, key.second))
      throw Error(ErrorCode::UnknownPairAtom, "pair (" + key.first + "," + key.second + ") is outside the composed alphabets");
  }
  const auto& mids = cs.first.outputs;
  std::vector<std::pair<PairMultiset::Key, std::uint32_t>> entries(m.counts().begin(), m.counts().end());

  std::uint64_t candidates = 1;
  for (const auto& e : entries) {
    auto c = compositions(e.second, mids.size(), budget);
    if (c > budget || candidates > budget / std::max<std::uint64_t>(c, 1))
      throw Error(ErrorCode::BudgetExceeded, "more than " + std::to_string(budget) + " intermediate multisets");
    candidates *= c;
  }
  if (mids.empty()) return m.total() == 0 && eval_spec(cs.first, {}) && eval_spec(cs.second, {});

  // One composition per (a, c) entry, each starting with everything in bin 0.
  std::vector<std::vector<std::uint32_t>> split(entries.size(), std::vector<std::uint32_t>(mids.size(), 0));
  for (std::size_t e = 0; e < entries.size(); ++e) split[e][0] = entries[e].second;

  for (;;) {
    PairMultiset ab, bc;
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const auto& [a, c] = entries[e].first;
      for (std::size_t b = 0; b < mids.size(); ++b) {
        ab.add(a, mids[b], split[e][b]);
        bc.add(mids[b], c, split[e][b]);
      }
    }
    if (eval_spec(cs.first, ab) && eval_spec(cs.second, bc)) return true;

    std::size_t e = 0;
    while (e < entries.size() && !next_composition(split[e])) {
      std::fill(split[e].begin(), split[e].end(), 0);
      split[e][0] = entries[e].second;
      ++e;
    }
    if (e == entries.size()) return false;
  }
}

const std::string& spec_name(const AnySpec& s) {
  return std::visit([](const auto& v) -> const std::string& {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Spec>) return v.name;
    else return v.second.name;
  }, s);
}

const std::vector<std::string>& spec_inputs(const AnySpec& s) {
  return std::visit([](const auto& v) -> const std::vector<std::string>& {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Spec>) return v.inputs;
    else return v.first.inputs;
  }, s);
}

const std::vector<std::string>& spec_outputs(const AnySpec& s) {
  return std::visit([](const auto& v) -> const std::vector<std::string>& {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Spec>) return v.outputs;
    else return v.second.outputs;
  }, s);
}

bool evaluate(const AnySpec& s, const PairMultiset& m) {
  if (const auto* plain = std::get_if<Spec>(&s)) return eval_spec(*plain, m);
  return eval_composed(std::get<ComposedSpec>(s), m);
}

Spec identity_spec(const std::string& name, const std::vector<std::string>& alphabet) {
  std::vector<ExprPtr> zeros;
  ExprNode zero;
  auto zero_ptr = node(zero);
  for (const auto& a : alphabet)
    for (const auto& b : alphabet)
      if (a != b) zeros.push_back(compare(pair_atom(a, b), CmpOp::Eq, zero_ptr));
  ExprPtr root;
  if (zeros.empty()) {
    ExprNode t;
    t.kind = ExprNode::Kind::BoolConst;
    t.value = 1;
    root = node(t);
  } else {
    root = zeros[0];
    for (std::size_t i = 1; i < zeros.size(); ++i) root = binary(ExprNode::Kind::And, root, zeros[i]);
  }
  return make_spec(name, alphabet, alphabet, SpecExpr(root));
}

Spec consensus_spec(const Spec& predicate) {
  std::vector<ExprPtr> trues, falses;
  for (const auto& i : predicate.inputs) {
    trues.push_back(pair_atom(i, "true"));
    falses.push_back(pair_atom(i, "false"));
  }
  ExprNode total;
  total.kind = ExprNode::Kind::Total;
  auto n = node(total);
  ExprNode neg;
  neg.kind = ExprNode::Kind::Not;
  neg.kids = {predicate.formula.root()};
  auto yes = binary(ExprNode::Kind::And, predicate.formula.root(), compare(sum_of(trues), CmpOp::Eq, n));
  auto no = binary(ExprNode::Kind::And, node(neg), compare(sum_of(falses), CmpOp::Eq, n));
  return make_spec(predicate.name + "-consensus", predicate.inputs, {"true", "false"},
                   SpecExpr(binary(ExprNode::Kind::Or, yes, no)));
}

}  // namespace popproto
