#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "popproto/model.hpp"

namespace popproto {

/// Multiset of (initial input state, final output value) pairs.
class PairMultiset {
 public:
  using Key = std::pair<std::string, std::string>;

  void add(const std::string& input, const std::string& output, std::uint32_t k = 1);
  std::uint32_t count(const std::string& input, const std::string& output) const;
  /// Sum over all outputs for this input.
  std::uint32_t marginal(const std::string& input) const;
  std::uint32_t total() const noexcept { return total_; }
  const std::map<Key, std::uint32_t>& counts() const noexcept { return counts_; }

  bool operator==(const PairMultiset&) const = default;

 private:
  std::map<Key, std::uint32_t> counts_;
  std::uint32_t total_ = 0;
};

std::string format_pairs(const PairMultiset& m);

/// Pairs (initial(a), o(final(a))) for every agent a still present in `final`.
PairMultiset pairs_multiset(const AgentConfiguration& initial, const AgentConfiguration& final, const Protocol& p);

enum class CmpOp { Eq, Ne, Le, Lt, Ge, Gt };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

// AST of the specification language. Linear nodes produce integers, the rest booleans.
struct ExprNode {
  enum class Kind {
    Literal,   // value
    PairCount, // n(input, output)
    Marginal,  // n(input)
    Total,     // N
    Add,
    Sub,
    Neg,
    Scale,     // value * kids[0]
    Compare,   // kids[0] op kids[1]
    Modulo,    // kids[0] mod modulus = residue
    BoolConst, // value != 0
    Not,
    And,
    Or,
  };

  Kind kind = Kind::Literal;
  std::int64_t value = 0;
  std::string input;
  std::string output;
  CmpOp op = CmpOp::Eq;
  std::int64_t modulus = 1;
  std::int64_t residue = 0;
  std::vector<ExprPtr> kids;
};

/// Boolean combination of linear and modular constraints over pair counts.
class SpecExpr {
 public:
  SpecExpr() = default;
  explicit SpecExpr(ExprPtr root) : root_(std::move(root)) {}

  /// Throws SyntaxError with a column on malformed input.
  static SpecExpr parse(const std::string& text);

  const ExprPtr& root() const noexcept { return root_; }
  std::string to_string() const;
  bool uses_pair_atoms() const;

 private:
  ExprPtr root_;
};

/// A named specification over declared input and output alphabets.
struct Spec {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  SpecExpr formula;
  std::string formula_text;
};

/// Parses the formula and checks atoms against the alphabets. Rejects the
/// reserved shutdown output token anywhere in the alphabets or atoms.
Spec make_spec(std::string name, std::vector<std::string> inputs, std::vector<std::string> outputs,
               const std::string& formula_text);
Spec make_spec(std::string name, std::vector<std::string> inputs, std::vector<std::string> outputs, SpecExpr formula);

/// Throws UnknownPairAtom if m mentions a pair outside the spec's alphabets.
bool eval_spec(const Spec& s, const PairMultiset& m);

/// Evaluates a formula that mentions only n(input) and N on input counts.
bool eval_predicate(const Spec& s, const std::map<std::string, std::uint32_t>& input_counts);

/// Relational composition: `first` relates A-inputs to B-values, `second`
/// relates B-values (as inputs) to C-outputs.
struct ComposedSpec {
  Spec first;
  Spec second;
};

ComposedSpec make_composed(Spec first, Spec second);

inline constexpr std::uint64_t kDefaultComposeBudget = 10'000'000;

/// True iff some assignment of intermediate B-values to the agents of m makes
/// both halves hold. Exhaustive over intermediate multisets; throws BudgetExceeded
/// if their number exceeds `budget`.
bool eval_composed(const ComposedSpec& cs, const PairMultiset& m, std::uint64_t budget = kDefaultComposeBudget);

using AnySpec = std::variant<Spec, ComposedSpec>;

const std::string& spec_name(const AnySpec& s);
const std::vector<std::string>& spec_inputs(const AnySpec& s);
const std::vector<std::string>& spec_outputs(const AnySpec& s);
bool evaluate(const AnySpec& s, const PairMultiset& m);

/// Every agent's output equals its input: conjunction of n(a,b) = 0 over a != b.
Spec identity_spec(const std::string& name, const std::vector<std::string>& alphabet);

/// Turns a predicate on inputs into the specification "everyone outputs true
/// iff the predicate holds" over outputs {true, false}.
Spec consensus_spec(const Spec& predicate);

}  // namespace popproto
