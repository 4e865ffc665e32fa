#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "popproto/composer.hpp"
#include "popproto/formats.hpp"
#include "popproto/protolib.hpp"
#include "support.hpp"

using namespace popproto;

namespace {

std::size_t count_lines(const std::string& text, const std::string& prefix) {
  std::size_t n = 0, pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (text.compare(pos, prefix.size(), prefix) == 0) ++n;
    pos = end == std::string::npos ? text.size() : end + 1;
  }
  return n;
}

ErrorCode parse_error(const std::string& text) {
  try {
    parse_protocol(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parsed:\n" << text;
  return ErrorCode::Io;
}

}  // namespace

TEST(ProtocolFile, RoundTripBuiltins) {
  for (const auto& key : builtin_protocol_keys()) {
    const auto& p = builtin(key).protocol();
    auto text = emit_protocol(p);
    auto back = parse_protocol(text);
    EXPECT_EQ(back, p) << key;
    EXPECT_EQ(emit_protocol(back), text) << key;
  }
  auto c = compose_protocols(builtin("parity").protocol(), builtin("identity3").protocol());
  EXPECT_EQ(parse_protocol(emit_protocol(c)), c);
}

TEST(ProtocolFile, RoundTripRandom) {
  std::mt19937 rng(17);
  for (int i = 0; i < 200; ++i) {
    auto p = oracle::random_protocol(rng, i % 2 == 0);
    auto text = emit_protocol(p);
    EXPECT_EQ(parse_protocol(text), p);
    EXPECT_EQ(emit_protocol(parse_protocol(text)), text);
  }
}

TEST(ProtocolFile, ParityLineCounts) {
  auto text = emit_protocol(builtin("parity").protocol());
  EXPECT_EQ(count_lines(text, "trans "), 13u);
  EXPECT_EQ(count_lines(text, "state "), 6u);
  EXPECT_EQ(count_lines(text, "bot "), 1u);
}

TEST(ProtocolFile, CanonicalTransitionOrder) {
  auto text = emit_protocol(builtin("threshold3").protocol());
  EXPECT_LT(text.find("trans q0 q3"), text.find("trans q1 q1"));
  EXPECT_LT(text.find("trans q1 q3"), text.find("trans q2 q1"));
}

TEST(ProtocolFile, CommentsAndBlankLines) {
  auto p = parse_protocol(
      "# header comment\n"
      "protocol tiny mode=plain   # trailing\n"
      "\n"
      "state a output=x input\n"
      "state b output=y\n"
      "trans a a -> b b\n");
  EXPECT_EQ(p.num_states(), 2u);
  EXPECT_EQ(p.transitions().size(), 1u);
}

TEST(ProtocolFile, UndeclaredStateReportsLine) {
  const std::string text =
      "protocol t mode=plain\n"
      "state q0 output=false\n"
      "state q1 output=false input\n"
      "state q2 output=false\n"
      "trans q1 q9 -> q0 q2\n";
  try {
    parse_protocol(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownState);
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
}

TEST(ProtocolFile, SyntaxErrors) {
  EXPECT_EQ(parse_error(""), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("protocol x mode=weird\n"), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("protocol x mode=plain\nstate a input\n"), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("protocol x mode=plain\nstate a output=x input\ntrans a a b b\n"), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("protocol x mode=plain\nstate a output=x input\nfoo\n"), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("protocol x mode=shutdown\nstate a output=x shutdown=b input\nstate b output=_BOT_ "
                        "shutdown=b input\nbot b\nbot b\n"),
            ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("protocol x mode=shutdown\nstate a output=x input\nstate b output=_BOT_ shutdown=b input\nbot b\n"),
            ErrorCode::ModeMismatch);
  EXPECT_EQ(parse_error("protocol x mode=plain\nstate a output=x input\nstate a output=x\n"), ErrorCode::DuplicateState);
}

TEST(SpecFile, RoundTrip) {
  for (const char* key : {"spec:parity", "spec:identity3", "spec:threshold3", "spec:threshold3-consensus"}) {
    const auto& s = builtin(key).spec();
    auto text = emit_spec(s);
    auto back = parse_spec_file(text);
    EXPECT_EQ(emit_spec(back), text) << key;
  }
  AnySpec cs = make_composed(std::get<Spec>(builtin("spec:parity").spec()),
                             std::get<Spec>(builtin("spec:identity3").spec()));
  auto text = emit_spec(cs);
  EXPECT_EQ(text.rfind("composed parity identity3\n", 0), 0u);
  auto back = parse_spec_file(text);
  ASSERT_TRUE(std::holds_alternative<ComposedSpec>(back));
  EXPECT_EQ(emit_spec(back), text);
}

TEST(SpecFile, ReferenceForm) {
  auto dir = std::filesystem::temp_directory_path() / "popproto_specfile_test";
  std::filesystem::create_directories(dir);
  write_file(dir / "a.spec", emit_spec(builtin("spec:parity").spec()));
  auto cs = parse_spec_file("composed a.spec builtin:spec:identity3\n", dir);
  ASSERT_TRUE(std::holds_alternative<ComposedSpec>(cs));
  EXPECT_EQ(std::get<ComposedSpec>(cs).first.name, "parity");
  EXPECT_EQ(std::get<ComposedSpec>(cs).second.name, "identity3");
  std::filesystem::remove_all(dir);
}

TEST(SpecFile, Errors) {
  EXPECT_THROW(parse_spec_file("spec x\ninputs a\n"), Error);
  EXPECT_THROW(parse_spec_file("inputs a\n"), Error);
  EXPECT_THROW(parse_spec_file("spec x\ninputs a\noutputs b\nformula n(a,c) = 1\n"), Error);
  EXPECT_THROW(parse_spec_file("composed x\n"), Error);
}

TEST(TraceFile, RoundTrip) {
  const auto& p = builtin("parity").protocol();
  RunOptions opts;
  opts.seed = 12;
  auto t = run(p, uniform_configuration(p.state("ODD"), 5), parse_request_script("2:any,4:3"), opts);
  auto text = emit_trace(p, t);
  EXPECT_NE(text.find("REQUEST"), std::string::npos);
  EXPECT_NE(text.find("REMOVE"), std::string::npos);
  auto back = parse_trace(p, text);
  EXPECT_EQ(back.initial, t.initial);
  ASSERT_EQ(back.length(), t.length());
  for (std::size_t k = 0; k < t.length(); ++k) {
    EXPECT_EQ(back.steps[k].step, t.steps[k].step);
    EXPECT_EQ(back.steps[k].after, t.steps[k].after);
  }
  EXPECT_EQ(emit_trace(p, back), text);
}

TEST(TraceFile, InvalidStepRejected) {
  const auto& p = builtin("parity").protocol();
  EXPECT_THROW(parse_trace(p, "INIT 1=ODD 2=ODD\nSTEP 1 PROTOCOL 1 2 ODD even -> ODD odd\n"), Error);
  EXPECT_THROW(parse_trace(p, "INIT 1=ODD\nSTEP 1 REMOVE 1\n"), Error);
  EXPECT_THROW(parse_trace(p, "STEP 1 REMOVE 1\n"), Error);
}

TEST(Load, BuiltinReferences) {
  EXPECT_EQ(load_protocol("builtin:parity"), builtin("parity").protocol());
  EXPECT_THROW(load_protocol("builtin:spec:parity"), Error);
  EXPECT_THROW(load_spec("builtin:parity"), Error);
  EXPECT_THROW(load_protocol("/nonexistent/file.pp"), Error);
}
