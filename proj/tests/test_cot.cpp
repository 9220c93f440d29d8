#include "crasp/cot.hpp"
#include "crasp/dsl.hpp"

#include "doctest.h"
#include "test_util.hpp"

using namespace crasp;

namespace {

const CotProgram& parity() {
  static const CotProgram cp = parse_cot_program(testing::read_file("programs/parity.crasp"));
  return cp;
}

std::string run(const std::string& bits) {
  auto w = parse_tokens(parity().alphabet(), bits);
  auto r = generate(parity(), w, 64);
  return tokens_text(parity().alphabet(), r.trace);
}

}  // namespace

TEST_CASE("parity next tokens") {
  const auto& a = parity().alphabet();
  CHECK(next_token(parity(), parse_tokens(a, "1101")) == Token::finite(a.at("E")));
  CHECK(next_token(parity(), parse_tokens(a, "1101 E O E O <SEP>")) == Token::finite(a.at("O")));
}

TEST_CASE("parity traces") {
  CHECK(run("1101") == "E O E O <SEP> O <EOS>");
  CHECK(run("0") == "E <SEP> E <EOS>");
  auto r = generate(parity(), parse_tokens(parity().alphabet(), "1101"), 64);
  CHECK(r.completed());
  CHECK(tokens_text(parity().alphabet(), r.answer) == "O");
  CHECK(r.step_count == 7);
}

TEST_CASE("budget exhaustion") {
  auto r = generate(parity(), parse_tokens(parity().alphabet(), "1101"), 3);
  CHECK_FALSE(r.completed());
  CHECK(r.trace.size() == 3);
  CHECK_THROWS(generate(parity(), parse_tokens(parity().alphabet(), "1"), 0));
}

TEST_CASE("determinism violations surface") {
  auto cp = parse_cot_program(
      "dialect CRASP\nalphabet a b <SEP> <EOS>\nT(i) := true\nU(i) := #[j<=i] true >= 1\n"
      "OUTPUT(a) := T\nOUTPUT(b) := U\n");
  try {
    next_token(cp, TokenSeq{Token::finite(0)});
    FAIL("expected MultipleActive");
  } catch (const GenerationError& e) {
    CHECK(e.kind() == GenerationError::Kind::MultipleActive);
  }
  auto none = parse_cot_program("dialect CRASP\nalphabet a <SEP> <EOS>\nF(i) := false\nOUTPUT(a) := F\n");
  try {
    generate(none, TokenSeq{Token::finite(0)}, 5);
    FAIL("expected ZeroActive");
  } catch (const GenerationError& e) {
    CHECK(e.kind() == GenerationError::Kind::ZeroActive);
    CHECK(e.step() == 1);
  }
}

TEST_CASE("signpost clause errors") {
  auto cp = parse_cot_program(
      "dialect CSTAR_RASP\nalphabet a <SEP> <EOS>\nT(i) := true\nOUTPUT_SIGNPOST(1, -1) := T\n");
  auto kind = [&](TokenSeq w) {
    try {
      next_token(cp, w);
    } catch (const GenerationError& e) {
      return e.kind();
    }
    return GenerationError::Kind::ZeroActive;
  };
  CHECK(kind({Token::finite(0), Token::finite(0)}) == GenerationError::Kind::AnchorNotSignpost);
  CHECK(kind({Token::signpost(1), Token::finite(0)}) == GenerationError::Kind::IndexUnderflow);
  CHECK(next_token(cp, TokenSeq{Token::signpost(5), Token::finite(0)}) == Token::signpost(4));
}

TEST_CASE("annotate and deannotate") {
  TokenSeq ab{Token::finite(0), Token::finite(1)};
  CHECK(annotate(ab, 1) == TokenSeq{Token::finite(0), Token::signpost(1), Token::finite(1),
                                    Token::signpost(2)});
  CHECK(annotate({}, 5).empty());
  auto abc = annotate(TokenSeq{Token::finite(0), Token::finite(1), Token::finite(2)}, 40);
  CHECK(abc[1] == Token::signpost(40));
  CHECK(abc[5] == Token::signpost(42));
  CHECK(deannotate(annotate(ab, 7)) == ab);
  CHECK(deannotate({}).empty());
  TokenSeq gap{Token::finite(0), Token::signpost(7), Token::finite(1), Token::signpost(9)};
  CHECK_THROWS_AS(deannotate(gap), MalformedAnnotation);
  TokenSeq swapped{Token::signpost(7), Token::finite(0)};
  CHECK_THROWS_AS(deannotate(swapped), MalformedAnnotation);
  for (std::uint64_t o = 1; o < 50; o += 7) {
    TokenSeq w;
    for (int k = 0; k < 9; ++k) w.push_back(Token::finite(k % 3));
    CHECK(deannotate(annotate(w, o)) == w);
  }
}

TEST_CASE("flip clauses gated on the previous token stall") {
  auto cp = parse_cot_program(testing::read_file("tests/fixtures/parity_prev_flip.crasp"));
  try {
    generate(cp, parse_tokens(cp.alphabet(), "1101"), 64);
    FAIL("expected ZeroActive");
  } catch (const GenerationError& e) {
    CHECK(e.kind() == GenerationError::Kind::ZeroActive);
    CHECK(e.step() == 2);
  }
}
