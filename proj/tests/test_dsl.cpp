#include "crasp/dsl.hpp"

#include "doctest.h"
#include "random_program.hpp"
#include "test_util.hpp"

using namespace crasp;

TEST_CASE("single count definition") {
  auto p = parse_program("dialect CRASP\nalphabet 0 1\nC1(i) := #[j<=i] Q_1(j)\n");
  REQUIRE(p.defs().size() == 1);
  CHECK(p.defs()[0].name == "C1");
  const auto& c = std::get<Expr::Count>(p.defs()[0].expr->node);
  CHECK_FALSE(c.relation.offset.has_value());
  CHECK(std::get<Expr::SymbolQuery>(c.predicate->node).symbol == p.alphabet().at("1"));
}

TEST_CASE("forward reference is rejected with a location") {
  try {
    parse_program("dialect CRASP\nalphabet 0 1\nC1(i) := #[j<=i] Q_1(j)\nP(i) := C1(i) <= C0(i)\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("C0") != std::string::npos);
  }
}

TEST_CASE("dialect violations") {
  CHECK_THROWS_AS(parse_program("dialect CRASP\nalphabet a\nM(i) := #match[(0,0,0)]\n"), DialectError);
  CHECK_THROWS_AS(parse_program("dialect CRASP_POS\nalphabet a\nM(i) := #match[(0,0,0)]\n"),
                  DialectError);
  CHECK_THROWS_AS(parse_program("dialect CSTAR_RASP\nalphabet a\nP(i) := periodic[2,0](i)\n"),
                  DialectError);
  CHECK_THROWS_AS(parse_program("dialect CRASP\nalphabet a\nP(i) := #[j<=i, i=j+1] Q_a(j)\n"),
                  DialectError);
  CHECK_NOTHROW(parse_program("dialect CRASP_POS\nalphabet a\nP(i) := periodic[2,0](i)\n"));
}

TEST_CASE("syntax and symbol errors") {
  CHECK_THROWS_AS(parse_program("dialect CRASP\nalphabet a\nP(i) := Q_b(i)\n"), ParseError);
  CHECK_THROWS_AS(parse_program("dialect CRASP\nalphabet a\nP(i) := Q_a(i) and\n"), ParseError);
  CHECK_THROWS_AS(parse_program("dialect CRASP\nalphabet a\nP(i) := Q_a(j)\n"), ParseError);
  CHECK_THROWS_AS(parse_program("dialect CRASP\nalphabet a\nP(i) := Q_a(i) + 1\n"), ParseError);
  CHECK_THROWS_AS(parse_program("alphabet a\nP(i) := Q_a(i)\n"), ParseError);
  CHECK_THROWS_AS(parse_program("dialect CRASP\nalphabet a\nC(i) := #[j<=i] (#[j<=i] Q_a(j) >= 1)\n"),
                  ParseError);
}

TEST_CASE("empty program renders as header only") {
  Program p(Dialect::Crasp, SymbolTable{}, {});
  CHECK(render_program(p) == "dialect CRASP\nalphabet\n");
  CHECK(parse_program(render_program(p)) == p);
}

TEST_CASE("canonical rendering is a fixpoint") {
  const char* src =
      "dialect CSTAR_RASP ; header\n"
      "alphabet a \"b c\" <SEP> $ _\n"
      "A(i) := #[j<=i]  Q_a(j)\n"
      "B(i) := ((A(i) <= 3)) and not Q_$(i) or Q__(i)\n"
      "C(i) := if B(i) then A(i) - (A(i) + 1) else 0\n"
      "M(i) := #match[(2,1,0),(0,0,-1)] (Q_\"b c\"(j) or B(j))\n"
      "N(i) := #match[(0,0,+1)] + #[j<=i, i=j] Q_<SEP>(j)\n"
      "G(i) := M(i) = N(i) and #[j<=i, top] true > 2\n";
  auto p = parse_program(src);
  auto text = render_program(p);
  auto q = parse_program(text);
  CHECK(q == p);
  CHECK(render_program(q) == text);
}

TEST_CASE("random programs round-trip") {
  for (auto d : {Dialect::Crasp, Dialect::CraspPos, Dialect::CStarRasp}) {
    testing::RandomProgram gen(7 + static_cast<int>(d), d);
    for (int k = 0; k < 50; ++k) {
      auto p = gen.make(10, 3);
      auto text = render_program(p);
      auto q = parse_program(text);
      CHECK(q == p);
      CHECK(render_program(q) == text);
    }
  }
}

TEST_CASE("parity CoT program parses") {
  auto cp = parse_cot_program(testing::read_file("programs/parity.crasp"));
  CHECK(cp.outputs().size() == 4);
  CHECK(cp.signpost_outputs().empty());
  CHECK(cp.base().find("Flip").has_value());
  CHECK(cp.base().find("EmitEOS").has_value());
  auto text = render_cot_program(cp);
  CHECK(parse_cot_program(text) == cp);
  CHECK_THROWS_AS(parse_program(testing::read_file("programs/parity.crasp")), ParseError);
}

TEST_CASE("CoT clause validation") {
  const char* base = "dialect CSTAR_RASP\nalphabet a <SEP> <EOS>\nT(i) := true\nC(i) := 1\n";
  CHECK_THROWS_AS(parse_cot_program(std::string(base) + "OUTPUT(a) := T\nOUTPUT(a) := T\n"), ParseError);
  CHECK_THROWS_AS(parse_cot_program(std::string(base) + "OUTPUT(a) := C\n"), ParseError);
  CHECK_THROWS_AS(parse_cot_program(std::string(base) + "OUTPUT(a) := U\n"), ParseError);
  CHECK_THROWS_AS(parse_cot_program(std::string(base) + "OUTPUT_SIGNPOST(1, 2) := T\n"), ParseError);
  CHECK_THROWS_AS(parse_cot_program(std::string(base) + "input <SEP>\n"), ParseError);
  CHECK_THROWS_AS(parse_cot_program("dialect CRASP\nalphabet a <SEP> <EOS>\nT(i) := true\n"
                                    "OUTPUT_SIGNPOST(1, 0) := T\n"),
                  DialectError);
  auto cp = parse_cot_program(std::string(base) + "OUTPUT_SIGNPOST(3, -1) := T\n");
  CHECK(cp.signpost_outputs()[0].anchor_offset == 3);
  CHECK(cp.signpost_outputs()[0].direction == -1);
}

TEST_CASE("symbol quoting") {
  CHECK(render_symbol("<SEP>") == "<SEP>");
  CHECK(render_symbol("WRITE(a->b)") == "\"WRITE(a->b)\"");
  CHECK(render_symbol("<a>b") == "\"<a>b\"");
  CHECK(render_symbol("$") == "$");
}
