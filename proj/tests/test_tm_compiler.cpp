#include "crasp/dsl.hpp"
#include "crasp/tm_compiler.hpp"
#include "crasp/tm_verify.hpp"

#include <random>
#include <set>

#include "doctest.h"
#include "test_util.hpp"

using namespace crasp;
using namespace crasp::tm;

namespace {

TmSpec fixture(const std::string& name) { return load_tm(testing::read_file("tests/fixtures/" + name)); }

std::string trace_text(const CompiledTm& c, const std::string& w, std::uint64_t offset = 1,
                       std::size_t budget = 10000) {
  auto r = generate(c.program, compiled_prompt(c, c.machine.parse_word(w), offset), budget);
  return tokens_text(c.program.alphabet(), r.trace);
}

void require_all_ok(const VerifyReport& r, const CompiledTm& c) {
  INFO(report_text(c, r));
  CHECK(r.ok());
}

}  // namespace

TEST_CASE("flip machine on 10") {
  auto c = compile(fixture("flip.tm"));
  auto r = generate(c.program, compiled_prompt(c, c.machine.parse_word("10")), 1000);
  REQUIRE(r.completed());
  auto out = deannotate(r.answer);
  CHECK(tokens_text(c.program.alphabet(), out) == "0 1");
  CHECK(trace_text(c, "10") ==
        "REW <1> flip <1> $ WRITE(1->0) flip <2> $ WRITE(0->1) flip <3> $ KEEP halt <3> "
        "REW <2> REW <1> <SEP> 0 <1> 1 <2> <EOS>");
}

TEST_CASE("compiled alphabet") {
  auto m = fixture("palindrome.tm");
  auto c = compile(m);
  const auto& a = c.program.alphabet();
  std::size_t writes = 0;
  for (const auto& name : a.names()) writes += name.rfind("WRITE(", 0) == 0;
  CHECK(writes == m.symbols.size() * (m.symbols.size() - 1));
  std::set<std::string> distinct(a.names().begin(), a.names().end());
  CHECK(distinct.size() == a.size());
  CHECK_FALSE(a.contains("_"));  // the blank is never a token
  for (auto s : m.input) CHECK(c.program.input_alphabet().end() !=
                               std::find(c.program.input_alphabet().begin(), c.program.input_alphabet().end(),
                                         a.at(m.symbols[s])));
  CHECK(c.layout.block_length == 4);
  auto c2 = compile(fixture("copy2.tm"));
  CHECK(c2.layout.block_length == 8);
  CHECK(c2.program.alphabet().contains("<T2>"));
}

TEST_CASE("zero-step machine") {
  auto c = compile(fixture("immediate.tm"));
  CHECK(trace_text(c, "01") == "REW <1> done <1> <SEP> 0 <1> 1 <2> <EOS>");
  CHECK(trace_text(c, "") == "done <1> <SEP> <EOS>");
  auto len = trace_length_check(c, c.machine.parse_word("01"));
  CHECK(len.simulation_tokens == 0);
  CHECK(len.tail_tokens == 2);
  CHECK(len.output_tokens <= 2 + 2 * 2);
  CHECK(len.ok());
}

TEST_CASE("non-halting machine never emits EOS") {
  auto c = compile(fixture("loop.tm"));
  auto r = generate(c.program, compiled_prompt(c, c.machine.parse_word("01")), 10 * 2 + 1000);
  CHECK_FALSE(r.completed());
  CHECK(std::none_of(r.trace.begin(), r.trace.end(), [&](const Token& t) { return t == Token::finite(c.eos); }));
  VerifyOptions opt;
  opt.max_steps = 200;
  require_all_ok(verify_equivalence(c, all_inputs(c.machine, 3), opt), c);
}

TEST_CASE("exhaustive equivalence on the fixture zoo") {
  for (const char* f : {"flip.tm", "increment.tm", "unary_add.tm", "palindrome.tm", "copy2.tm", "reverse2.tm",
                        "duplicate2.tm", "append1.tm", "immediate.tm"}) {
    INFO(f);
    auto c = compile(fixture(f));
    VerifyOptions opt;
    opt.jobs = 2;
    auto rep = verify_equivalence(c, all_inputs(c.machine, 5), opt);
    require_all_ok(rep, c);
    for (const auto& k : rep.cases) {
      REQUIRE(k.length);
      CHECK(k.length->simulation_tokens == c.layout.block_length * k.tm_steps);
      CHECK(k.balance_checks == k.tm_steps * c.layout.tapes);
    }
  }
}

TEST_CASE("two-tape copy on random strings") {
  auto c = compile(fixture("copy2.tm"));
  std::mt19937_64 rng(5);
  std::vector<Word> inputs;
  for (int k = 0; k < 30; ++k) {
    Word w(rng() % 11);
    for (auto& s : w) s = c.machine.input[rng() % c.machine.input.size()];
    inputs.push_back(w);
  }
  require_all_ok(verify_equivalence(c, inputs), c);
}

TEST_CASE("swapping left and right gating is caught at the first distinguishing step") {
  for (const char* f : {"flip.tm", "palindrome.tm", "reverse2.tm"}) {
    INFO(f);
    auto m = fixture(f);
    auto bad = compile(m, {true});
    Word w;
    for (auto s : {0, 1, 1, 0}) w.push_back(m.input[static_cast<std::size_t>(s) % m.input.size()]);
    auto oracle = simulate(m, w, 10000);
    // first step whose L/R move changes some head position
    std::optional<std::size_t> expect;
    for (std::size_t k = 0; k + 1 < oracle.step_log.size() && !expect; ++k)
      for (std::size_t t = 0; t < m.tapes; ++t) {
        auto now = oracle.step_log[k].heads[t], then = oracle.step_log[k + 1].heads[t];
        auto mv = m.transition(oracle.step_log[k].state, oracle.step_log[k].read)->move[t];
        if (mv != Move::S && (now != then || (mv == Move::L && now == 1))) {
          expect = k + 1;
          break;
        }
      }
    REQUIRE(expect);
    auto rep = verify_input(bad, w);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.divergent_step);
    CHECK(*rep.divergent_step == *expect);
  }
}

TEST_CASE("render and re-parse give the same next tokens") {
  std::mt19937_64 rng(11);
  for (const char* f : {"palindrome.tm", "duplicate2.tm"}) {
    auto c = compile(fixture(f));
    auto text = render_cot_program(c.program);
    auto back = parse_cot_program(text);
    CHECK(back == c.program);
    for (int k = 0; k < 50; ++k) {
      Word w(rng() % 7);
      for (auto& s : w) s = c.machine.input[rng() % c.machine.input.size()];
      auto prompt = compiled_prompt(c, w, 1 + rng() % 20);
      auto r = generate(c.program, prompt, 5000);
      TokenSeq full = prompt;
      full.insert(full.end(), r.trace.begin(), r.trace.end());
      auto cut = prompt.size() + rng() % (r.trace.size());
      std::span<const Token> prefix(full.data(), cut);
      CHECK(next_token(back, prefix) == next_token(c.program, prefix));
      CHECK(next_token(c.program, prefix) == full[cut]);
    }
  }
}

TEST_CASE("signpost offsets shift the trace") {
  auto c = compile(fixture("unary_add.tm"));
  for (const char* w : {"", "1+1", "11+1"}) {
    auto word = c.machine.parse_word(w);
    auto a = generate(c.program, compiled_prompt(c, word, 1), 1000).trace;
    auto b = generate(c.program, compiled_prompt(c, word, 38), 1000).trace;
    for (auto& t : a)
      if (t.is_signpost()) t.value += 37;
    CHECK(a == b);
  }
}

TEST_CASE("trace parser rejects malformed blocks") {
  auto c = compile(fixture("flip.tm"));
  auto word = c.machine.parse_word("10");
  auto g = generate(c.program, compiled_prompt(c, word), 1000);
  auto good = parse_trace(c, g.trace);
  CHECK(good.error.empty());
  CHECK(good.complete);
  CHECK(good.blocks.size() == 3);
  auto bad = g.trace;
  bad[4] = Token::finite(c.keep);  // $ of the first block
  CHECK_FALSE(parse_trace(c, bad).error.empty());
  auto cut = parse_trace(c, std::span<const Token>(g.trace.data(), 6));
  CHECK(cut.truncated);
  CHECK(cut.error.empty());
}
