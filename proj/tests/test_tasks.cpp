#include "crasp/corpus/dataset.hpp"
#include "crasp/corpus/tasks.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"

using namespace crasp::corpus;

namespace {

std::vector<bool> bits_of(const std::string& s) {
  std::vector<bool> b;
  for (char c : s)
    if (c == '0' || c == '1') b.push_back(c == '1');
  return b;
}

PermInstance s5_example() {
  PermInstance p;
  p.init = {"Book", "Cat", "Hat", "Dog", "Monkey"};
  p.ops = {{0, 1}, {0, 4}, {0, 1}};
  p.ids = {34, 42, 22};
  p.listing = {1, 2, 0};
  return p;
}

PermInstance binary_example() {
  PermInstance p;
  p.init = {"Cat", "Cat", "Cat", "Dog", "Cat"};
  p.ops = {{3, 0}, {2, 4}, {3, 4}};
  p.ids = {32, 7, 6};
  return p;
}

const std::vector<std::pair<Task, Format>> kPairs{
    {Task::Parity, Format::Naive},          {Task::Parity, Format::ValueChange},
    {Task::BooleanEval, Format::Naive},     {Task::BooleanEval, Format::Signpost},
    {Task::S5Perm, Format::Naive},          {Task::S5Perm, Format::Signpost},
    {Task::S5Perm, Format::SignpostTape},   {Task::BinaryPerm, Format::Naive},
    {Task::BinaryPerm, Format::Signpost},   {Task::BinaryPerm, Format::SignpostValueChange}};

}  // namespace

TEST_CASE("parity renderings") {
  auto b = bits_of("0 0 1 0 1 0 0");
  CHECK(render_parity_prompt(b) + " ### trace" == "0 0 1 0 1 0 0 ### trace");
  CHECK(render_parity_trace(b, Format::ValueChange) == "E O E answer E<|endoftext|>");
  CHECK(render_parity_trace(b, Format::Naive) == "E E O O E E E answer E<|endoftext|>");
  CHECK(task_oracle(Task::Parity, "01101100") == "E");
  CHECK(task_oracle(Task::Parity, "0 1 1 1") == "O");
  CHECK_THROWS_AS(task_oracle(Task::Parity, "0 2"), crasp::Error);
}

TEST_CASE("boolean renderings") {
  auto f = BoolAst::literal(false), t = BoolAst::literal(true);
  auto tree = BoolAst::binary(BoolKind::Or, f, BoolAst::negation(BoolAst::binary(BoolKind::And, f, t)));
  CHECK(render_boolean_prompt(tree, Format::Naive) == "( false OR NOT ( false AND true ) )");
  CHECK(render_boolean_trace(tree, Format::Naive) == "F F T F T T answer: T<|endoftext|>");
  CHECK(render_boolean_prompt(tree, Format::Signpost) ==
        "( <0> false [ <0> , <4> ] <5> OR [ <3> ] <4> NOT ( <1> false [ <1> , <2> ] <3> AND <2> true ) )");
  CHECK(render_boolean_trace(tree, Format::Signpost) ==
        "<0> F <1> F <2> T <3> F <4> T <5> T answer: T<|endoftext|>");
  CHECK(task_oracle(Task::BooleanEval, "( NOT true ) AND false") == "F");
}

TEST_CASE("permutation renderings") {
  auto p = s5_example();
  CHECK(render_perm_prompt(p, Format::Signpost) ==
        "init A Book B Cat C Hat D Dog E Monkey operation <34> swap A B <34> . <42> swap A E <42> . "
        "<22> swap A B <22> . end .");
  CHECK(render_perm_prompt(p, Format::SignpostTape) ==
        "init A Book B Cat C Hat D Dog E Monkey tape <34> <42> <22> end operation <42> swap A E . "
        "<22> swap A B . <34> swap A B .");
  // The fold of this instance; each write applies one swap to the previous state.
  CHECK(render_perm_trace(p, Format::SignpostTape) ==
        "load <34> . line <34> swap A B write A Cat B Book C Hat D Dog E Monkey "
        "load <42> . line <42> swap A E write A Monkey B Book C Hat D Dog E Cat "
        "load <22> . line <22> swap A B write A Book B Monkey C Hat D Dog E Cat "
        "load end . end answer Book Monkey Hat Dog Cat<|endoftext|>");

  auto b = binary_example();
  CHECK(render_perm_prompt(b, Format::Naive) ==
        "init A Cat B Cat C Cat D Dog E Cat operation swap D A . swap C E . swap D E . end .");
  CHECK(render_perm_trace(b, Format::Naive) ==
        "swap D A write A Dog B Cat C Cat D Cat E Cat . swap C E write A Dog B Cat C Cat D Cat E Cat . "
        "swap D E write A Dog B Cat C Cat D Cat E Cat . end answer Dog Cat Cat Cat Cat<|endoftext|>");
  CHECK(render_perm_trace(b, Format::Signpost) ==
        "load <32> . line <32> swap D A write A Dog B Cat C Cat D Cat E Cat load <7> . line <7> swap C E write "
        "A Dog B Cat C Cat D Cat E Cat load <6> . line <6> swap D E write A Dog B Cat C Cat D Cat E Cat load end "
        ". end answer Dog Cat Cat Cat Cat<|endoftext|>");
  CHECK(render_perm_trace(b, Format::SignpostValueChange) ==
        "load <32> . <32> swap D A W_D Dog_Cat W_A Cat_Dog load <7> . <7> swap C E K_C K_E load <6> . <6> swap D "
        "E K_D K_E load end . res <A> init Cat IN < OUT final Dog <B> init Cat IN == OUT final Cat <C> init Cat "
        "IN == OUT final Cat <D> init Dog IN < OUT final Cat <E> init Cat IN == OUT final Cat answer Dog Cat Cat "
        "Cat Cat<|endoftext|>");

  CHECK(task_oracle(Task::S5Perm, render_perm_prompt(p, Format::SignpostTape)) == "Book Monkey Hat Dog Cat");
  PermInstance ex;
  ex.init = {"Apple", "Banana", "Cat", "Dog", "Hat"};
  ex.ops = {{0, 4}, {1, 2}};
  CHECK(task_oracle(Task::S5Perm, render_perm_prompt(ex, Format::Naive)) == "Hat Cat Banana Dog Apple");
  CHECK(task_oracle(Task::S5Perm,
                    "init A Tea Cup B Cat C Old Gold Coin D Dog E Hat operation swap A C . end .") ==
        "Old Gold Coin Cat Tea Cup Dog Hat");
  for (const char* bad : {"init A Cat operation end .", "init A a B b C c D d E e operation swap A A . end .",
                          "init A a B b C c D d E e operation swap A B .",
                          "init A a B b C c D d E e tape <1> end operation <2> swap A B ."})
    CHECK_THROWS_AS(task_oracle(Task::S5Perm, bad), crasp::Error);
}

TEST_CASE("object pool has four objects per token length") {
  std::map<std::size_t, std::size_t> by_len;
  for (const auto& o : s5_pool()) ++by_len[static_cast<std::size_t>(std::count(o.begin(), o.end(), ' ')) + 1];
  CHECK(by_len == std::map<std::size_t, std::size_t>{{1, 4}, {2, 4}, {3, 4}});
}

TEST_CASE("generated records are oracle-consistent") {
  for (auto [task, format] : kPairs) {
    TaskConfig cfg;
    cfg.task = task;
    cfg.format = format;
    cfg.min_len = 1;
    cfg.max_len = task == Task::BooleanEval ? 25 : 40;
    cfg.max_test_len = 100;
    cfg.seed = 7;
    cfg.repetitive_ratio = 0.5;
    for (std::uint64_t k = 0; k < 500; ++k) {
      auto r = gen_record(cfg, k);
      auto bad = check_record(r);
      INFO(r.joined());
      CHECK(bad.empty());
      CHECK(r.meta.length >= cfg.min_len);
      CHECK(r.meta.length <= cfg.max_len);
      CHECK(r.meta.position_offset + r.meta.length <= std::max(cfg.max_test_len, r.meta.length));
    }
  }
}

TEST_CASE("corrupted records are rejected") {
  TaskConfig cfg;
  cfg.task = Task::BinaryPerm;
  cfg.format = Format::SignpostValueChange;
  cfg.max_len = 8;
  auto r = gen_record(cfg, 3);
  REQUIRE(check_record(r).empty());
  auto wrong = r;
  wrong.answer = "Cat Cat Cat Cat Cat";
  CHECK_FALSE(check_record(wrong).empty());
  auto flipped = r;
  auto at = flipped.trace.find(" == ");
  if (at != std::string::npos) {
    flipped.trace.replace(at, 4, " < ");
    CHECK_FALSE(check_record(flipped).empty());
  }
  cfg.task = Task::Parity;
  cfg.format = Format::ValueChange;
  auto p = gen_record(cfg, 1);
  p.trace = "E " + p.trace;
  CHECK_FALSE(check_record(p).empty());
}

TEST_CASE("signpost offsets and ids") {
  TaskConfig cfg;
  cfg.task = Task::BooleanEval;
  cfg.format = Format::Signpost;
  cfg.min_len = 5;
  cfg.max_len = 10;
  cfg.max_test_len = 60;
  std::set<std::uint64_t> offsets;
  for (std::uint64_t k = 0; k < 300; ++k) {
    auto r = gen_record(cfg, k);
    CHECK(r.meta.signpost_offset + r.meta.length <= cfg.max_test_len / 2);
    offsets.insert(r.meta.signpost_offset);
  }
  CHECK(offsets.size() > 10);
  cfg.offsets = false;
  CHECK(gen_record(cfg, 0).meta.signpost_offset == 0);
  CHECK(gen_record(cfg, 0).trace.rfind("<0> ", 0) == 0);

  cfg.task = Task::S5Perm;
  cfg.format = Format::SignpostTape;
  cfg.min_len = cfg.max_len = 20;
  cfg.split = Split::Test;
  auto r = gen_record(cfg, 4);
  // at test time the operations block is chronological, so its ids follow the tape
  auto tape = r.prompt.substr(r.prompt.find("tape") + 5);
  tape = tape.substr(0, tape.find(" end"));
  std::string ops;
  std::istringstream in(r.prompt.substr(r.prompt.find("operation")));
  for (std::string w; in >> w;)
    if (w.front() == '<') ops += (ops.empty() ? "" : " ") + w;
  CHECK(ops == tape);
  std::istringstream ids(tape);
  std::set<std::string> distinct;
  for (std::string w; ids >> w;) distinct.insert(w);
  CHECK(distinct.size() == 20);
}

TEST_CASE("repetitive instances repeat the previous swap at the configured rate") {
  TaskConfig cfg;
  cfg.task = Task::S5Perm;
  cfg.format = Format::Naive;
  cfg.min_len = cfg.max_len = 50;
  cfg.repetitive_ratio = 1.0;
  cfg.repeat_prob = 0.9;
  std::size_t repeats = 0, steps = 0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    auto r = gen_record(cfg, k);
    CHECK(r.meta.repetitive);
    std::vector<std::string> ops;
    std::string rest = r.prompt;
    for (auto at = rest.find("swap"); at != std::string::npos; at = rest.find("swap", at + 1))
      ops.push_back(rest.substr(at, 8));
    REQUIRE(ops.size() == 50);
    for (std::size_t j = 1; j < ops.size(); ++j) {
      ++steps;
      repeats += ops[j] == ops[j - 1];
    }
  }
  double p = 0.9, n = static_cast<double>(steps);
  CHECK(std::abs(static_cast<double>(repeats) - n * p) <= 3 * std::sqrt(n * p * (1 - p)));
}

TEST_CASE("binary instances never start all-equal") {
  TaskConfig cfg;
  cfg.task = Task::BinaryPerm;
  cfg.format = Format::Naive;
  cfg.min_len = cfg.max_len = 1;
  for (std::uint64_t k = 0; k < 500; ++k) {
    auto r = gen_record(cfg, k);
    CHECK(r.prompt.find("Cat") != std::string::npos);
    CHECK(r.prompt.find("Dog") != std::string::npos);
  }
}

TEST_CASE("invalid configurations") {
  TaskConfig cfg;
  cfg.task = Task::Parity;
  cfg.format = Format::Signpost;
  CHECK_THROWS_AS(gen_record(cfg, 0), crasp::Error);
  cfg.format = Format::Naive;
  cfg.min_len = 4;
  cfg.max_len = 3;
  CHECK_THROWS_AS(cfg.validate(), crasp::Error);
  CHECK(parse_format("signpost-value-change") == Format::SignpostValueChange);
  CHECK_FALSE(parse_task("s6"));
}

TEST_CASE("datasets are deterministic and independent of the worker count") {
  TaskConfig cfg;
  cfg.task = Task::S5Perm;
  cfg.format = Format::SignpostTape;
  cfg.max_len = 12;
  cfg.seed = 99;
  std::ostringstream a, b, c;
  auto sa = gen_dataset(cfg, 1000, a);
  auto sb = gen_dataset(cfg, 1000, b, LineFormat::Json, 4);
  CHECK(a.str() == b.str());
  CHECK(sa.sha256 == sb.sha256);
  CHECK(sa.sha256 == sha256_hex(a.str()));
  std::size_t total = 0;
  for (auto [len, n] : sa.per_length) total += n;
  CHECK(total == 1000);
  cfg.seed = 100;
  CHECK(gen_dataset(cfg, 1000, c).sha256 != sa.sha256);

  std::istringstream lines(a.str());
  std::string line;
  std::getline(lines, line);
  auto r = record_from_json(line);
  CHECK(r.meta.index == 0);
  CHECK(record_line(r, LineFormat::Json) == line);
  CHECK(record_line(r, LineFormat::Plain) == r.prompt + " ### trace " + r.trace);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
