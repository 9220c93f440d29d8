#include "crasp/corpus/boolean.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <set>

#include "crasp/error.hpp"
#include "doctest.h"

using namespace crasp::corpus;

namespace {

struct Formula {
  std::string text;  // naive rendering
  bool value;
  BoolKind root;
};

// Direct grammar enumeration, independent of the counting code.
std::vector<Formula> enumerate(std::size_t n) {
  std::vector<Formula> out;
  if (n == 1) return {{"false", false, BoolKind::Literal}, {"true", true, BoolKind::Literal}};
  for (const auto& f : enumerate(n - 1)) out.push_back({"NOT " + f.text, !f.value, BoolKind::Not});
  for (const char* op : {"AND", "OR"})
    for (std::size_t a = 1; a + 1 < n; ++a)
      for (const auto& l : enumerate(a))
        for (const auto& r : enumerate(n - 1 - a)) {
          bool is_and = std::string(op) == "AND";
          bool v = is_and ? l.value && r.value : l.value || r.value;
          out.push_back({"( " + l.text + " " + op + " " + r.text + " )", v, is_and ? BoolKind::And : BoolKind::Or});
        }
  return out;
}

double chi_square_p(const std::map<std::string, std::size_t>& hist, std::size_t categories, std::size_t draws) {
  double expected = static_cast<double>(draws) / static_cast<double>(categories);
  double stat = 0;
  for (const auto& [k, c] : hist) stat += (c - expected) * (c - expected) / expected;
  stat += static_cast<double>(categories - hist.size()) * expected;
  boost::math::chi_squared dist(static_cast<double>(categories - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

BoolAst example_tree() {
  auto f = BoolAst::literal(false), t = BoolAst::literal(true);
  return BoolAst::binary(BoolKind::Or, f, BoolAst::negation(BoolAst::binary(BoolKind::And, f, t)));
}

}  // namespace

TEST_CASE("formula counts match enumeration") {
  CHECK(count_formulas(1) == 2);
  CHECK(count_formulas(2) == 2);
  CHECK(count_formulas(3) == 10);
  for (std::size_t n = 1; n <= 9; ++n) CHECK(count_formulas(n) == enumerate(n).size());
  CHECK_THROWS_AS(count_formulas(0), crasp::Error);
  CHECK(count_formulas(200) > count_formulas(199));
}

TEST_CASE("unrank is a bijection onto the enumerated formulas") {
  for (std::size_t n = 1; n <= 7; ++n) {
    auto all = enumerate(n);
    std::map<std::string, bool> want;
    for (const auto& f : all) want[f.text] = f.value;
    std::set<std::string> seen;
    auto total = count_formulas(n);
    for (BigInt r = 0; r < total; ++r) {
      auto f = unrank_formula(n, r);
      REQUIRE(f.size() == n);
      CHECK(rank_formula(f) == r);
      auto text = render_naive(f);
      REQUIRE(want.count(text));
      CHECK(f.evaluate() == want[text]);
      CHECK(parse_and_evaluate(text) == want[text]);
      seen.insert(text);
    }
    CHECK(seen.size() == all.size());
  }
}

TEST_CASE("sampler is uniform") {
  Rng rng(2024);
  SUBCASE("literals") {
    std::size_t trues = 0;
    const std::size_t draws = 100000;
    for (std::size_t k = 0; k < draws; ++k) trues += sample_formula(1, rng).evaluate();
    CHECK(std::abs(static_cast<double>(trues) - draws / 2.0) < 3 * std::sqrt(draws * 0.25) + 1);
  }
  SUBCASE("chi-square at n = 3 and 5") for (std::size_t n : {3, 5}) {
    CAPTURE(n);
    std::map<std::string, std::size_t> hist;
    const std::size_t draws = 100000;
    for (std::size_t k = 0; k < draws; ++k) ++hist[render_naive(sample_formula(n, rng))];
    CHECK(chi_square_p(hist, enumerate(n).size(), draws) > 0.001);
  }
  SUBCASE("root kinds at n = 7") {
    std::map<BoolKind, std::size_t> roots;
    const std::size_t draws = 50000;
    for (std::size_t k = 0; k < draws; ++k) {
      auto f = sample_formula(7, rng);
      ++roots[f.nodes.back().kind];
    }
    std::map<BoolKind, double> exact;
    for (const auto& f : enumerate(7)) exact[f.root] += 1;
    double total = static_cast<double>(enumerate(7).size());
    for (auto [k, c] : exact) {
      double p = c / total;
      double sigma = std::sqrt(draws * p * (1 - p));
      CHECK(std::abs(static_cast<double>(roots[k]) - draws * p) <= 3 * sigma);
    }
  }
}

TEST_CASE("renderings of the example tree") {
  auto f = example_tree();
  CHECK(render_signpost(f) ==
        "( <0> false [ <0> , <4> ] <5> OR [ <3> ] <4> NOT ( <1> false [ <1> , <2> ] <3> AND <2> true ) )");
  CHECK(render_naive(f) == "( false OR NOT ( false AND true ) )");
  CHECK(render_naive(BoolAst::literal(true)) == "true");
  // post-order: false, false, true, AND, NOT, OR
  std::vector<BoolKind> kinds;
  for (const auto& n : f.nodes) kinds.push_back(n.kind);
  CHECK(kinds == std::vector<BoolKind>{BoolKind::Literal, BoolKind::Literal, BoolKind::Literal, BoolKind::And,
                                       BoolKind::Not, BoolKind::Or});
  CHECK(f.values() == std::vector<bool>{false, false, true, false, true, true});
  CHECK(render_signpost(BoolAst::literal(false), 7) == "<7> false");
  CHECK(parse_and_evaluate(render_signpost(f, 12)));
}

TEST_CASE("formula parser") {
  CHECK_FALSE(parse_and_evaluate("( NOT true ) AND false"));
  CHECK(parse_and_evaluate("true OR false AND false"));
  CHECK(parse_and_evaluate("NOT NOT true"));
  for (const char* bad : {"", "( true", "true )", "true AND", "maybe", "[ <1> true", "true true"})
    CHECK_THROWS_AS(parse_and_evaluate(bad), crasp::Error);
}
