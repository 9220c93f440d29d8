#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "crasp/corpus/rng.hpp"

namespace crasp::corpus {

using BigInt = boost::multiprecision::cpp_int;

enum class BoolKind { Literal, Not, And, Or };

struct BoolNode {
  BoolKind kind = BoolKind::Literal;
  bool value = false;   // literals only
  std::int32_t left = -1;   // Not child, or left operand
  std::int32_t right = -1;  // right operand

  friend bool operator==(const BoolNode&, const BoolNode&) = default;
};

// Flat arena; nodes are stored in post-order, so root is the last node.
struct BoolAst {
  std::vector<BoolNode> nodes;

  std::size_t size() const { return nodes.size(); }
  std::int32_t root() const { return static_cast<std::int32_t>(nodes.size()) - 1; }
  bool evaluate() const { return values().back(); }
  // Truth value of every node, indexed like nodes (post-order).
  std::vector<bool> values() const;

  friend bool operator==(const BoolAst&, const BoolAst&) = default;

  static BoolAst literal(bool v);
  static BoolAst negation(const BoolAst& f);
  static BoolAst binary(BoolKind op, const BoolAst& l, const BoolAst& r);
};

// Number of ASTs with exactly n nodes; n >= 1.
BigInt count_formulas(std::size_t n);
// The AST of size n with the given rank in [0, count_formulas(n)).
BoolAst unrank_formula(std::size_t n, BigInt rank);
BigInt rank_formula(const BoolAst& f);
// Uniform over all ASTs of size n.
BoolAst sample_formula(std::size_t n, Rng& rng);

// `true`, `NOT x`, `( a AND b )`; a composite NOT operand is a binary node and
// carries its own parentheses.
std::string render_naive(const BoolAst& f);
// Post-order signposts starting at `offset`: `<i> lit`, `[ <c> ] <i> NOT x`,
// `( L [ <l> , <r> ] <i> OP R )`. The signpost of node k is offset + k.
std::string render_signpost(const BoolAst& f, std::uint64_t offset = 0);

// Evaluates a naive or signpost rendering; NOT binds tighter than AND, AND
// tighter than OR, parentheses optional. Throws Error when malformed.
bool parse_and_evaluate(std::string_view text);

}  // namespace crasp::corpus
