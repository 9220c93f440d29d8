#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "crasp/token.hpp"

namespace crasp {

enum class Dialect { Crasp, CraspPos, CStarRasp };
enum class ValueType { Bool, Count };

std::string_view dialect_name(Dialect d);
std::optional<Dialect> dialect_from_name(std::string_view s);

// i = j + offset; nullopt stands for the always-true relation.
struct LocalRelation {
  std::optional<std::uint32_t> offset;
  friend bool operator==(const LocalRelation&, const LocalRelation&) = default;
};

// token(j - source_offset) == token(i - query_offset) shifted by shift
struct MatchConjunct {
  std::uint32_t source_offset = 0;
  std::uint32_t query_offset = 0;
  std::int32_t shift = 0;
  friend bool operator==(const MatchConjunct&, const MatchConjunct&) = default;
};

enum class CompareOp { Le, Lt, Ge, Gt, Eq };
enum class ArithOp { Add, Sub };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  struct SymbolQuery { SymbolId symbol; };
  struct Ref { std::size_t def; };
  struct Not { ExprPtr operand; };
  struct And { ExprPtr lhs, rhs; };
  struct Or { ExprPtr lhs, rhs; };
  struct Periodic { std::uint32_t modulus; std::uint32_t residue; };
  struct BoolConst { bool value; };
  struct Compare { CompareOp op; ExprPtr lhs, rhs; };
  struct Count { LocalRelation relation; ExprPtr predicate; };
  // predicate may be null, meaning every j qualifies
  struct MatchCount { std::vector<MatchConjunct> conjuncts; ExprPtr predicate; };
  struct Conditional { ExprPtr guard, then_branch, else_branch; };
  struct Arith { ArithOp op; ExprPtr lhs, rhs; };
  struct IntConst { std::int64_t value; };

  using Node = std::variant<SymbolQuery, Ref, Not, And, Or, Periodic, BoolConst,
                            Compare, Count, MatchCount, Conditional, Arith, IntConst>;

  Node node;
  ValueType type;
};

bool structurally_equal(const Expr& a, const Expr& b);
// True when e contains no Count or MatchCount node (a pointwise predicate).
bool is_pointwise(const Expr& e);

// Typed factories. They throw std::invalid_argument on ill-typed operands.
// Ref factories need the referenced type, supplied by the caller.
namespace ex {
ExprPtr q(SymbolId s);
ExprPtr ref(std::size_t def, ValueType t);
ExprPtr not_(ExprPtr e);
ExprPtr and_(ExprPtr a, ExprPtr b);
ExprPtr or_(ExprPtr a, ExprPtr b);
ExprPtr periodic(std::uint32_t m, std::uint32_t r);
ExprPtr truth(bool v);
ExprPtr cmp(CompareOp op, ExprPtr a, ExprPtr b);
ExprPtr count(LocalRelation rel, ExprPtr pred);
ExprPtr match(std::vector<MatchConjunct> conj, ExprPtr pred);
ExprPtr cond(ExprPtr g, ExprPtr a, ExprPtr b);
ExprPtr arith(ArithOp op, ExprPtr a, ExprPtr b);
ExprPtr lit(std::int64_t v);
// Folds; empty any_of is false and empty all_of is true.
ExprPtr any_of(const std::vector<ExprPtr>& es);
ExprPtr all_of(const std::vector<ExprPtr>& es);
ExprPtr sum(const std::vector<ExprPtr>& es);
}  // namespace ex

struct Definition {
  std::string name;
  ExprPtr expr;
};

class Program {
 public:
  Program() = default;
  // Validates names, references, symbols and dialect rules.
  Program(Dialect dialect, SymbolTable alphabet, std::vector<Definition> defs);

  Dialect dialect() const { return dialect_; }
  const SymbolTable& alphabet() const { return alphabet_; }
  const std::vector<Definition>& defs() const { return defs_; }
  std::optional<std::size_t> find(std::string_view name) const;
  ValueType type_of(std::size_t def) const { return defs_.at(def).expr->type; }

  // Checks definition k against the rules given defs[0..k).
  static void check_definition(Dialect d, const SymbolTable& alphabet,
                               const std::vector<Definition>& defs, std::size_t k);

  // Same definitions under another dialect tag; revalidated.
  Program retagged(Dialect d) const { return Program(d, alphabet_, defs_); }

  friend bool operator==(const Program& a, const Program& b);

 private:
  Dialect dialect_ = Dialect::Crasp;
  SymbolTable alphabet_;
  std::vector<Definition> defs_;
  std::unordered_map<std::string, std::size_t> index_;
};

bool is_identifier(std::string_view s);

// Incremental construction helper used by generators of large programs.
class ProgramBuilder {
 public:
  ProgramBuilder(Dialect d, SymbolTable alphabet) : dialect_(d), alphabet_(std::move(alphabet)) {}

  ExprPtr q(std::string_view symbol) const { return ex::q(alphabet_.at(symbol)); }
  // Adds a definition and returns a reference expression to it.
  ExprPtr define(std::string name, ExprPtr e);
  ExprPtr get(std::string_view name) const;
  bool has(std::string_view name) const { return index_.count(std::string(name)) > 0; }
  const SymbolTable& alphabet() const { return alphabet_; }

  Program build() const { return Program(dialect_, alphabet_, defs_); }

 private:
  Dialect dialect_;
  SymbolTable alphabet_;
  std::vector<Definition> defs_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace crasp
