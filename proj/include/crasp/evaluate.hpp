#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "crasp/program.hpp"
#include "crasp/token.hpp"

namespace crasp {

// values[def][i - 1] is the value of definition def at position i.
// Boolean definitions hold 0 or 1.
struct EvaluationTable {
  std::vector<std::string> names;
  std::vector<ValueType> types;
  std::vector<std::vector<std::int64_t>> values;

  std::int64_t at(std::string_view name, std::size_t position) const;
  std::size_t length() const { return values.empty() ? 0 : values.front().size(); }
};

// Throws TokenError for unknown finite tokens and DialectError for
// signposts in a finite-alphabet dialect.
void check_token(const Program& p, const Token& t);

// Direct column-wise evaluation; match counts scan the whole prefix.
EvaluationTable evaluate(const Program& p, std::span<const Token> w);

// Flattened node graph shared by incremental states.
class EvalPlan;
std::shared_ptr<const EvalPlan> make_plan(const Program& p);

class IncrementalState {
 public:
  explicit IncrementalState(std::shared_ptr<const EvalPlan> plan);
  explicit IncrementalState(const Program& p);
  IncrementalState(IncrementalState&&) noexcept;
  IncrementalState& operator=(IncrementalState&&) noexcept;
  IncrementalState(const IncrementalState&);
  ~IncrementalState();

  // Evaluates every definition at the new last position. On error the state
  // is left unchanged.
  void append(Token t);

  std::size_t length() const { return tokens_.size(); }
  std::int64_t value(std::size_t def) const;
  bool truth(std::size_t def) const { return value(def) != 0; }
  std::span<const Token> tokens() const { return tokens_; }
  const Program& program() const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<Token>& k) const noexcept;
  };
  using MatchIndex = std::unordered_map<std::vector<Token>, std::int64_t, KeyHash>;

  std::shared_ptr<const EvalPlan> plan_;
  std::vector<Token> tokens_;
  std::vector<std::int64_t> values_;   // per node, at the last position
  std::vector<std::int64_t> scratch_;
  std::vector<std::int64_t> history_;  // ring buffers for offset predicates
  std::vector<MatchIndex> match_;
};

inline void evaluate_incremental(IncrementalState& s, Token next) { s.append(next); }

}  // namespace crasp
