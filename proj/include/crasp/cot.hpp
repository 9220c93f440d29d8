#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "crasp/error.hpp"
#include "crasp/evaluate.hpp"
#include "crasp/program.hpp"
#include "crasp/token.hpp"

namespace crasp {

struct OutputClause {
  SymbolId target;
  std::size_t guard;  // definition index
};

struct SignpostClause {
  std::uint32_t anchor_offset;  // k: the anchor sits at position last - k
  std::int32_t direction;       // d in {-1, 0, +1}
  std::size_t guard;
};

class CotProgram {
 public:
  CotProgram(Program base, std::vector<SymbolId> input_alphabet, std::vector<OutputClause> outputs,
             std::vector<SignpostClause> signpost_outputs, SymbolId sep, SymbolId eos);

  const Program& base() const { return base_; }
  const std::vector<SymbolId>& input_alphabet() const { return input_; }
  const std::vector<OutputClause>& outputs() const { return outputs_; }
  const std::vector<SignpostClause>& signpost_outputs() const { return signposts_; }
  SymbolId sep() const { return sep_; }
  SymbolId eos() const { return eos_; }
  const std::shared_ptr<const EvalPlan>& plan() const { return plan_; }
  const SymbolTable& alphabet() const { return base_.alphabet(); }

  friend bool operator==(const CotProgram& a, const CotProgram& b);

 private:
  Program base_;
  std::vector<SymbolId> input_;
  std::vector<OutputClause> outputs_;
  std::vector<SignpostClause> signposts_;
  SymbolId sep_;
  SymbolId eos_;
  std::shared_ptr<const EvalPlan> plan_;
};

class GenerationError : public Error {
 public:
  enum class Kind { ZeroActive, MultipleActive, AnchorNotSignpost, IndexUnderflow };
  GenerationError(Kind kind, std::size_t step, const std::string& detail);
  Kind kind() const { return kind_; }
  // 0 for next_token on a bare prefix, otherwise the 1-based emission step.
  std::size_t step() const { return step_; }

 private:
  Kind kind_;
  std::size_t step_;
};

std::string_view generation_error_name(GenerationError::Kind k);

// Next token for a state whose last position has been evaluated.
Token next_token(const CotProgram& cp, const IncrementalState& state, std::size_t step = 0);
Token next_token(const CotProgram& cp, std::span<const Token> prefix);

struct GenerationResult {
  enum class Status { Completed, BudgetExhausted };
  TokenSeq trace;
  Status status = Status::BudgetExhausted;
  TokenSeq answer;  // tokens strictly between the final SEP and EOS when completed
  std::size_t step_count = 0;

  bool completed() const { return status == Status::Completed; }
};

// Called after each emitted token with the state evaluated at that token.
using GenerationObserver = std::function<void(const IncrementalState&)>;

GenerationResult generate(const CotProgram& cp, std::span<const Token> prompt, std::size_t budget,
                          const GenerationObserver& observer = {});

class MalformedAnnotation : public Error {
 public:
  using Error::Error;
};

TokenSeq annotate(std::span<const Token> w, std::uint64_t start_offset);
TokenSeq deannotate(std::span<const Token> x);

}  // namespace crasp
