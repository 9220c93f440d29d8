#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crasp/tm_compiler.hpp"

namespace crasp::tm {

struct ParsedBlock {
  std::size_t state = 0;
  std::vector<std::uint64_t> heads;  // signpost indices
  std::vector<Event> events;         // empty for the halting tail
};

// A generated trace split into its phases.
struct ParsedTrace {
  std::size_t rewind_in_tokens = 0;
  std::vector<ParsedBlock> blocks;   // complete blocks, one per simulated step
  std::optional<ParsedBlock> tail;   // halting configuration
  std::size_t rewind_out_tokens = 0;
  std::size_t output_tokens = 0;     // <SEP> through <EOS>
  TokenSeq answer;                   // tokens between <SEP> and <EOS>
  bool complete = false;             // ends with <EOS>
  bool truncated = false;            // ends inside a phase (budget exhausted)
  std::string error;                 // first well-formedness violation, if any

  std::size_t simulation_tokens(const BlockLayout& l) const { return blocks.size() * l.block_length; }
  std::size_t tail_tokens() const { return tail ? 1 + tail->heads.size() : 0; }
};

ParsedTrace parse_trace(const CompiledTm& c, std::span<const Token> generated);

struct LengthReport {
  std::size_t steps = 0;            // N
  std::size_t input_length = 0;     // |w|
  std::size_t rewind_in_tokens = 0;
  std::size_t simulation_tokens = 0;  // complete blocks: block_length * N
  std::size_t tail_tokens = 0;        // 1 + T
  std::size_t rewind_out_tokens = 0;
  std::size_t output_tokens = 0;      // 2 + 2|output|
  std::size_t total_tokens = 0;       // everything generated after the prompt
  std::size_t bound = 0;              // kLengthConstant * T * max(1, N + |w|)
  bool simulation_ok = false;         // simulation_tokens == block_length * N
  bool output_ok = false;             // output_tokens <= 2 + 2(N + |w|)
  bool bound_ok = false;              // total_tokens <= bound
  bool ok() const { return simulation_ok && output_ok && bound_ok; }
};

LengthReport length_report(const CompiledTm& c, const Word& w, const RunResult& oracle, const ParsedTrace& t,
                           std::size_t total_generated);

struct VerifyOptions {
  std::size_t budget_factor = 10;  // budget = factor * T * (N + |w| + 1)
  std::size_t max_steps = 10000;   // simulator cap; N = cap for non-halting runs
  std::uint64_t offset = 1;        // first signpost index
  bool check_balance = true;
  std::size_t jobs = 1;
};

inline std::size_t generation_budget(const CompiledTm& c, std::size_t steps, std::size_t input_length,
                                     std::size_t factor) {
  return factor * c.layout.tapes * (steps + input_length + 1);
}

struct CaseReport {
  Word input;
  bool tm_halted = false;
  std::size_t tm_steps = 0;
  bool cot_completed = false;
  std::size_t budget = 0;
  std::size_t trace_tokens = 0;
  bool ok = true;
  std::string failure;  // halting, answer, block, step, balance, length, generation
  std::optional<std::size_t> divergent_step;
  std::string detail;
  std::optional<LengthReport> length;  // halting runs only
  std::size_t balance_checks = 0;
};

CaseReport verify_input(const CompiledTm& c, const Word& w, const VerifyOptions& opt = {});

struct VerifyReport {
  std::vector<CaseReport> cases;  // in input order
  std::size_t failures() const;
  bool ok() const { return failures() == 0; }
};

VerifyReport verify_equivalence(const CompiledTm& c, const std::vector<Word>& inputs,
                                const VerifyOptions& opt = {});

// Length accounting of one halting run; throws Error if m does not halt on w
// within max_steps.
LengthReport trace_length_check(const CompiledTm& c, const Word& w, const VerifyOptions& opt = {});

// All words over the input alphabet of length <= max_len, shortest first.
std::vector<Word> all_inputs(const TmSpec& m, std::size_t max_len);

// Human-readable summary lines and JSON lines (first line is a schema header).
std::string report_text(const CompiledTm& c, const VerifyReport& r);
std::string report_jsonl(const CompiledTm& c, const VerifyReport& r);

}  // namespace crasp::tm
