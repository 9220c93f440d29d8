#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crasp/cot.hpp"
#include "crasp/turing.hpp"

namespace crasp::tm {

struct CompileOptions {
  // Mutation knob for tests: gate left moves on R transitions and vice versa.
  bool swap_left_right = false;
};

// Trace layout. A block is
//   q c_1 .. c_T $ e_1 .. e_T            (T = 1)
//   q c_1 .. c_T $ t_1 e_1 .. t_T e_T    (T > 1)
// so block_length = T + 2 + event_width * T, i.e. 4 for one tape and 2 + 3T
// otherwise. A halting configuration is logged as the tail q c_1 .. c_T.
struct BlockLayout {
  std::size_t tapes = 1;
  std::size_t event_width = 1;  // 1 for one tape, 2 when events carry tape ids
  std::size_t block_length = 4;
  std::size_t output_tape = 1;
};

struct CompiledTm {
  TmSpec machine;
  CotProgram program;
  BlockLayout layout;
  std::vector<SymbolId> state_symbol;             // per machine state
  std::vector<std::optional<SymbolId>> tape_symbol;  // per tape symbol; none for the blank
  std::vector<std::vector<std::optional<SymbolId>>> write_symbol;  // [from][to], none on the diagonal
  std::vector<SymbolId> tape_id;                  // per tape; empty when T = 1
  SymbolId begin, dollar, keep, rew, sep, eos;
  // Balance definitions of the block reader evaluated at each $: [tape][symbol].
  std::vector<std::vector<std::size_t>> balance_defs;
};

CompiledTm compile(const TmSpec& m, const CompileOptions& options = {});

// Annotate(w, offset) over the compiled alphabet; the empty word becomes
// <BEGIN> <offset>.
TokenSeq compiled_prompt(const CompiledTm& c, const Word& w, std::uint64_t offset = 1);

// Constant C of the length bound: generated tokens <= C * T * max(1, N + |w|).
inline constexpr std::size_t kLengthConstant = 16;

}  // namespace crasp::tm
