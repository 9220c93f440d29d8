#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crasp/error.hpp"

namespace crasp::tm {

enum class Move { L, R, S };

using Word = std::vector<std::size_t>;  // symbol ids into the tape alphabet

struct Transition {
  std::size_t next;
  std::vector<std::size_t> write;
  std::vector<Move> move;
};

// Multi-tape deterministic machine with one-sided tapes. States and symbols
// are referred to by dense ids; names are kept for rendering.
class TmSpec {
 public:
  std::vector<std::string> states;
  std::vector<std::string> symbols;  // tape alphabet, includes the blank
  std::vector<std::size_t> input;    // input alphabet, ids into symbols
  std::size_t blank = 0;
  std::size_t start = 0;
  std::vector<bool> halting;  // per state
  std::size_t tapes = 1;
  std::size_t output_tape = 1;  // 1-based

  // Table over (non-halting state, symbol vector); call validate() after
  // filling it.
  void set_transition(std::size_t state, const std::vector<std::size_t>& read, Transition t);
  const Transition* transition(std::size_t state, const std::vector<std::size_t>& read) const;
  // Checks alphabets, reserved names, ranges and totality. Throws TmLoadError.
  void validate() const;

  std::size_t state_id(std::string_view name) const;
  std::size_t symbol_id(std::string_view name) const;
  bool is_input_symbol(std::size_t s) const;

  // Every (state, read vector) key with its transition, in table order.
  struct Rule {
    std::size_t state;
    std::vector<std::size_t> read;
    const Transition* action;
  };
  std::vector<Rule> rules() const;

  // Whitespace-separated names, or single characters when the text has no
  // whitespace.
  Word parse_word(std::string_view text) const;
  std::string word_text(const Word& w) const;

 private:
  std::size_t key(std::size_t state, const std::vector<std::size_t>& read) const;
  std::vector<std::optional<Transition>> delta_;
};

class TmLoadError : public Error {
 public:
  TmLoadError(const std::string& msg, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + msg : msg) {}
};

// Machine description format: docs/machine-format.md.
TmSpec load_tm(std::string_view source);

struct Event {
  bool write = false;
  std::size_t from = 0, to = 0;  // meaningful when write
  friend bool operator==(const Event&, const Event&) = default;
};

struct StepRecord {
  std::size_t state;
  std::vector<std::size_t> heads;  // 1-based cells, one per tape
  std::vector<std::size_t> read;   // symbol under each head
  std::vector<Event> events;       // one per tape
};

struct RunResult {
  bool halted = false;
  std::size_t steps = 0;
  std::optional<Word> output;
  std::vector<StepRecord> step_log;
  std::size_t final_state = 0;
  std::vector<std::size_t> final_heads;
  std::vector<std::map<std::size_t, std::size_t>> final_tapes;  // non-blank cells only
};

RunResult simulate(const TmSpec& m, const Word& w, std::size_t max_steps);

struct ValueChange {
  std::size_t tape;  // 1-based
  std::size_t step;  // 0-based step index
  std::size_t cell;
  std::size_t from, to;
};

// Per-tape write events where a cell actually changed, in step order.
std::vector<std::vector<ValueChange>> value_change_log(const RunResult& r);

}  // namespace crasp::tm
