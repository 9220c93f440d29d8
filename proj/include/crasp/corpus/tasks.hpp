#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crasp/corpus/boolean.hpp"
#include "crasp/corpus/rng.hpp"

namespace crasp::corpus {

enum class Task { Parity, BooleanEval, S5Perm, BinaryPerm };
enum class Format { Naive, ValueChange, Signpost, SignpostTape, SignpostValueChange };
enum class Split { Train, Test };

std::string_view task_name(Task t);      // parity, boolean, s5, binary
std::string_view format_name(Format f);  // naive, value-change, signpost, signpost-tape, signpost-value-change
std::string_view split_name(Split s);
std::optional<Task> parse_task(std::string_view s);
std::optional<Format> parse_format(std::string_view s);
std::optional<Split> parse_split(std::string_view s);
bool valid_pair(Task t, Format f);

inline constexpr std::string_view kTraceMarker = " ### trace ";
inline constexpr std::string_view kEndOfText = "<|endoftext|>";

struct TaskConfig {
  Task task = Task::Parity;
  Format format = Format::Naive;
  std::size_t min_len = 1;
  std::size_t max_len = 10;
  std::size_t max_test_len = 100;
  std::uint64_t seed = 0;
  double repetitive_ratio = 0.0;  // permutation tasks: share of repetitive instances
  double repeat_prob = 0.9;       // per-step repeat chance inside a repetitive instance
  Split split = Split::Train;     // SignpostTape shuffles the operations block at train time
  bool offsets = true;            // draw o_p and o_c; off gives 0 and the task's base index

  // Throws Error on an invalid pair or inconsistent bounds.
  void validate() const;
};

struct RecordMeta {
  Task task = Task::Parity;
  Format format = Format::Naive;
  std::size_t length = 0;
  std::uint64_t seed = 0;   // per-record stream seed
  std::uint64_t index = 0;
  std::uint64_t position_offset = 0;  // o_p
  std::uint64_t signpost_offset = 0;  // o_c (Boolean signposts)
  bool repetitive = false;
  Split split = Split::Train;
};

struct CorpusRecord {
  std::string prompt;  // without the trace marker
  std::string trace;   // ends with the end-of-text marker
  std::string answer;  // canonical answer
  RecordMeta meta;

  // "PROMPT ### trace TRACE"
  std::string joined() const { return prompt + std::string(kTraceMarker) + trace; }
};

// Parity: bits as 0/1. Answers E / O.
std::string render_parity_prompt(const std::vector<bool>& bits);
std::string render_parity_trace(const std::vector<bool>& bits, Format f);

// Boolean: answers T / F.
std::string render_boolean_prompt(const BoolAst& f, Format fmt, std::uint64_t signpost_offset = 0);
std::string render_boolean_trace(const BoolAst& f, Format fmt, std::uint64_t signpost_offset = 0);

// Five variables A..E; a swap exchanges the objects of two variables and is
// rendered `swap X Y` in the order given.
inline constexpr std::size_t kVariables = 5;
using PermState = std::array<std::string, kVariables>;

struct PermInstance {
  PermState init;
  std::vector<std::pair<int, int>> ops;  // chronological
  std::vector<std::uint64_t> ids;        // signpost ids per op (signpost formats)
  std::vector<std::size_t> listing;      // SignpostTape: order of the operations block
};

// S5 pool: four objects each of one, two and three tokens.
const std::vector<std::string>& s5_pool();
inline const std::array<std::string, 2> kBinaryObjects{"Cat", "Dog"};

PermState apply_swaps(const PermState& init, const std::vector<std::pair<int, int>>& ops);
std::string render_perm_prompt(const PermInstance& p, Format f);
std::string render_perm_trace(const PermInstance& p, Format f);
// Objects of A..E separated by spaces.
std::string perm_answer(const PermState& s);

// Answer from the task definition applied to a rendered prompt (any format of
// the task). Parity also accepts an unspaced bit string. Throws Error when
// the prompt is malformed.
std::string task_oracle(Task t, std::string_view prompt);
// Answer embedded in a trace: the text after `answer` / `answer:` up to the
// end-of-text marker. Throws Error if absent.
std::string trace_answer(std::string_view trace);

// Record `index` of the dataset: pure in (cfg, index).
CorpusRecord gen_record(const TaskConfig& cfg, std::uint64_t index);

// Problems found when checking a record against the oracle and the format
// laws; empty when consistent.
std::vector<std::string> check_record(const CorpusRecord& r);

}  // namespace crasp::corpus
