#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <string_view>

#include "crasp/corpus/tasks.hpp"
#include "crasp/error.hpp"

namespace crasp::corpus {

class SinkError : public Error {
 public:
  using Error::Error;
};

enum class LineFormat { Json, Plain };

struct DatasetSummary {
  std::size_t count = 0;
  std::map<std::size_t, std::size_t> per_length;
  std::uint64_t seed = 0;
  std::string sha256;  // of every byte written to the sink
};

// One line without the trailing newline. Json: {"prompt","trace","answer","meta"};
// Plain: "PROMPT ### trace TRACE".
std::string record_line(const CorpusRecord& r, LineFormat f);
CorpusRecord record_from_json(std::string_view line);

// Streams records 0..count-1 in index order. Workers generate disjoint index
// chunks; the output does not depend on jobs. Throws SinkError when the sink
// fails.
DatasetSummary gen_dataset(const TaskConfig& cfg, std::size_t count, std::ostream& sink,
                           LineFormat f = LineFormat::Json, std::size_t jobs = 1);

std::string sha256_hex(std::string_view data);

}  // namespace crasp::corpus
