#pragma once

#include <fstream>
#include <sstream>
#include <string>

namespace testing {

inline std::string read_file(const std::string& rel) {
  std::ifstream in(std::string(CRASP_SOURCE_DIR) + "/" + rel);
  if (!in) throw std::runtime_error("cannot open " + rel);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace testing
