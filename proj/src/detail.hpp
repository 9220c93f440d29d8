#pragma once

#include <cstdint>
#include <span>

#include "crasp/program.hpp"
#include "crasp/token.hpp"

namespace crasp::detail {

// Positions are 1-based; w holds the whole sequence.
bool conjunct_holds(std::span<const Token> w, std::size_t i, std::size_t j,
                    const MatchConjunct& c);
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_sub(std::int64_t a, std::int64_t b);
bool compare(CompareOp op, std::int64_t a, std::int64_t b);

}  // namespace crasp::detail
