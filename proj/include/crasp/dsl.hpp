#pragma once

#include <string>
#include <string_view>

#include "crasp/cot.hpp"
#include "crasp/program.hpp"

namespace crasp {

// Grammar: docs/dsl.md. Errors are ParseError with 1-based line/column,
// DialectError or TokenError.
Program parse_program(std::string_view source);
CotProgram parse_cot_program(std::string_view source);

std::string render_program(const Program& p);
std::string render_cot_program(const CotProgram& cp);

// Expression rendering with definition names taken from p; var is "i" or "j".
std::string render_expr(const Program& p, const Expr& e, std::string_view var = "i");
std::string render_symbol(std::string_view symbol);

}  // namespace crasp
