#pragma once

#include "holetune/ast.hpp"

#include <string>
#include <string_view>

namespace holetune {

/// Parses a `.hl` source text. Throws SyntaxError with the offending
/// line/column.
Program parse(std::string_view source, std::string file = {});

/// Parses a single expression tree without numbering it.
ExprPtr parseExpr(std::string_view source);

Program parseFile(const std::string &path);

} // namespace holetune
