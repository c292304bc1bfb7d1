#pragma once

#include "holetune/ast.hpp"

#include <string>

namespace holetune {

/// Renders an expression as parseable source; parse(prettyPrint(e)) yields a
/// structurally equal tree.
std::string prettyPrint(const Expr &e);
std::string prettyPrint(const Program &p);

std::string holeSpecText(const HoleSpec &spec);

} // namespace holetune
