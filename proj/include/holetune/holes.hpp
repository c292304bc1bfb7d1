#pragma once

#include "holetune/ast.hpp"
#include "holetune/scope.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace holetune {

inline constexpr const char *kTopVertex = "top";

struct NamedFunction {
  std::string name;
  NodeId lambda = kNoNode; // kNoNode for `top`
  VarId var = kNoVar;
};

/// The functions of a program that become call-graph vertices: every let or
/// recursive-let binding whose right-hand side is a lambda, plus `top` (index
/// 0) for the program body. Anonymous lambdas belong to their innermost named
/// enclosing function.
class FunctionTable {
public:
  FunctionTable(const Program &program, const Bindings &bindings);

  const std::vector<NamedFunction> &functions() const { return functions_; }
  std::size_t size() const { return functions_.size(); }
  const NamedFunction &at(std::size_t i) const { return functions_.at(i); }
  int indexOf(const std::string &name) const;
  /// Innermost named function whose body contains `node` (0 = top).
  int ownerOf(NodeId node) const { return owner_.at(node); }
  /// Function whose defining lambda is `lambda`, or -1.
  int functionOfLambda(NodeId lambda) const;
  int functionOfVar(VarId v) const;

private:
  std::vector<NamedFunction> functions_;
  std::vector<int> owner_;
};

/// A hole as written in the source.
struct BaseHole {
  int id = 0; // 1..n in preorder
  std::string name;
  HoleSpec spec;
  NodeId node = kNoNode;
  std::string home; // innermost enclosing named function, or `top`

  int depth() const { return spec.depth; }
};

std::vector<BaseHole> listHoles(const Program &program);
std::vector<BaseHole> listHoles(const Program &program,
                                const FunctionTable &functions);

/// Replaces every hole by its default value literal.
Program defaultize(const Program &program);

/// Value set a base hole ranges over: {min, min+step, ...} within [min, max],
/// plus the default, ascending. Boolean holes give {0 (false), 1 (true)}.
std::vector<std::int64_t> holeDomain(const HoleSpec &spec);

std::string holeValueText(const HoleSpec &spec, std::int64_t v);

} // namespace holetune
