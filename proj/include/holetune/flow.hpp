#pragma once

#include "holetune/ast.hpp"
#include "holetune/holes.hpp"
#include "holetune/scope.hpp"

#include <set>
#include <vector>

namespace holetune {

/// Abstract value of 0-CFA extended with hole data-flow: the lambdas a term
/// may evaluate to and the base holes (1-based ids) its value depends on.
/// Sequences and cells are not distinguished from their elements.
struct AbstractValue {
  std::set<NodeId> lambdas;
  std::set<int> deps;

  bool operator==(const AbstractValue &) const = default;
};

struct FlowFacts {
  std::vector<AbstractValue> nodes;
  std::vector<AbstractValue> vars;
  /// Per App node: lambdas applied there, including function arguments that
  /// a builtin applies.
  std::vector<std::set<NodeId>> applied;
  int rounds = 0;

  const std::set<int> &dataDeps(NodeId n) const { return nodes.at(n).deps; }
  const std::set<NodeId> &flowTargets(NodeId n) const {
    return nodes.at(n).lambdas;
  }
};

/// Least fixpoint by round-robin iteration over the program in preorder.
FlowFacts dataFlow(const Program &program, const Bindings &bindings,
                   const std::vector<BaseHole> &holes);
FlowFacts dataFlow(const Program &program);

/// Builtin heading an App node, or nullptr for closure applications.
const struct BuiltinInfo *appBuiltin(const Program &program,
                                     const Bindings &bindings, const Expr &app);

} // namespace holetune
