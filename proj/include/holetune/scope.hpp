#pragma once

#include "holetune/ast.hpp"

#include <string>
#include <vector>

namespace holetune {

using VarId = int;
inline constexpr VarId kNoVar = -1;

/// Lexical binding structure of a program. Every binder (lambda parameter,
/// let, each recursive-let name, match pattern variable) gets a dense VarId.
class Bindings {
public:
  explicit Bindings(const Program &program);

  /// Variable a Var node refers to, or kNoVar for free names (builtins).
  VarId use(NodeId varNode) const { return useOf_.at(varNode); }
  /// Variable introduced by `binder`; `index` selects a recursive-let name.
  VarId binder(NodeId binderNode, int index = 0) const;
  std::size_t varCount() const { return names_.size(); }
  const std::string &name(VarId v) const { return names_.at(v); }
  /// Node that introduces the variable.
  NodeId binderNode(VarId v) const { return binderNodes_.at(v); }
  /// For variables bound by let / recursive let: the right-hand side node.
  NodeId definition(VarId v) const { return definitions_.at(v); }

  /// Free variable names that are not builtins.
  const std::vector<NodeId> &unboundUses() const { return unbound_; }

private:
  std::vector<VarId> useOf_;
  std::vector<VarId> firstVarOf_; // per node, first VarId introduced there
  std::vector<std::string> names_;
  std::vector<NodeId> binderNodes_;
  std::vector<NodeId> definitions_;
  std::vector<NodeId> unbound_;
};

} // namespace holetune
