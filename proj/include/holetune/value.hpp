#pragma once

#include "holetune/ast.hpp"
#include "holetune/scope.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace holetune {

enum class SeqRep { List, Rope };

struct Closure;
struct Cell;
struct Array;
struct EnvNode;
using Env = std::shared_ptr<const EnvNode>;

struct Sequence;

using Value = std::variant<std::int64_t, bool, std::shared_ptr<const Closure>,
                           std::shared_ptr<const Sequence>,
                           std::shared_ptr<Cell>, std::shared_ptr<Array>>;

/// Immutable sequence. Elements live in `store` in reverse order, so element
/// i is store[begin + len - 1 - i]; cons appends to the store when the slice
/// ends at its back, which keeps cons, tail, get and subsequence O(1) in the
/// host. `rep` only influences step costs.
struct Sequence {
  std::shared_ptr<std::vector<Value>> store;
  std::size_t begin = 0;
  std::size_t len = 0;
  SeqRep rep = SeqRep::List;

  const Value &at(std::size_t i) const { return (*store)[begin + len - 1 - i]; }
};

struct Closure {
  const Expr *lambda = nullptr;
  Env env;
};

struct Cell {
  Value value;
};

struct Array {
  std::vector<Value> slots;
};

/// Persistent environment. A recursive-let frame binds `count` consecutive
/// variables starting at `var`; closures for them are materialized on lookup,
/// so frames never form reference cycles.
struct EnvNode {
  VarId var = kNoVar;
  int count = 1;
  Value value;
  const Expr *recGroup = nullptr;
  Env next;
};

std::shared_ptr<const Sequence> makeSequence(std::vector<Value> elems,
                                             SeqRep rep);

/// Structural equality. Closures compare by the origin of their lambda.
bool valuesEqual(const Value &a, const Value &b);

std::string valueToString(const Value &v);

} // namespace holetune
