#pragma once

#include <span>
#include <string_view>

namespace holetune {

enum class Builtin {
  Addi,
  Subi,
  Muli,
  Divi,
  Modi,
  Lti,
  Leqi,
  Eqi,
  Length,
  Get,
  Set,
  Cons,
  Head,
  Tail,
  Concat,
  Subsequence,
  CreateList,
  CreateRope,
  Reverse,
  ParMap,
  Assert,
  ArgInt,
  // Bookkeeping intrinsics emitted by the transformations.
  NewCell,
  Deref,
  SetCell,
  NewArray,
  ArrayGet,
  ArraySet,
  ThreadId,
  HoleValue,
  AcquireLock,
  ReleaseLock,
};

struct BuiltinInfo {
  std::string_view name;
  Builtin id;
  int arity;
  /// Argument positions whose values the step cost depends on. A call is a
  /// measuring-point candidate iff this is non-empty.
  std::span<const int> costArgs;
  /// Argument positions that the builtin applies as functions.
  std::span<const int> fnArgs;
  /// Lock intrinsics: the call and its arguments are never charged.
  bool free = false;
};

/// nullptr when `name` is not a builtin.
const BuiltinInfo *findBuiltin(std::string_view name);
const BuiltinInfo &builtinInfo(Builtin id);

} // namespace holetune
