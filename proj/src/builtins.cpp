#include "holetune/builtins.hpp"

#include <array>

namespace holetune {

namespace {

constexpr int kNone[] = {-1};
constexpr int kArg0[] = {0};
constexpr int kArg1[] = {1};
constexpr int kArg01[] = {0, 1};
constexpr int kArg012[] = {0, 1, 2};
constexpr int kArg02[] = {0, 2};

constexpr std::span<const int> none() { return std::span<const int>(kNone, 0); }

const std::array kTable = {
    BuiltinInfo{"addi", Builtin::Addi, 2, none(), none()},
    BuiltinInfo{"subi", Builtin::Subi, 2, none(), none()},
    BuiltinInfo{"muli", Builtin::Muli, 2, none(), none()},
    BuiltinInfo{"divi", Builtin::Divi, 2, none(), none()},
    BuiltinInfo{"modi", Builtin::Modi, 2, none(), none()},
    BuiltinInfo{"lti", Builtin::Lti, 2, none(), none()},
    BuiltinInfo{"leqi", Builtin::Leqi, 2, none(), none()},
    BuiltinInfo{"eqi", Builtin::Eqi, 2, none(), none()},
    BuiltinInfo{"length", Builtin::Length, 1, kArg0, none()},
    BuiltinInfo{"get", Builtin::Get, 2, kArg01, none()},
    BuiltinInfo{"set", Builtin::Set, 3, kArg01, none()},
    BuiltinInfo{"cons", Builtin::Cons, 2, kArg1, none()},
    BuiltinInfo{"head", Builtin::Head, 1, none(), none()},
    BuiltinInfo{"tail", Builtin::Tail, 1, kArg0, none()},
    BuiltinInfo{"concat", Builtin::Concat, 2, kArg01, none()},
    BuiltinInfo{"subsequence", Builtin::Subsequence, 3, kArg012, none()},
    BuiltinInfo{"createList", Builtin::CreateList, 2, kArg0, kArg1},
    BuiltinInfo{"createRope", Builtin::CreateRope, 2, kArg0, kArg1},
    BuiltinInfo{"reverse", Builtin::Reverse, 1, kArg0, none()},
    BuiltinInfo{"parMap", Builtin::ParMap, 3, kArg02, kArg1},
    BuiltinInfo{"assert", Builtin::Assert, 1, none(), none()},
    BuiltinInfo{"argInt", Builtin::ArgInt, 1, none(), none()},
    BuiltinInfo{"newCell", Builtin::NewCell, 1, none(), none()},
    BuiltinInfo{"deref", Builtin::Deref, 1, none(), none()},
    BuiltinInfo{"setCell", Builtin::SetCell, 2, none(), none()},
    BuiltinInfo{"newArray", Builtin::NewArray, 2, none(), none()},
    BuiltinInfo{"arrayGet", Builtin::ArrayGet, 2, none(), none()},
    BuiltinInfo{"arraySet", Builtin::ArraySet, 3, none(), none()},
    BuiltinInfo{"threadId", Builtin::ThreadId, 0, none(), none()},
    BuiltinInfo{"holeValue", Builtin::HoleValue, 1, none(), none()},
    BuiltinInfo{"acquireLock", Builtin::AcquireLock, 1, none(), none(), true},
    BuiltinInfo{"releaseLock", Builtin::ReleaseLock, 1, none(), none(), true},
};

} // namespace

const BuiltinInfo *findBuiltin(std::string_view name) {
  for (const auto &b : kTable)
    if (b.name == name)
      return &b;
  return nullptr;
}

const BuiltinInfo &builtinInfo(Builtin id) {
  return kTable[static_cast<std::size_t>(id)];
}

} // namespace holetune
