#pragma once

#include "holetune/ast.hpp"
#include "holetune/value.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace holetune {

enum class CostMode { Steps, Wallclock };

const char *costModeName(CostMode mode);
CostMode parseCostMode(const std::string &text);

struct CostReport {
  std::int64_t total = 0; // steps, or nanoseconds in wallclock mode
  CostMode mode = CostMode::Steps;

  bool operator==(const CostReport &) const = default;
};

struct EvalStats {
  std::int64_t steps = 0;
  std::int64_t calls = 0; // closure applications
  std::int64_t cellReads = 0;
  std::int64_t cellWrites = 0;
  std::int64_t maxDepth = 0; // deepest host recursion of the evaluator

  bool operator==(const EvalStats &) const = default;
};

struct PointLog {
  std::int64_t cost = 0;
  std::int64_t count = 0;

  bool operator==(const PointLog &) const = default;
};

/// State behind the acquireLock/releaseLock intrinsics. Point ids are 1-based;
/// `start` and `log` are indexed by id - 1.
struct InstrumentationState {
  std::int64_t lock = 0;
  std::vector<std::int64_t> start;
  std::vector<PointLog> log;

  explicit InstrumentationState(std::size_t points = 0)
      : start(points, 0), log(points) {}
};

struct EvalOptions {
  CostMode mode = CostMode::Steps;
  std::vector<std::int64_t> args;
  /// Values of raw hole nodes keyed by node id; absent holes use defaults.
  std::map<NodeId, Value> holeValues;
  /// Overrides `holeValues` when set; receives the hole node.
  std::function<Value(const Expr &)> holeResolver;
  /// Flat slot array read by the `holeValue k` intrinsic.
  std::vector<Value> slots;
  std::size_t pointCount = 0;
  /// When false, `assert` never fails.
  bool checkAsserts = true;
  /// Slot the `threadId` intrinsic reports.
  std::int64_t threadId = 0;
  /// Evaluator recursion limit; exceeding it is a RuntimeError.
  std::int64_t depthBudget = 200000;
  /// Called for every application whose head is a closure, after the head and
  /// arguments are evaluated and before the body runs.
  std::function<void(const Expr &app, const Closure &fn)> onCall;
};

struct EvalResult {
  Value value;
  CostReport cost;
  EvalStats stats;
  InstrumentationState instrumentation{0};
};

/// Call-by-value evaluation with proper tail calls. Runs on a dedicated thread
/// with a large stack so that the depth budget, not the host stack, bounds
/// non-tail recursion.
EvalResult evaluate(const Program &program, const EvalOptions &options = {});

/// Steps charged per evaluation by the fixed parts of `parMap`.
inline constexpr std::int64_t kParMapFixedCost = 20;
inline constexpr std::int64_t kParMapChunkCost = 10;

} // namespace holetune
