#pragma once

#include "holetune/depanalysis.hpp"
#include "holetune/interpreter.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace holetune {

struct InstrumentOptions {
  /// Keep recursive tail calls in tail position by releasing the lock in the
  /// exits of the recursive group instead of around the point.
  bool tailForm = true;
};

struct InstrumentResult {
  Program program;
  std::vector<std::string> warnings;
  /// Measuring points (indices into the analysis) that use the tail form.
  std::set<std::size_t> tailPoints;
};

/// Vertices whose color cells the point-id switches read.
std::set<std::string> pointCellVertices(const ProgramModel &model,
                                        const DependencyAnalysis &analysis);

/// Wraps every measuring point of the source program in
///   let __mp = acquireLock <id> in let __v = e in
///   let _ = releaseLock __mp in __v
/// where <id> is a literal or a switch over `plan`'s color cells. The result
/// keeps source origins, so coloring and expansion can run on it afterwards.
InstrumentResult instrumentProgram(const ProgramModel &model,
                                   const DependencyAnalysis &analysis,
                                   const CellPlan &plan,
                                   const InstrumentOptions &options = {});

/// One run (or a sum of runs) of an instrumented program. Points that never
/// ran are absent.
struct ObservationRow {
  std::map<int, PointLog> points;
  std::int64_t total = 0;

  std::int64_t cost(int id) const;
  ObservationRow &operator+=(const ObservationRow &o);
  bool operator==(const ObservationRow &) const = default;
};

ObservationRow observe(const InstrumentationState &state, std::int64_t total);

/// Lines `mp <id> <cost> <count>` in id order, then `total <cost>`.
std::string emitLog(const ObservationRow &row);
/// Throws MalformedLog.
ObservationRow parseLog(const std::string &text);

} // namespace holetune
