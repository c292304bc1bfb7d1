#pragma once

#include "holetune/depanalysis.hpp"
#include "holetune/instrument.hpp"
#include "holetune/interpreter.hpp"
#include "holetune/model.hpp"
#include "holetune/tunefile.hpp"

#include <string>
#include <vector>

namespace holetune {

inline constexpr const char *kExecutableHeader = "-- holetune-executable v1";
inline constexpr const char *kTuneEnv = "HOLETUNE_TUNE";
inline constexpr const char *kLogEnv = "HOLETUNE_LOG";

/// The program the tuner runs: colored, instrumented and context-expanded,
/// with enough metadata to map tune files onto its `holeValue` slots.
struct TuningExecutable {
  Program program;
  ExpansionInput input;
  std::size_t pointCount = 0;
  int threads = 1;
  /// Indexed by point id - 1; `m<id>@<file>:<line>[<context>]`.
  std::vector<std::string> pointNames;
};

struct BuildOptions {
  bool tailForm = true;
  int threads = 1;
};

struct TuningBuild {
  TuningExecutable executable;
  DependencyAnalysis analysis;
  std::vector<std::string> warnings;
};

TuningBuild buildTuningExecutable(const ProgramModel &model,
                                  const BuildOptions &options = {});

std::string serializeExecutable(const TuningExecutable &exe);
/// Throws Error when the header or metadata is damaged.
TuningExecutable deserializeExecutable(const std::string &text);

/// Values of the `holeValue` slots in lookup-index order.
std::vector<Value> slotValues(const ExpansionInput &input, const Assignment &a);

struct ExecRun {
  Value value;
  ObservationRow observation;
  EvalStats stats;
};

ExecRun runExecutable(const TuningExecutable &exe, const Assignment &a,
                      const std::vector<std::int64_t> &args, CostMode mode,
                      bool checkAsserts = true);

/// Reads the assignment from the file named by HOLETUNE_TUNE (defaults when
/// unset) and writes the log to the file named by HOLETUNE_LOG, if set.
ExecRun runExecutableFromEnvironment(const TuningExecutable &exe,
                                     const std::vector<std::int64_t> &args,
                                     CostMode mode, bool checkAsserts,
                                     std::vector<std::string> &warnings);

/// Coloring plus context expansion with the assignment baked in as literals.
Program compileTuned(const ProgramModel &model, const Assignment &a,
                     int threads = 1);

} // namespace holetune
