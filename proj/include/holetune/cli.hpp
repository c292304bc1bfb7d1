#pragma once

#include "holetune/interpreter.hpp"
#include "holetune/model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace holetune {

enum ExitCode {
  kExitOk = 0,
  kExitUser = 1,    // bad invocation, syntax, unknown hole, bad tune file
  kExitRuntime = 2, // runtime error or failed assert
  kExitInternal = 3,
};

struct RunOutcome {
  Value value;
  CostReport cost;
  EvalStats stats;
  std::vector<std::string> warnings;
};

/// Default flow: every hole takes its default value. Never reads tune files.
RunOutcome runDefault(const Program &program,
                      const std::vector<std::int64_t> &args,
                      CostMode mode = CostMode::Steps);

/// Tuned flow: coloring and context expansion with the tune file's values
/// baked in. Never measures.
RunOutcome runTuned(const ProgramModel &model, const std::string &tuneFile,
                    const std::vector<std::int64_t> &args,
                    CostMode mode = CostMode::Steps, int threads = 1);

/// `holetune run|tune|analyze|exec ...`; returns the process exit code.
int runCli(const std::vector<std::string> &argv, std::ostream &out,
           std::ostream &err);

} // namespace holetune
