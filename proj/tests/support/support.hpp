#pragma once

#include "holetune/callgraph.hpp"
#include "holetune/context.hpp"
#include "holetune/depanalysis.hpp"
#include "holetune/interpreter.hpp"
#include "holetune/model.hpp"
#include "holetune/pipeline.hpp"
#include "holetune/tunefile.hpp"
#include "holetune/tuner.hpp"

#include <random>
#include <string>
#include <vector>

namespace holetune::testing {

using Rng = std::mt19937_64;

std::string programPath(const std::string &name);
ProgramModel loadModel(const std::string &name);
ProgramModel modelFromSource(const std::string &source,
                             const std::string &file = "test.hl");

/// The graph of the running example with single-letter labels: A calls C (a)
/// and B (b), B calls C (f), C calls itself (e) and D twice (c, d). Entry A,
/// hole 1 homed at D.
CallGraph callsGraph(int depth = 3);

/// Every walk of labels from an entry to `to` with at most `maxLen` labels.
std::vector<ContextString> callStrings(const CallGraph &g, const std::string &to,
                                       std::size_t maxLen);

/// Search-space shapes over Boolean holes: one point reading all n holes;
/// n points with one hole each; h1,h2-m1, h2,h3-m2, h4-m3.
DependencyGraph fullyDependentGraph(int n);
DependencyGraph independentGraph(int n);
DependencyGraph partialGraph();
Domains booleanDomains(std::size_t n);

struct RandomGraphOptions {
  int maxVertices = 8;
  int maxEdges = 14;
  bool acyclic = false;
  /// Export a random subset of vertices through sentinels.
  bool sentinels = false;
};

/// Vertices v0..vk with v0 the entry; labels `<from>/<k>`. No holes.
CallGraph randomCallGraph(Rng &rng, const RandomGraphOptions &options = {});

/// A walk from an entry along random edges. With sentinels in the graph a
/// step may restart at a sentinel edge. Never empty when some edge leaves an
/// entry.
std::vector<std::string> randomWalk(const CallGraph &g, Rng &rng,
                                    std::size_t maxSteps);

/// Context of a hole at `home` after `walk`, computed from the explicit
/// traversal history: follow the most recent edge into each vertex backwards,
/// stop at depth, at a vertex never entered or entered through a sentinel,
/// and after the label leading into an already visited vertex.
ContextString historyContext(const CallGraph &g,
                             const std::vector<const CallEdge *> &history,
                             const std::string &home, int depth);
ContextString historyContext(const CallGraph &g,
                             const std::vector<std::string> &walk,
                             const std::string &home, int depth);

/// Full label strings of every path from an entry to `to` (graph acyclic).
std::set<ContextString> allPaths(const CallGraph &g, const std::string &to);

struct RandomProgramOptions {
  int maxFunctions = 4;
  int maxHoles = 3;
  int maxHoleDepth = 2;
  bool loops = true;
};

/// A terminating program over Boolean holes whose result and cost depend on
/// `argInt 0` (expected in 0..5) and on the holes.
std::string randomProgram(Rng &rng, const RandomProgramOptions &options = {});

/// Reference semantics: runs the source program and resolves each hole use
/// through historyContext over the calls made so far.
EvalResult evaluateByHistory(const ProgramModel &model, const Assignment &a,
                             const std::vector<std::int64_t> &args,
                             CostMode mode = CostMode::Steps);

/// Number of assignments of all context holes; saturates at `limit + 1`.
std::size_t assignmentCount(const ExpansionInput &input, std::size_t limit);
std::vector<Assignment> allAssignments(const ExpansionInput &input);
Assignment randomAssignment(const ExpansionInput &input, Rng &rng);
/// Every context of base hole `id` set to `v`; other holes from `base`.
Assignment withHole(Assignment base, int id, std::int64_t v);

/// Soundness by flipping Boolean holes: for each assignment in `samples` and
/// each base hole, a point instance whose logged cost changes when every
/// context of the hole flips must have an edge from one of those contexts.
/// Returns one line per violation.
std::vector<std::string>
flipViolations(const ProgramModel &model, const TuningBuild &build,
               const std::vector<Assignment> &samples,
               const std::vector<std::vector<std::int64_t>> &inputs);

/// The program with every `independent` annotation removed.
Program stripIndependent(const Program &program);

/// Steps cost and value of the tuned compilation under `a`.
EvalResult runCompiled(const ProgramModel &model, const Assignment &a,
                       const std::vector<std::int64_t> &args);

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

/// In-process CLI invocation; `args` excludes the program name.
CliResult cli(std::vector<std::string> args);
/// Runs the installed binary through the shell; stdout and stderr merged.
CliResult cliProcess(const std::string &args);

/// A fresh path under the system temp directory.
std::string tempPath(const std::string &name);

} // namespace holetune::testing
