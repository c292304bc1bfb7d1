#pragma once

#include "holetune/callgraph.hpp"
#include "holetune/coloring.hpp"
#include "holetune/context.hpp"
#include "holetune/flow.hpp"
#include "holetune/holes.hpp"

#include <memory>
#include <set>
#include <vector>

namespace holetune {

/// Static facts about one source program, shared by every transformation.
struct ProgramModel {
  Program program;
  std::unique_ptr<Bindings> bindings;
  std::unique_ptr<FunctionTable> functions;
  std::vector<BaseHole> holes;
  FlowFacts flow;
  CallGraph graph;
  EdgeColoring colors;
  /// Indexed by hole id - 1.
  std::vector<std::set<ContextString>> contexts;

  ExpansionInput expansionInput() const { return {holes, contexts}; }
  const BaseHole &hole(int id) const;
  /// Throws UnknownHole.
  const BaseHole &holeNamed(const std::string &name) const;
};

ProgramModel analyzeProgram(Program program);

} // namespace holetune
