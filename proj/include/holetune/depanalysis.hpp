#pragma once

#include "holetune/coloring.hpp"
#include "holetune/model.hpp"

#include <set>
#include <string>
#include <vector>

namespace holetune {

enum class PointKind { Match, BuiltinCall, Application };

const char *pointKindName(PointKind kind);

/// A subexpression whose execution time depends on at least one hole.
struct MeasuringPoint {
  NodeId node = kNoNode; // source node id
  PointKind kind = PointKind::Match;
  std::string function; // enclosing call-graph vertex
  SourceLoc loc;
  std::set<int> execDeps; // before the closure step
  std::set<int> holes;    // after the closure step
  int depth = 0;          // max depth over `holes`
};

struct PointInstance {
  int id = 0; // 1..|M|
  std::size_t point = 0; // index into the point list
  ContextString context;
};

/// Bipartite graph between context holes and measuring-point instances.
class DependencyGraph {
public:
  std::vector<ContextHole> holes;
  std::vector<PointInstance> points;
  /// (index into `holes`, index into `points`)
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  std::vector<std::size_t> holesOf(std::size_t point) const;
  std::vector<std::size_t> pointsOf(std::size_t hole) const;
  std::size_t holeIndex(const ContextHole &h) const;
  bool hasEdge(std::size_t hole, std::size_t point) const;
  /// Keeps the instances whose ids are in `ids`, renumbering nothing.
  DependencyGraph restrictedTo(const std::set<int> &ids) const;

  std::string toDot(const std::vector<MeasuringPoint> &points,
                    const std::string &file) const;
};

struct DependencyAnalysis {
  std::vector<MeasuringPoint> points;
  DependencyGraph graph;
  /// Per point: the contexts of its instances (all of them, including dropped
  /// ones) and the instance id of each, 0 when dropped.
  std::vector<std::vector<std::pair<ContextString, int>>> instances;
};

/// Initial measuring points: matches on hole-dependent scrutinees, builtin
/// calls whose cost arguments depend on holes, and applications whose
/// function expression depends on holes.
std::vector<MeasuringPoint> execDeps(const ProgramModel &model);

/// holes(m2) is added to holes(m1) whenever m1 may execute m2, through its
/// subtree or any function applied there, transitively.
void callGraphClosure(std::vector<MeasuringPoint> &points,
                      const ProgramModel &model);

/// Splits points into per-context instances and connects context holes.
DependencyAnalysis expandPoints(std::vector<MeasuringPoint> points,
                                const ProgramModel &model);

DependencyAnalysis buildDependencyGraph(const ProgramModel &model);

} // namespace holetune
