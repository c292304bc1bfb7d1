#pragma once

#include "holetune/callgraph.hpp"
#include "holetune/context.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace holetune {

inline constexpr int kWhite = 0;

/// c_L: label -> color. Incoming edges of every vertex carry the colors
/// 1..indegree in label order; sentinel edges carry white.
class EdgeColoring {
public:
  void set(const std::string &label, int color) { colors_[label] = color; }
  /// Throws Error for an unknown label.
  int color(const std::string &label) const;
  const std::map<std::string, int> &all() const { return colors_; }

private:
  std::map<std::string, int> colors_;
};

EdgeColoring assignEdgeColors(const CallGraph &g);

/// c_V at run time: the color of the edge each vertex was last entered by.
class ColorTrail {
public:
  int color(const std::string &v) const;
  /// TraverseEdge: overwrites the target's color.
  void traverse(const CallEdge &e, const EdgeColoring &colors);
  /// Follows colors backwards from `home` until the depth is exhausted, a
  /// white vertex is reached, or a vertex repeats.
  ContextString trace(const CallGraph &g, const EdgeColoring &colors,
                      const std::string &home, int depth) const;

private:
  std::map<std::string, int> cells_;
};

/// Simulates the transformed program along a walk of labels starting at an
/// entry (a sentinel edge may start a new segment) and returns the context
/// the hole's switch code selects. Throws InvalidPath.
ContextString resolveContext(const CallGraph &g, const EdgeColoring &colors,
                             const std::vector<std::string> &walk, int holeId);

/// Decision tree over color cells that selects one context string. Inner
/// nodes read `vertex`'s cell; case color 0 (white) appears only where a
/// context ends at an entry that also has callers.
struct SwitchTree {
  struct Case {
    int color = 0;
    std::shared_ptr<SwitchTree> next;
  };
  std::string vertex; // empty for leaves
  std::vector<Case> cases; // ascending color
  ContextString leaf;

  bool isLeaf() const { return vertex.empty(); }
  std::size_t depth() const;
  std::vector<ContextString> leaves() const;
  bool operator==(const SwitchTree &o) const;
};

SwitchTree buildSwitchTree(const CallGraph &g, const EdgeColoring &colors,
                           const std::string &home,
                           const std::set<ContextString> &contexts);

/// Vertices whose cells a switch tree reads.
std::set<std::string> readVertices(const SwitchTree &t);

/// How transformed programs hold color cells.
struct CellPlan {
  std::set<std::string> vertices;
  int threads = 1;
};

std::string cellName(const std::string &vertex);

/// Lowers a switch tree to core-language code; `leaf` produces each leaf.
ExprPtr lowerSwitch(const SwitchTree &t, const CellPlan &plan,
                    const std::function<ExprPtr(const ContextString &)> &leaf);

/// Recovers a switch tree from lowered code; leaves are labelled by `leafOf`.
/// Returns nullptr when `e` does not have the lowered shape.
std::shared_ptr<SwitchTree>
recognizeSwitch(const Expr &e,
                const std::function<bool(const Expr &, ContextString &)> &leafOf);

/// Inserts, before each call site whose edge enters a vertex of `plan`, a
/// write of the edge color into that vertex's cell (slot `threadId` when
/// T > 1). Arguments are bound first so the call keeps its tail position.
Program insertColorUpdates(const Program &program, const CallGraph &g,
                           const EdgeColoring &colors, const CellPlan &plan);

struct ContextHole {
  int holeId = 0;
  ContextString context;

  auto operator<=>(const ContextHole &) const = default;
};

/// (hole, context) -> flat slot, holes in id order, contexts in set order.
class LookupIndex {
public:
  void add(ContextHole h);
  /// Throws UnknownHole.
  std::size_t slot(int holeId, const ContextString &ctx) const;
  bool contains(int holeId, const ContextString &ctx) const;
  const std::vector<ContextHole> &entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

private:
  std::vector<ContextHole> entries_;
  std::map<ContextHole, std::size_t> slots_;
};

struct ExpansionInput {
  std::vector<BaseHole> holes;
  /// Indexed by hole id - 1.
  std::vector<std::set<ContextString>> contexts;
};

/// Replaces every hole by a switch over its contexts whose leaves are
/// produced by `leaf(holeId, context)`. Depth-0 holes need no switch.
Program expandHoles(
    const Program &program, const CallGraph &g, const EdgeColoring &colors,
    const CellPlan &plan, const ExpansionInput &input,
    const std::function<ExprPtr(const BaseHole &, const ContextString &)> &leaf);

/// Context expansion for tuning: leaves read `holeValue <slot>`.
std::pair<Program, LookupIndex>
contextExpansion(const Program &program, const CallGraph &g,
                 const EdgeColoring &colors, const CellPlan &plan,
                 const ExpansionInput &input);

LookupIndex makeLookupIndex(const ExpansionInput &input);

/// Cells needed by the hole switches of `input`.
std::set<std::string> holeCellVertices(const CallGraph &g,
                                       const EdgeColoring &colors,
                                       const ExpansionInput &input);

} // namespace holetune
