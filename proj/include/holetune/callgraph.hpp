#pragma once

#include "holetune/ast.hpp"
#include "holetune/flow.hpp"
#include "holetune/holes.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace holetune {

struct CallEdge {
  std::string from;
  std::string to;
  std::string label;
  /// Call site in the source program, or kNoNode for hand-built graphs.
  NodeId site = kNoNode;
  /// The site may call several named functions; each gets its own edge.
  bool shared = false;
  /// Sentinel edges write white and contribute no label to context strings.
  bool sentinel = false;
};

/// The H component: per base hole its depth and home vertex.
struct GraphHole {
  int id = 0;
  std::string name;
  int depth = 0;
  std::string home;
};

/// Call graph (V, E, L, S, H). Labels identify edges uniquely.
class CallGraph {
public:
  void addVertex(const std::string &v);
  /// Both endpoints must exist; the label must be fresh.
  const CallEdge &addEdge(CallEdge edge);
  void addEntry(const std::string &v);
  void addHole(GraphHole hole);

  const std::vector<std::string> &vertices() const { return vertices_; }
  const std::vector<CallEdge> &edges() const { return edges_; }
  const std::set<std::string> &entries() const { return entries_; }
  const std::vector<GraphHole> &holes() const { return holes_; }
  std::set<std::string> labels() const;

  bool hasVertex(const std::string &v) const { return index_.count(v) != 0; }
  bool isEntry(const std::string &v) const { return entries_.count(v) != 0; }
  /// Incoming edges of `v` ordered by label text. Throws UnknownVertex.
  std::vector<const CallEdge *> incomingEdges(const std::string &v) const;
  /// nullptr when no edge carries `label`.
  const CallEdge *edgeByLabel(const std::string &label) const;
  /// Edges created for the call site `site`.
  std::vector<const CallEdge *> edgesAtSite(NodeId site) const;
  /// Throws UnknownHole.
  const GraphHole &hole(int id) const;

  std::string toDot() const;

private:
  std::vector<std::string> vertices_;
  std::map<std::string, std::size_t> index_;
  std::vector<CallEdge> edges_;
  std::map<std::string, std::size_t> byLabel_;
  std::set<std::string> entries_;
  std::vector<GraphHole> holes_;
};

/// Call graph of a whole program: S = {top}. Call sites are App nodes whose
/// head, or whose function arguments in the case of builtins, may evaluate to
/// named functions according to the flow facts.
CallGraph buildCallGraph(const Program &program, const Bindings &bindings,
                         const FunctionTable &functions,
                         const std::vector<BaseHole> &holes,
                         const FlowFacts &flow);
CallGraph buildCallGraph(const Program &program);

/// Adds a sentinel v' with edge (v', v, "v'/0") for every exported vertex that
/// has internal callers, and makes v' an entry.
CallGraph addSentinels(const CallGraph &g, const std::set<std::string> &exported);

std::string sentinelName(const std::string &v);

} // namespace holetune
