#include "holetune/callgraph.hpp"

#include "holetune/builtins.hpp"

#include <algorithm>
#include <sstream>

namespace holetune {

void CallGraph::addVertex(const std::string &v) {
  if (index_.emplace(v, vertices_.size()).second)
    vertices_.push_back(v);
}

const CallEdge &CallGraph::addEdge(CallEdge edge) {
  if (!hasVertex(edge.from))
    throw UnknownVertex("unknown vertex '" + edge.from + "'");
  if (!hasVertex(edge.to))
    throw UnknownVertex("unknown vertex '" + edge.to + "'");
  if (byLabel_.count(edge.label))
    throw Error("duplicate call-graph label '" + edge.label + "'");
  byLabel_.emplace(edge.label, edges_.size());
  edges_.push_back(std::move(edge));
  return edges_.back();
}

void CallGraph::addEntry(const std::string &v) {
  if (!hasVertex(v))
    throw UnknownVertex("unknown vertex '" + v + "'");
  entries_.insert(v);
}

void CallGraph::addHole(GraphHole hole) {
  if (!hasVertex(hole.home))
    throw UnknownVertex("unknown vertex '" + hole.home + "'");
  holes_.push_back(std::move(hole));
}

std::set<std::string> CallGraph::labels() const {
  std::set<std::string> out;
  for (const auto &e : edges_)
    out.insert(e.label);
  return out;
}

std::vector<const CallEdge *>
CallGraph::incomingEdges(const std::string &v) const {
  if (!hasVertex(v))
    throw UnknownVertex("unknown vertex '" + v + "'");
  std::vector<const CallEdge *> in;
  for (const auto &e : edges_)
    if (e.to == v)
      in.push_back(&e);
  std::sort(in.begin(), in.end(),
            [](const CallEdge *a, const CallEdge *b) { return a->label < b->label; });
  return in;
}

const CallEdge *CallGraph::edgeByLabel(const std::string &label) const {
  auto it = byLabel_.find(label);
  return it == byLabel_.end() ? nullptr : &edges_[it->second];
}

std::vector<const CallEdge *> CallGraph::edgesAtSite(NodeId site) const {
  std::vector<const CallEdge *> out;
  for (const auto &e : edges_)
    if (e.site == site && site != kNoNode)
      out.push_back(&e);
  return out;
}

const GraphHole &CallGraph::hole(int id) const {
  for (const auto &h : holes_)
    if (h.id == id)
      return h;
  throw UnknownHole("unknown hole " + std::to_string(id));
}

namespace {

std::string dotQuote(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\')
      out += '\\';
    out += c;
  }
  return out + "\"";
}

} // namespace

std::string CallGraph::toDot() const {
  std::ostringstream out;
  out << "digraph callgraph {\n";
  for (const auto &v : vertices_) {
    std::string label = v;
    for (const auto &h : holes_)
      if (h.home == v)
        label += "\\nhole" + std::to_string(h.id) + "(d=" +
                 std::to_string(h.depth) + ")";
    out << "  " << dotQuote(v) << " [label=" << dotQuote(label);
    if (isEntry(v))
      out << ", shape=box";
    out << "];\n";
  }
  for (const auto &e : edges_) {
    out << "  " << dotQuote(e.from) << " -> " << dotQuote(e.to)
        << " [label=" << dotQuote(e.label);
    if (e.sentinel)
      out << ", style=dotted";
    else if (e.shared)
      out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

CallGraph buildCallGraph(const Program &program, const Bindings &bindings,
                         const FunctionTable &functions,
                         const std::vector<BaseHole> &holes,
                         const FlowFacts &flow) {
  CallGraph g;
  for (const auto &f : functions.functions())
    g.addVertex(f.name);
  g.addEntry(kTopVertex);

  std::vector<int> siteCount(functions.size(), 0);
  for (std::size_t id = 0; id < program.size(); ++id) {
    const Expr &e = program.node(static_cast<NodeId>(id));
    if (e.kind != ExprKind::App)
      continue;
    std::set<NodeId> lambdas;
    if (const BuiltinInfo *b = appBuiltin(program, bindings, e)) {
      for (int pos : b->fnArgs)
        if (static_cast<std::size_t>(pos) + 1 < e.kids.size()) {
          const auto &t = flow.flowTargets(e.kids[pos + 1]->id);
          lambdas.insert(t.begin(), t.end());
        }
    } else {
      const Expr &head = e.child(0);
      int direct = head.kind == ExprKind::Var
                       ? functions.functionOfVar(bindings.use(head.id))
                       : -1;
      if (direct > 0) {
        lambdas.insert(functions.at(direct).lambda);
      } else {
        const auto &t = flow.flowTargets(head.id);
        lambdas.insert(t.begin(), t.end());
      }
    }
    std::vector<int> targets;
    for (NodeId l : lambdas) {
      int f = functions.functionOfLambda(l);
      if (f > 0)
        targets.push_back(f);
    }
    if (targets.empty())
      continue;
    std::sort(targets.begin(), targets.end(), [&](int a, int b) {
      return functions.at(a).name < functions.at(b).name;
    });
    int caller = functions.ownerOf(e.id);
    std::string base = functions.at(caller).name + "/" +
                       std::to_string(++siteCount[caller]);
    bool shared = targets.size() > 1;
    for (int t : targets) {
      CallEdge edge;
      edge.from = functions.at(caller).name;
      edge.to = functions.at(t).name;
      edge.label = shared ? base + ":" + edge.to : base;
      edge.site = e.id;
      edge.shared = shared;
      g.addEdge(std::move(edge));
    }
  }
  for (const auto &h : holes)
    g.addHole({h.id, h.name, h.spec.depth, h.home});
  return g;
}

CallGraph buildCallGraph(const Program &program) {
  Bindings bindings(program);
  FunctionTable functions(program, bindings);
  auto holes = listHoles(program, functions);
  FlowFacts flow = dataFlow(program, bindings, holes);
  return buildCallGraph(program, bindings, functions, holes, flow);
}

std::string sentinelName(const std::string &v) { return v + "'"; }

CallGraph addSentinels(const CallGraph &g,
                       const std::set<std::string> &exported) {
  CallGraph out = g;
  for (const auto &v : exported) {
    if (!g.hasVertex(v))
      throw UnknownVertex("unknown vertex '" + v + "'");
    if (g.incomingEdges(v).empty()) {
      out.addEntry(v);
      continue;
    }
    std::string s = sentinelName(v);
    out.addVertex(s);
    out.addEntry(s);
    CallEdge edge;
    edge.from = s;
    edge.to = v;
    edge.label = s + "/0";
    edge.sentinel = true;
    out.addEdge(std::move(edge));
  }
  return out;
}

} // namespace holetune
