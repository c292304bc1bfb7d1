#include "holetune/depanalysis.hpp"

#include "holetune/builtins.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace holetune {

const char *pointKindName(PointKind kind) {
  switch (kind) {
  case PointKind::Match:
    return "match";
  case PointKind::BuiltinCall:
    return "builtin-call";
  case PointKind::Application:
    return "application";
  }
  return "?";
}

std::vector<std::size_t> DependencyGraph::holesOf(std::size_t point) const {
  std::vector<std::size_t> out;
  for (const auto &[h, p] : edges)
    if (p == point)
      out.push_back(h);
  return out;
}

std::vector<std::size_t> DependencyGraph::pointsOf(std::size_t hole) const {
  std::vector<std::size_t> out;
  for (const auto &[h, p] : edges)
    if (h == hole)
      out.push_back(p);
  return out;
}

std::size_t DependencyGraph::holeIndex(const ContextHole &h) const {
  for (std::size_t i = 0; i < holes.size(); ++i)
    if (holes[i] == h)
      return i;
  throw UnknownHole("no context hole " + std::to_string(h.holeId) + "[" +
                    contextText(h.context) + "]");
}

bool DependencyGraph::hasEdge(std::size_t hole, std::size_t point) const {
  return std::find(edges.begin(), edges.end(), std::make_pair(hole, point)) !=
         edges.end();
}

DependencyGraph DependencyGraph::restrictedTo(const std::set<int> &ids) const {
  DependencyGraph out;
  out.holes = holes;
  std::map<std::size_t, std::size_t> remap;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (ids.count(points[i].id)) {
      remap[i] = out.points.size();
      out.points.push_back(points[i]);
    }
  for (const auto &[h, p] : edges)
    if (remap.count(p))
      out.edges.emplace_back(h, remap[p]);
  return out;
}

std::string DependencyGraph::toDot(const std::vector<MeasuringPoint> &pts,
                                   const std::string &file) const {
  std::ostringstream out;
  auto holeName = [&](std::size_t i) {
    return "h" + std::to_string(holes[i].holeId) + "[" +
           contextText(holes[i].context) + "]";
  };
  auto pointName = [&](std::size_t i) {
    return "m" + std::to_string(points[i].id) + "@" + file + ":" +
           std::to_string(pts[points[i].point].loc.line);
  };
  out << "digraph depgraph {\n  rankdir=LR;\n";
  for (std::size_t i = 0; i < holes.size(); ++i)
    out << "  \"" << holeName(i) << "\" [shape=ellipse];\n";
  for (std::size_t i = 0; i < points.size(); ++i)
    out << "  \"" << pointName(i) << "\" [shape=box];\n";
  for (const auto &[h, p] : edges)
    out << "  \"" << holeName(h) << "\" -> \"" << pointName(p)
        << "\" [arrowhead=none];\n";
  out << "}\n";
  return out.str();
}

std::vector<MeasuringPoint> execDeps(const ProgramModel &model) {
  const Program &p = model.program;
  std::vector<MeasuringPoint> points;
  for (std::size_t id = 0; id < p.size(); ++id) {
    const Expr &e = p.node(static_cast<NodeId>(id));
    MeasuringPoint m;
    if (e.kind == ExprKind::Match) {
      m.kind = PointKind::Match;
      m.execDeps = model.flow.dataDeps(e.child(0).id);
    } else if (e.kind == ExprKind::App) {
      if (const BuiltinInfo *b = appBuiltin(p, *model.bindings, e)) {
        m.kind = PointKind::BuiltinCall;
        for (int pos : b->costArgs)
          if (static_cast<std::size_t>(pos) + 1 < e.kids.size()) {
            const auto &d = model.flow.dataDeps(e.kids[pos + 1]->id);
            m.execDeps.insert(d.begin(), d.end());
          }
      } else {
        m.kind = PointKind::Application;
        m.execDeps = model.flow.dataDeps(e.child(0).id);
      }
    } else {
      continue;
    }
    if (m.execDeps.empty())
      continue;
    m.node = e.id;
    m.loc = e.loc;
    m.function = model.functions->at(model.functions->ownerOf(e.id)).name;
    points.push_back(std::move(m));
  }
  return points;
}

namespace {

/// Points and applied lambdas met in the subtree of `n` without entering
/// lambda bodies.
struct Reach {
  std::set<std::size_t> points;
  std::set<NodeId> lambdas;
};

void collect(const Expr &e, const FlowFacts &flow,
             const std::map<NodeId, std::size_t> &pointAt, Reach &out) {
  auto it = pointAt.find(e.id);
  if (it != pointAt.end())
    out.points.insert(it->second);
  if (e.kind == ExprKind::App) {
    const auto &ls = flow.applied.at(e.id);
    out.lambdas.insert(ls.begin(), ls.end());
  }
  for (const auto &k : e.kids)
    if (k->kind != ExprKind::Lam)
      collect(*k, flow, pointAt, out);
}

} // namespace

void callGraphClosure(std::vector<MeasuringPoint> &points,
                      const ProgramModel &model) {
  const Program &p = model.program;
  std::map<NodeId, std::size_t> pointAt;
  for (std::size_t i = 0; i < points.size(); ++i)
    pointAt[points[i].node] = i;

  // Direct reach of every lambda body, then transitive closure.
  std::map<NodeId, Reach> lam;
  for (std::size_t id = 0; id < p.size(); ++id) {
    const Expr &e = p.node(static_cast<NodeId>(id));
    if (e.kind != ExprKind::Lam)
      continue;
    Reach r;
    if (e.child(0).kind != ExprKind::Lam)
      collect(e.child(0), model.flow, pointAt, r);
    else
      r.lambdas.insert(e.child(0).id);
    lam[e.id] = std::move(r);
  }
  std::map<NodeId, std::set<std::size_t>> lamPoints;
  for (auto &[id, r] : lam)
    lamPoints[id] = r.points;
  for (bool changed = true; changed;) {
    changed = false;
    for (auto &[id, r] : lam)
      for (NodeId callee : r.lambdas)
        for (std::size_t q : lamPoints[callee])
          changed |= lamPoints[id].insert(q).second;
  }

  std::vector<std::set<int>> closed(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    Reach r;
    const Expr &e = p.node(points[i].node);
    for (const auto &k : e.kids)
      if (k->kind != ExprKind::Lam)
        collect(*k, model.flow, pointAt, r);
    if (e.kind == ExprKind::App) {
      const auto &ls = model.flow.applied.at(e.id);
      r.lambdas.insert(ls.begin(), ls.end());
    }
    std::set<std::size_t> reach = r.points;
    for (NodeId l : r.lambdas)
      reach.insert(lamPoints[l].begin(), lamPoints[l].end());
    closed[i] = points[i].execDeps;
    for (std::size_t q : reach)
      closed[i].insert(points[q].execDeps.begin(), points[q].execDeps.end());
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    points[i].holes = std::move(closed[i]);
    points[i].depth = 0;
    for (int h : points[i].holes)
      points[i].depth = std::max(points[i].depth, model.hole(h).depth());
  }
}

DependencyAnalysis expandPoints(std::vector<MeasuringPoint> points,
                                const ProgramModel &model) {
  DependencyAnalysis out;
  for (const auto &h : model.holes)
    for (const auto &ctx : model.contexts.at(h.id - 1))
      out.graph.holes.push_back({h.id, ctx});
  std::map<ContextHole, std::size_t> holeIndex;
  for (std::size_t i = 0; i < out.graph.holes.size(); ++i)
    holeIndex[out.graph.holes[i]] = i;

  int nextId = 1;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const MeasuringPoint &m = points[pi];
    std::set<ContextString> contexts =
        m.depth == 0 ? std::set<ContextString>{ContextString{}}
                     : contextStringsAt(model.graph, m.function, m.depth);
    std::vector<std::pair<ContextString, int>> inst;
    for (const auto &ctx : contexts) {
      std::vector<std::size_t> adjacent;
      for (int hid : m.holes) {
        const BaseHole &h = model.hole(hid);
        for (const auto &hc : model.contexts.at(hid - 1)) {
          bool compatible = h.home != m.function ||
                            hc == suffix(ctx, h.depth());
          if (compatible)
            adjacent.push_back(holeIndex.at({hid, hc}));
        }
      }
      if (adjacent.empty()) {
        inst.emplace_back(ctx, 0);
        continue;
      }
      std::size_t index = out.graph.points.size();
      out.graph.points.push_back({nextId, pi, ctx});
      inst.emplace_back(ctx, nextId++);
      for (std::size_t h : adjacent)
        out.graph.edges.emplace_back(h, index);
    }
    out.instances.push_back(std::move(inst));
  }
  out.points = std::move(points);
  return out;
}

DependencyAnalysis buildDependencyGraph(const ProgramModel &model) {
  auto points = execDeps(model);
  callGraphClosure(points, model);
  return expandPoints(std::move(points), model);
}

} // namespace holetune
