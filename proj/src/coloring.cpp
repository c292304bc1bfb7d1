#include "holetune/coloring.hpp"

#include "holetune/builtins.hpp"

#include <algorithm>

namespace holetune {

int EdgeColoring::color(const std::string &label) const {
  auto it = colors_.find(label);
  if (it == colors_.end())
    throw Error("no color for label '" + label + "'");
  return it->second;
}

EdgeColoring assignEdgeColors(const CallGraph &g) {
  EdgeColoring c;
  for (const auto &v : g.vertices()) {
    int next = 1;
    for (const CallEdge *e : g.incomingEdges(v))
      c.set(e->label, e->sentinel ? kWhite : next++);
  }
  return c;
}

int ColorTrail::color(const std::string &v) const {
  auto it = cells_.find(v);
  return it == cells_.end() ? kWhite : it->second;
}

void ColorTrail::traverse(const CallEdge &e, const EdgeColoring &colors) {
  cells_[e.to] = colors.color(e.label);
}

namespace {

const CallEdge *edgeWithColor(const CallGraph &g, const EdgeColoring &colors,
                              const std::string &v, int color) {
  for (const CallEdge *e : g.incomingEdges(v))
    if (!e->sentinel && colors.color(e->label) == color)
      return e;
  return nullptr;
}

} // namespace

ContextString ColorTrail::trace(const CallGraph &g, const EdgeColoring &colors,
                                const std::string &home, int depth) const {
  ContextString rev;
  std::set<std::string> visited;
  std::string v = home;
  while (static_cast<int>(rev.size()) < depth && !visited.count(v)) {
    int c = color(v);
    if (c == kWhite)
      break;
    const CallEdge *e = edgeWithColor(g, colors, v, c);
    if (!e)
      break;
    visited.insert(v);
    rev.push_back(e->label);
    v = e->from;
  }
  return ContextString(rev.rbegin(), rev.rend());
}

ContextString resolveContext(const CallGraph &g, const EdgeColoring &colors,
                             const std::vector<std::string> &walk, int holeId) {
  const GraphHole &h = g.hole(holeId);
  ColorTrail trail;
  std::string at;
  for (std::size_t i = 0; i < walk.size(); ++i) {
    const CallEdge *e = g.edgeByLabel(walk[i]);
    if (!e)
      throw InvalidPath("unknown label '" + walk[i] + "' in walk");
    bool restart = i == 0 || e->sentinel;
    if (restart ? !g.isEntry(e->from) : e->from != at)
      throw InvalidPath("label '" + walk[i] + "' does not continue the walk");
    trail.traverse(*e, colors);
    at = e->to;
  }
  if (walk.empty() ? !g.isEntry(h.home) : at != h.home)
    throw InvalidPath("walk does not end at the home of hole " +
                      std::to_string(holeId));
  return trail.trace(g, colors, h.home, h.depth);
}

std::size_t SwitchTree::depth() const {
  std::size_t d = 0;
  for (const auto &c : cases)
    d = std::max(d, c.next->depth());
  return isLeaf() ? 0 : d + 1;
}

std::vector<ContextString> SwitchTree::leaves() const {
  if (isLeaf())
    return {leaf};
  std::vector<ContextString> out;
  for (const auto &c : cases) {
    auto sub = c.next->leaves();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

bool SwitchTree::operator==(const SwitchTree &o) const {
  if (vertex != o.vertex || leaf != o.leaf || cases.size() != o.cases.size())
    return false;
  for (std::size_t i = 0; i < cases.size(); ++i)
    if (cases[i].color != o.cases[i].color || !(*cases[i].next == *o.cases[i].next))
      return false;
  return true;
}

namespace {

/// `strings` share their last `consumed` labels; the next label to dispatch
/// on is the one before them.
SwitchTree buildNode(const CallGraph &g, const EdgeColoring &colors,
                     const std::string &v,
                     const std::vector<ContextString> &strings,
                     std::size_t consumed) {
  std::vector<ContextString> terminal;
  std::map<int, std::vector<ContextString>> byColor;
  std::map<int, std::string> source;
  for (const auto &s : strings) {
    if (s.size() == consumed) {
      terminal.push_back(s);
      continue;
    }
    const std::string &label = s[s.size() - 1 - consumed];
    const CallEdge *e = g.edgeByLabel(label);
    if (!e || e->to != v)
      throw Error("context string " + contextText(s) +
                  " does not follow the call graph");
    int c = colors.color(label);
    byColor[c].push_back(s);
    source[c] = e->from;
  }
  SwitchTree t;
  if (byColor.empty()) {
    if (terminal.size() != 1)
      throw Error("ambiguous context strings at vertex '" + v + "'");
    t.leaf = terminal.front();
    return t;
  }
  if (terminal.size() > 1)
    throw Error("ambiguous context strings at vertex '" + v + "'");
  t.vertex = v;
  if (!terminal.empty()) {
    auto leaf = std::make_shared<SwitchTree>();
    leaf->leaf = terminal.front();
    t.cases.push_back({kWhite, leaf});
  }
  for (const auto &[c, group] : byColor)
    t.cases.push_back({c, std::make_shared<SwitchTree>(buildNode(
                              g, colors, source[c], group, consumed + 1))});
  // A single alternative needs no cell read.
  if (t.cases.size() == 1)
    return SwitchTree(*t.cases.front().next);
  return t;
}

} // namespace

SwitchTree buildSwitchTree(const CallGraph &g, const EdgeColoring &colors,
                           const std::string &home,
                           const std::set<ContextString> &contexts) {
  if (contexts.empty())
    throw Error("no contexts for vertex '" + home + "'");
  return buildNode(g, colors, home,
                   std::vector<ContextString>(contexts.begin(), contexts.end()),
                   0);
}

std::set<std::string> readVertices(const SwitchTree &t) {
  std::set<std::string> out;
  if (t.isLeaf())
    return out;
  out.insert(t.vertex);
  for (const auto &c : t.cases) {
    auto sub = readVertices(*c.next);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

std::string cellName(const std::string &vertex) { return "__color_" + vertex; }

namespace {

constexpr const char *kScratch = "__c";

ExprPtr readCell(const std::string &v, const CellPlan &plan) {
  if (plan.threads > 1)
    return build::call("arrayGet",
                       {build::var(cellName(v)), build::var("threadId")});
  return build::call("deref", {build::var(cellName(v))});
}

ExprPtr writeCell(const std::string &v, int color, const CellPlan &plan) {
  if (plan.threads > 1)
    return build::call("arraySet", {build::var(cellName(v)),
                                    build::var("threadId"),
                                    build::intLit(color)});
  return build::call("setCell", {build::var(cellName(v)), build::intLit(color)});
}

} // namespace

ExprPtr lowerSwitch(const SwitchTree &t, const CellPlan &plan,
                    const std::function<ExprPtr(const ContextString &)> &leaf) {
  if (t.isLeaf())
    return leaf(t.leaf);
  ExprPtr chain = lowerSwitch(*t.cases.back().next, plan, leaf);
  for (std::size_t i = t.cases.size() - 1; i-- > 0;)
    chain = build::match(build::var(kScratch),
                         build::intPattern(t.cases[i].color),
                         lowerSwitch(*t.cases[i].next, plan, leaf), chain);
  return build::let(kScratch, readCell(t.vertex, plan), chain);
}

namespace {

bool cellVertexOf(const Expr &read, std::string &vertex) {
  if (read.kind != ExprKind::App || read.child(0).kind != ExprKind::Var)
    return false;
  const std::string &fn = read.child(0).name;
  std::size_t argc = read.kids.size() - 1;
  if (!((fn == "deref" && argc == 1) || (fn == "arrayGet" && argc == 2)))
    return false;
  const Expr &cell = read.child(1);
  const std::string prefix = "__color_";
  if (cell.kind != ExprKind::Var || cell.name.rfind(prefix, 0) != 0)
    return false;
  vertex = cell.name.substr(prefix.size());
  return true;
}

} // namespace

std::shared_ptr<SwitchTree>
recognizeSwitch(const Expr &e,
                const std::function<bool(const Expr &, ContextString &)> &leafOf) {
  auto t = std::make_shared<SwitchTree>();
  if (e.kind == ExprKind::Let && e.name == kScratch &&
      cellVertexOf(e.child(0), t->vertex)) {
    const Expr *cur = &e.child(1);
    while (cur->kind == ExprKind::Match && cur->child(0).kind == ExprKind::Var &&
           cur->child(0).name == kScratch &&
           cur->pattern.kind == PatternKind::Int) {
      auto sub = recognizeSwitch(cur->child(1), leafOf);
      if (!sub)
        return nullptr;
      t->cases.push_back({static_cast<int>(cur->pattern.intValue), sub});
      cur = &cur->child(2);
    }
    auto last = recognizeSwitch(*cur, leafOf);
    if (!last || t->cases.empty())
      return nullptr;
    // The final else branch stands for the one remaining color.
    int color = t->cases.back().color + 1;
    t->cases.push_back({color, last});
    return t;
  }
  if (!leafOf(e, t->leaf))
    return nullptr;
  return t;
}

namespace {

bool isAtomic(const Expr &e) {
  return e.kind == ExprKind::Var || e.kind == ExprKind::Int ||
         e.kind == ExprKind::Bool;
}

class UpdateInserter {
public:
  UpdateInserter(const CallGraph &g, const EdgeColoring &colors,
                 const CellPlan &plan)
      : g_(g), colors_(colors), plan_(plan) {}

  ExprPtr rewrite(const Expr &e) {
    auto copy = cloneNode(e);
    for (const auto &k : e.kids)
      copy->kids.push_back(rewrite(*k));
    if (e.kind != ExprKind::App || e.origin == kNoNode)
      return copy;
    std::vector<const CallEdge *> writes;
    for (const CallEdge *edge : g_.edgesAtSite(e.origin))
      if (plan_.vertices.count(edge->to))
        writes.push_back(edge);
    if (writes.empty())
      return copy;

    std::vector<std::pair<std::string, ExprPtr>> binds;
    const Expr &head = *copy->kids[0];
    bool builtinHead = head.kind == ExprKind::Var && !e.kids.empty() &&
                       findsBuiltin(head.name);
    for (std::size_t i = builtinHead ? 1 : 0; i < copy->kids.size(); ++i) {
      if (isAtomic(*copy->kids[i]))
        continue;
      std::string name = "__a" + std::to_string(i);
      binds.emplace_back(name, copy->kids[i]);
      copy->kids[i] = build::var(name);
    }
    ExprPtr body = copy;
    for (auto it = writes.rbegin(); it != writes.rend(); ++it)
      body = build::let("_", writeCell((*it)->to, colors_.color((*it)->label),
                                       plan_),
                        body);
    for (auto it = binds.rbegin(); it != binds.rend(); ++it)
      body = build::let(it->first, it->second, body);
    return body;
  }

private:
  static bool findsBuiltin(const std::string &name) {
    return findBuiltin(name) != nullptr;
  }

  const CallGraph &g_;
  const EdgeColoring &colors_;
  const CellPlan &plan_;
};

ExprPtr declareCells(ExprPtr body, const CellPlan &plan) {
  for (auto it = plan.vertices.rbegin(); it != plan.vertices.rend(); ++it) {
    ExprPtr init =
        plan.threads > 1
            ? build::call("newArray", {build::intLit(plan.threads),
                                       build::intLit(kWhite)})
            : build::call("newCell", {build::intLit(kWhite)});
    body = build::let(cellName(*it), init, body);
  }
  return body;
}

} // namespace

Program insertColorUpdates(const Program &program, const CallGraph &g,
                           const EdgeColoring &colors, const CellPlan &plan) {
  UpdateInserter ins(g, colors, plan);
  ExprPtr root = ins.rewrite(program.root());
  return Program(declareCells(root, plan), false, program.file());
}

void LookupIndex::add(ContextHole h) {
  if (slots_.count(h))
    return;
  slots_.emplace(h, entries_.size());
  entries_.push_back(std::move(h));
}

std::size_t LookupIndex::slot(int holeId, const ContextString &ctx) const {
  auto it = slots_.find(ContextHole{holeId, ctx});
  if (it == slots_.end())
    throw UnknownHole("hole " + std::to_string(holeId) + " has no context " +
                      contextText(ctx));
  return it->second;
}

bool LookupIndex::contains(int holeId, const ContextString &ctx) const {
  return slots_.count(ContextHole{holeId, ctx}) != 0;
}

LookupIndex makeLookupIndex(const ExpansionInput &input) {
  LookupIndex index;
  for (const auto &h : input.holes)
    for (const auto &ctx : input.contexts.at(h.id - 1))
      index.add({h.id, ctx});
  return index;
}

std::set<std::string> holeCellVertices(const CallGraph &g,
                                       const EdgeColoring &colors,
                                       const ExpansionInput &input) {
  std::set<std::string> out;
  for (const auto &h : input.holes) {
    auto t = buildSwitchTree(g, colors, h.home, input.contexts.at(h.id - 1));
    auto vs = readVertices(t);
    out.insert(vs.begin(), vs.end());
  }
  return out;
}

namespace {

ExprPtr replaceHoleNodes(
    const Expr &e, const std::map<NodeId, const BaseHole *> &byNode,
    const std::map<NodeId, ExprPtr> &replacement) {
  if (e.kind == ExprKind::Hole) {
    auto it = replacement.find(e.origin);
    if (it != replacement.end())
      return clone(*it->second);
  }
  auto copy = cloneNode(e);
  for (const auto &k : e.kids)
    copy->kids.push_back(replaceHoleNodes(*k, byNode, replacement));
  return copy;
}

} // namespace

Program expandHoles(
    const Program &program, const CallGraph &g, const EdgeColoring &colors,
    const CellPlan &plan, const ExpansionInput &input,
    const std::function<ExprPtr(const BaseHole &, const ContextString &)> &leaf) {
  std::map<NodeId, const BaseHole *> byNode;
  std::map<NodeId, ExprPtr> replacement;
  for (const auto &h : input.holes) {
    byNode[h.node] = &h;
    auto t = buildSwitchTree(g, colors, h.home, input.contexts.at(h.id - 1));
    replacement[h.node] = lowerSwitch(
        t, plan, [&](const ContextString &ctx) { return leaf(h, ctx); });
  }
  return Program(replaceHoleNodes(program.root(), byNode, replacement), false,
                 program.file());
}

std::pair<Program, LookupIndex>
contextExpansion(const Program &program, const CallGraph &g,
                 const EdgeColoring &colors, const CellPlan &plan,
                 const ExpansionInput &input) {
  LookupIndex index = makeLookupIndex(input);
  Program out = expandHoles(
      program, g, colors, plan, input,
      [&](const BaseHole &h, const ContextString &ctx) {
        return build::call("holeValue", {build::intLit(static_cast<std::int64_t>(
                                            index.slot(h.id, ctx)))});
      });
  return {std::move(out), std::move(index)};
}

} // namespace holetune
