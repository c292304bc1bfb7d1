#include "holetune/instrument.hpp"

#include "holetune/builtins.hpp"

#include <sstream>

namespace holetune {

namespace {

constexpr const char *kLockVar = "__mp";
constexpr const char *kValueVar = "__v";

/// A recursive-let group: its binders and the bodies of its lambdas.
struct Group {
  NodeId recLet = kNoNode;
  std::vector<NodeId> bodies;
  std::vector<std::int64_t> releaseIds; // ids of its tail-form instances
};

class Instrumenter {
public:
  Instrumenter(const ProgramModel &model, const DependencyAnalysis &analysis,
               const CellPlan &plan, const InstrumentOptions &options)
      : model_(model), analysis_(analysis), plan_(plan), options_(options) {
    // A point under `independent` is wrapped outside the annotation, which
    // must stay directly around its match.
    for (std::size_t i = 0; i < analysis.points.size(); ++i) {
      NodeId at = analysis.points[i].node;
      for (NodeId up = program().parent(at);
           up != kNoNode && program().node(up).kind == ExprKind::Independent &&
           program().node(up).kids[0]->id == at;
           up = program().parent(at))
        at = up;
      pointAt_[at] = i;
    }
    findGroups();
    if (options_.tailForm)
      chooseTailPoints();
  }

  InstrumentResult run() {
    InstrumentResult out;
    out.program = Program(rewrite(model_.program.root()), false,
                          model_.program.file());
    out.warnings = std::move(warnings_);
    out.tailPoints = std::move(tailPoints_);
    return out;
  }

private:
  const Program &program() const { return model_.program; }

  void findGroups() {
    const Program &p = program();
    for (std::size_t id = 0; id < p.size(); ++id) {
      const Expr &e = p.node(static_cast<NodeId>(id));
      if (e.kind != ExprKind::RecLet)
        continue;
      Group g;
      g.recLet = e.id;
      for (std::size_t i = 0; i + 1 < e.kids.size(); ++i) {
        const Expr *body = e.kids[i].get();
        while (body->kind == ExprKind::Lam)
          body = &body->child(0);
        if (body != e.kids[i].get())
          g.bodies.push_back(body->id);
      }
      std::size_t gi = groups_.size();
      groups_.push_back(std::move(g));
      for (NodeId b : groups_[gi].bodies)
        markTail(p.node(b), gi);
    }
  }

  /// Records the tail positions of a group function body.
  void markTail(const Expr &e, std::size_t group) {
    tailOf_[e.id] = group;
    switch (e.kind) {
    case ExprKind::Let:
      markTail(e.child(1), group);
      break;
    case ExprKind::RecLet:
      markTail(*e.kids.back(), group);
      break;
    case ExprKind::Match:
      markTail(e.child(1), group);
      markTail(e.child(2), group);
      break;
    case ExprKind::Independent:
      markTail(e.child(0), group);
      break;
    default:
      exits_[e.id] = group;
      break;
    }
  }

  bool isGroupCall(const Expr &e, std::size_t group) const {
    if (e.kind != ExprKind::App || e.child(0).kind != ExprKind::Var)
      return false;
    VarId v = model_.bindings->use(e.child(0).id);
    return v != kNoVar &&
           model_.bindings->binderNode(v) == groups_[group].recLet;
  }

  /// Counts group calls under `e`; returns false if one is not in tail
  /// position relative to the root of the walk.
  bool tailCallsOnly(const Expr &e, std::size_t group, bool tail,
                     int &calls) const {
    if (isGroupCall(e, group)) {
      ++calls;
      if (!tail)
        return false;
      for (std::size_t i = 1; i < e.kids.size(); ++i)
        if (!tailCallsOnly(e.child(i), group, false, calls))
          return false;
      return true;
    }
    auto kid = [&](std::size_t i, bool t) {
      return tailCallsOnly(e.child(i), group, t, calls);
    };
    switch (e.kind) {
    case ExprKind::Let:
      return kid(0, false) && kid(1, tail);
    case ExprKind::RecLet:
      for (std::size_t i = 0; i + 1 < e.kids.size(); ++i)
        if (!kid(i, false))
          return false;
      return kid(e.kids.size() - 1, tail);
    case ExprKind::Match:
      return kid(0, false) && kid(1, tail) && kid(2, tail);
    case ExprKind::Independent:
      return kid(0, tail);
    default:
      for (std::size_t i = 0; i < e.kids.size(); ++i)
        if (!kid(i, false))
          return false;
      return true;
    }
  }

  void countTailCalls(const Expr &e, std::size_t group, int &calls) const {
    if (isGroupCall(e, group)) {
      ++calls;
      return;
    }
    switch (e.kind) {
    case ExprKind::Let:
      countTailCalls(e.child(1), group, calls);
      break;
    case ExprKind::RecLet:
      countTailCalls(*e.kids.back(), group, calls);
      break;
    case ExprKind::Match:
      countTailCalls(e.child(1), group, calls);
      countTailCalls(e.child(2), group, calls);
      break;
    case ExprKind::Independent:
      countTailCalls(e.child(0), group, calls);
      break;
    default:
      break;
    }
  }

  void chooseTailPoints() {
    for (const auto &[node, pi] : pointAt_) {
      auto t = tailOf_.find(node);
      if (t == tailOf_.end())
        continue;
      std::size_t group = t->second;
      int calls = 0, tailCalls = 0;
      bool ok = tailCallsOnly(program().node(node), group, true, calls);
      countTailCalls(program().node(node), group, tailCalls);
      if (tailCalls == 0)
        continue;
      if (!ok) {
        warn(pi, "recursive calls both in and out of tail position");
        continue;
      }
      bool hasExit = false;
      for (const auto &[exit, g] : exits_)
        hasExit |= g == group && !isGroupCall(program().node(exit), group);
      if (!hasExit) {
        warn(pi, "recursive group has no base case");
        continue;
      }
      tailPoints_.insert(pi);
      for (const auto &[ctx, id] : analysis_.instances[pi])
        if (id != 0)
          groups_[group].releaseIds.push_back(id);
    }
  }

  void warn(std::size_t pi, const std::string &why) {
    const auto &m = analysis_.points[pi];
    warnings_.push_back("instrument: point at " + program().file() + ":" +
                        std::to_string(m.loc.line) + ":" +
                        std::to_string(m.loc.column) + ": " + why +
                        "; using plain wrapping");
  }

  ExprPtr pointId(std::size_t pi) const {
    const auto &inst = analysis_.instances[pi];
    bool uniform = true;
    for (const auto &[ctx, id] : inst)
      uniform &= id == inst.front().second;
    if (uniform)
      return build::intLit(inst.empty() ? 0 : inst.front().second);
    std::map<ContextString, int> idOf(inst.begin(), inst.end());
    std::set<ContextString> contexts;
    for (const auto &[ctx, id] : inst)
      contexts.insert(ctx);
    auto tree = buildSwitchTree(model_.graph, model_.colors,
                                analysis_.points[pi].function, contexts);
    return lowerSwitch(tree, plan_, [&](const ContextString &ctx) {
      return build::intLit(idOf.at(ctx));
    });
  }

  static ExprPtr wrapPlain(ExprPtr id, ExprPtr e) {
    using namespace build;
    return let(kLockVar, call("acquireLock", {std::move(id)}),
               let(kValueVar, std::move(e),
                   let("_", call("releaseLock", {var(kLockVar)}),
                       var(kValueVar))));
  }

  static ExprPtr wrapRelease(const std::vector<std::int64_t> &ids, ExprPtr e) {
    using namespace build;
    ExprPtr body = var(kValueVar);
    for (auto it = ids.rbegin(); it != ids.rend(); ++it)
      body = let("_", call("releaseLock", {intLit(*it)}), body);
    return let(kValueVar, std::move(e), body);
  }

  ExprPtr rewrite(const Expr &e) {
    auto copy = cloneNode(e);
    for (const auto &k : e.kids)
      copy->kids.push_back(rewrite(*k));
    ExprPtr out = copy;

    auto exit = exits_.find(e.id);
    if (exit != exits_.end() && !groups_[exit->second].releaseIds.empty() &&
        !isGroupCall(e, exit->second))
      out = wrapRelease(groups_[exit->second].releaseIds, out);

    auto point = pointAt_.find(e.id);
    if (point == pointAt_.end())
      return out;
    std::size_t pi = point->second;
    if (tailPoints_.count(pi))
      return build::let(kLockVar, build::call("acquireLock", {pointId(pi)}),
                        out);
    return wrapPlain(pointId(pi), out);
  }

  const ProgramModel &model_;
  const DependencyAnalysis &analysis_;
  const CellPlan &plan_;
  const InstrumentOptions &options_;
  std::map<NodeId, std::size_t> pointAt_;
  std::vector<Group> groups_;
  std::map<NodeId, std::size_t> tailOf_;
  std::map<NodeId, std::size_t> exits_;
  std::set<std::size_t> tailPoints_;
  std::vector<std::string> warnings_;
};

} // namespace

std::set<std::string> pointCellVertices(const ProgramModel &model,
                                        const DependencyAnalysis &analysis) {
  std::set<std::string> out;
  for (std::size_t pi = 0; pi < analysis.points.size(); ++pi) {
    const auto &inst = analysis.instances[pi];
    if (inst.size() < 2)
      continue;
    std::set<ContextString> contexts;
    for (const auto &[ctx, id] : inst)
      contexts.insert(ctx);
    auto t = buildSwitchTree(model.graph, model.colors,
                             analysis.points[pi].function, contexts);
    auto vs = readVertices(t);
    out.insert(vs.begin(), vs.end());
  }
  return out;
}

InstrumentResult instrumentProgram(const ProgramModel &model,
                                   const DependencyAnalysis &analysis,
                                   const CellPlan &plan,
                                   const InstrumentOptions &options) {
  return Instrumenter(model, analysis, plan, options).run();
}

std::int64_t ObservationRow::cost(int id) const {
  auto it = points.find(id);
  return it == points.end() ? 0 : it->second.cost;
}

ObservationRow &ObservationRow::operator+=(const ObservationRow &o) {
  for (const auto &[id, log] : o.points) {
    points[id].cost += log.cost;
    points[id].count += log.count;
  }
  total += o.total;
  return *this;
}

ObservationRow observe(const InstrumentationState &state, std::int64_t total) {
  ObservationRow row;
  for (std::size_t i = 0; i < state.log.size(); ++i)
    if (state.log[i].count != 0 || state.log[i].cost != 0)
      row.points[static_cast<int>(i + 1)] = state.log[i];
  row.total = total;
  return row;
}

std::string emitLog(const ObservationRow &row) {
  std::ostringstream out;
  for (const auto &[id, log] : row.points)
    out << "mp " << id << ' ' << log.cost << ' ' << log.count << '\n';
  out << "total " << row.total << '\n';
  return out.str();
}

ObservationRow parseLog(const std::string &text) {
  ObservationRow row;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  bool sawTotal = false;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty())
      continue;
    auto bad = [&](const std::string &why) {
      return MalformedLog("log line " + std::to_string(lineNo) + ": " + why);
    };
    if (sawTotal)
      throw bad("content after the total line");
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    if (tag == "mp") {
      int id = 0;
      PointLog log;
      if (!(fields >> id >> log.cost >> log.count) || id < 1 || log.cost < 0 ||
          log.count < 0)
        throw bad("expected `mp <id> <cost> <count>`");
      if (!row.points.emplace(id, log).second)
        throw bad("duplicate point " + std::to_string(id));
    } else if (tag == "total") {
      if (!(fields >> row.total))
        throw bad("expected `total <cost>`");
      sawTotal = true;
    } else {
      throw bad("unknown record '" + tag + "'");
    }
    std::string rest;
    if (fields >> rest)
      throw bad("trailing text");
  }
  if (!sawTotal)
    throw MalformedLog("log has no total line");
  return row;
}

} // namespace holetune
