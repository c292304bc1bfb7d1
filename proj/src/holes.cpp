#include "holetune/holes.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace holetune {

FunctionTable::FunctionTable(const Program &program, const Bindings &bindings)
    : owner_(program.size(), 0) {
  functions_.push_back({kTopVertex, kNoNode, kNoVar});
  std::map<std::string, int> seen{{kTopVertex, 1}};

  auto addFunction = [&](const std::string &name, const Expr &rhs, VarId v) {
    int &count = seen[name];
    ++count;
    std::string unique = count == 1 ? name : name + "#" + std::to_string(count);
    functions_.push_back({unique, rhs.id, v});
    return static_cast<int>(functions_.size() - 1);
  };

  std::function<void(const Expr &, int)> walk = [&](const Expr &e, int owner) {
    owner_[e.id] = owner;
    switch (e.kind) {
    case ExprKind::Let:
      if (e.child(0).kind == ExprKind::Lam) {
        int f = addFunction(e.name, e.child(0), bindings.binder(e.id));
        walk(e.child(0), f);
      } else {
        walk(e.child(0), owner);
      }
      walk(e.child(1), owner);
      return;
    case ExprKind::RecLet:
      for (std::size_t i = 0; i < e.binders.size(); ++i) {
        const Expr &rhs = *e.kids[i];
        if (rhs.kind == ExprKind::Lam) {
          int f = addFunction(e.binders[i], rhs,
                              bindings.binder(e.id, static_cast<int>(i)));
          walk(rhs, f);
        } else {
          walk(rhs, owner);
        }
      }
      walk(*e.kids.back(), owner);
      return;
    default:
      for (const auto &k : e.kids)
        walk(*k, owner);
    }
  };
  walk(program.root(), 0);
}

int FunctionTable::indexOf(const std::string &name) const {
  for (std::size_t i = 0; i < functions_.size(); ++i)
    if (functions_[i].name == name)
      return static_cast<int>(i);
  return -1;
}

int FunctionTable::functionOfLambda(NodeId lambda) const {
  for (std::size_t i = 1; i < functions_.size(); ++i)
    if (functions_[i].lambda == lambda)
      return static_cast<int>(i);
  return -1;
}

int FunctionTable::functionOfVar(VarId v) const {
  if (v == kNoVar)
    return -1;
  for (std::size_t i = 1; i < functions_.size(); ++i)
    if (functions_[i].var == v)
      return static_cast<int>(i);
  return -1;
}

std::vector<BaseHole> listHoles(const Program &program,
                                const FunctionTable &functions) {
  std::vector<BaseHole> holes;
  for (std::size_t id = 0; id < program.size(); ++id) {
    const Expr &e = program.node(static_cast<NodeId>(id));
    if (e.kind != ExprKind::Hole)
      continue;
    BaseHole h;
    h.id = static_cast<int>(holes.size()) + 1;
    h.spec = e.hole;
    h.node = e.id;
    h.home = functions.at(functions.ownerOf(e.id)).name;
    NodeId parent = program.parent(e.id);
    if (parent != kNoNode) {
      const Expr &p = program.node(parent);
      if (p.kind == ExprKind::Let && p.kids[0].get() == &e)
        h.name = p.name;
    }
    if (h.name.empty())
      h.name = "anon@" + std::to_string(e.loc.line) + ":" +
               std::to_string(e.loc.column);
    holes.push_back(std::move(h));
  }
  std::map<std::string, int> counts;
  for (const auto &h : holes)
    ++counts[h.name];
  for (auto &h : holes)
    if (counts[h.name] > 1)
      h.name += "@" + std::to_string(program.node(h.node).loc.line) + ":" +
                std::to_string(program.node(h.node).loc.column);
  return holes;
}

std::vector<BaseHole> listHoles(const Program &program) {
  Bindings bindings(program);
  FunctionTable functions(program, bindings);
  return listHoles(program, functions);
}

namespace {

ExprPtr replaceHoles(const Expr &e) {
  if (e.kind == ExprKind::Hole) {
    ExprPtr lit = e.hole.kind == HoleKind::Boolean
                      ? build::boolLit(e.hole.defaultValue != 0)
                      : build::intLit(e.hole.defaultValue);
    lit->loc = e.loc;
    lit->origin = e.origin;
    return lit;
  }
  auto copy = cloneNode(e);
  for (const auto &k : e.kids)
    copy->kids.push_back(replaceHoles(*k));
  return copy;
}

} // namespace

Program defaultize(const Program &program) {
  return Program(replaceHoles(program.root()), false, program.file());
}

std::vector<std::int64_t> holeDomain(const HoleSpec &spec) {
  if (spec.kind == HoleKind::Boolean)
    return {0, 1};
  std::set<std::int64_t> values;
  for (std::int64_t v = spec.min; v <= spec.max; v += spec.step)
    values.insert(v);
  values.insert(spec.defaultValue);
  return {values.begin(), values.end()};
}

std::string holeValueText(const HoleSpec &spec, std::int64_t v) {
  if (spec.kind == HoleKind::Boolean)
    return v ? "true" : "false";
  return std::to_string(v);
}

} // namespace holetune
