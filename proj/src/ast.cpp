#include "holetune/ast.hpp"

#include <functional>

namespace holetune {

const char *kindName(ExprKind kind) {
  switch (kind) {
  case ExprKind::Var:
    return "var";
  case ExprKind::Lam:
    return "lam";
  case ExprKind::App:
    return "app";
  case ExprKind::Let:
    return "let";
  case ExprKind::RecLet:
    return "recursive-let";
  case ExprKind::Int:
    return "int";
  case ExprKind::Bool:
    return "bool";
  case ExprKind::Seq:
    return "seq";
  case ExprKind::Match:
    return "match";
  case ExprKind::Hole:
    return "hole";
  case ExprKind::Independent:
    return "independent";
  }
  return "?";
}

ExprPtr cloneNode(const Expr &e) {
  auto copy = std::make_shared<Expr>();
  copy->kind = e.kind;
  copy->loc = e.loc;
  copy->origin = e.origin;
  copy->name = e.name;
  copy->binders = e.binders;
  copy->intValue = e.intValue;
  copy->boolValue = e.boolValue;
  copy->isIf = e.isIf;
  copy->pattern = e.pattern;
  copy->hole = e.hole;
  return copy;
}

ExprPtr clone(const Expr &e) {
  auto copy = cloneNode(e);
  copy->kids.reserve(e.kids.size());
  for (const auto &k : e.kids)
    copy->kids.push_back(clone(*k));
  return copy;
}

bool structurallyEqual(const Expr &a, const Expr &b) {
  if (a.kind != b.kind || a.kids.size() != b.kids.size())
    return false;
  switch (a.kind) {
  case ExprKind::Var:
  case ExprKind::Lam:
  case ExprKind::Let:
    if (a.name != b.name)
      return false;
    break;
  case ExprKind::RecLet:
    if (a.binders != b.binders)
      return false;
    break;
  case ExprKind::Int:
    if (a.intValue != b.intValue)
      return false;
    break;
  case ExprKind::Bool:
    if (a.boolValue != b.boolValue)
      return false;
    break;
  case ExprKind::Match:
    if (a.isIf != b.isIf || !(a.pattern == b.pattern))
      return false;
    break;
  case ExprKind::Hole:
    if (!(a.hole == b.hole))
      return false;
    break;
  default:
    break;
  }
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!structurallyEqual(*a.kids[i], *b.kids[i]))
      return false;
  return true;
}

Program::Program(ExprPtr root, bool isSource, std::string file)
    : root_(std::move(root)), file_(std::move(file)) {
  // Iterative preorder so very deep trees do not exhaust the stack.
  std::vector<std::pair<Expr *, NodeId>> stack{{root_.get(), kNoNode}};
  while (!stack.empty()) {
    auto [e, parent] = stack.back();
    stack.pop_back();
    e->id = static_cast<NodeId>(nodes_.size());
    if (isSource)
      e->origin = e->id;
    nodes_.push_back(e);
    parents_.push_back(parent);
    for (auto it = e->kids.rbegin(); it != e->kids.rend(); ++it)
      stack.emplace_back(it->get(), e->id);
  }
  for (const Expr *e : nodes_) {
    if (e->origin == kNoNode)
      continue;
    if (byOrigin_.size() <= static_cast<std::size_t>(e->origin))
      byOrigin_.resize(e->origin + 1, kNoNode);
    if (byOrigin_[e->origin] == kNoNode)
      byOrigin_[e->origin] = e->id;
  }
}

const Expr *Program::findByOrigin(NodeId origin) const {
  if (origin < 0 || static_cast<std::size_t>(origin) >= byOrigin_.size())
    return nullptr;
  NodeId id = byOrigin_[origin];
  return id == kNoNode ? nullptr : nodes_[id];
}

namespace build {

namespace {
ExprPtr make(ExprKind kind) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  return e;
}
} // namespace

ExprPtr var(std::string name) {
  auto e = make(ExprKind::Var);
  e->name = std::move(name);
  return e;
}

ExprPtr lam(std::string param, ExprPtr body) {
  auto e = make(ExprKind::Lam);
  e->name = std::move(param);
  e->kids.push_back(std::move(body));
  return e;
}

ExprPtr app(ExprPtr fn, std::vector<ExprPtr> args) {
  auto e = make(ExprKind::App);
  e->kids.push_back(std::move(fn));
  for (auto &a : args)
    e->kids.push_back(std::move(a));
  return e;
}

ExprPtr call(const std::string &fn, std::vector<ExprPtr> args) {
  return app(var(fn), std::move(args));
}

ExprPtr let(std::string binder, ExprPtr rhs, ExprPtr body) {
  auto e = make(ExprKind::Let);
  e->name = std::move(binder);
  e->kids.push_back(std::move(rhs));
  e->kids.push_back(std::move(body));
  return e;
}

ExprPtr recLet(std::vector<std::string> binders, std::vector<ExprPtr> rhs,
               ExprPtr body) {
  auto e = make(ExprKind::RecLet);
  e->binders = std::move(binders);
  for (auto &r : rhs)
    e->kids.push_back(std::move(r));
  e->kids.push_back(std::move(body));
  return e;
}

ExprPtr intLit(std::int64_t v) {
  auto e = make(ExprKind::Int);
  e->intValue = v;
  return e;
}

ExprPtr boolLit(bool v) {
  auto e = make(ExprKind::Bool);
  e->boolValue = v;
  return e;
}

ExprPtr seq(std::vector<ExprPtr> elems) {
  auto e = make(ExprKind::Seq);
  e->kids = std::move(elems);
  return e;
}

ExprPtr match(ExprPtr scrutinee, Pattern pat, ExprPtr then, ExprPtr otherwise) {
  auto e = make(ExprKind::Match);
  e->pattern = std::move(pat);
  e->kids = {std::move(scrutinee), std::move(then), std::move(otherwise)};
  return e;
}

ExprPtr ifThenElse(ExprPtr cond, ExprPtr then, ExprPtr otherwise) {
  auto e = match(std::move(cond), boolPattern(true), std::move(then),
                 std::move(otherwise));
  e->isIf = true;
  return e;
}

ExprPtr hole(HoleSpec spec) {
  auto e = make(ExprKind::Hole);
  e->hole = spec;
  return e;
}

ExprPtr independent(ExprPtr inner, std::string v) {
  auto e = make(ExprKind::Independent);
  e->kids = {std::move(inner), var(std::move(v))};
  return e;
}

Pattern intPattern(std::int64_t v) {
  Pattern p;
  p.kind = PatternKind::Int;
  p.intValue = v;
  return p;
}

Pattern boolPattern(bool v) {
  Pattern p;
  p.kind = PatternKind::Bool;
  p.boolValue = v;
  return p;
}

Pattern varPattern(std::string name) {
  Pattern p;
  p.kind = PatternKind::Var;
  p.name = std::move(name);
  return p;
}

Pattern wildcard() { return Pattern{}; }

} // namespace build

} // namespace holetune
