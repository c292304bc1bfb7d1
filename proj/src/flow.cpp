#include "holetune/flow.hpp"

#include "holetune/builtins.hpp"

#include <algorithm>

namespace holetune {

const BuiltinInfo *appBuiltin(const Program &, const Bindings &bindings,
                              const Expr &app) {
  const Expr &head = app.child(0);
  if (head.kind != ExprKind::Var || bindings.use(head.id) != kNoVar)
    return nullptr;
  return findBuiltin(head.name);
}

namespace {

bool returnsScalar(Builtin b) {
  switch (b) {
  case Builtin::Addi:
  case Builtin::Subi:
  case Builtin::Muli:
  case Builtin::Divi:
  case Builtin::Modi:
  case Builtin::Lti:
  case Builtin::Leqi:
  case Builtin::Eqi:
  case Builtin::Length:
  case Builtin::Assert:
  case Builtin::ArgInt:
  case Builtin::ThreadId:
  case Builtin::HoleValue:
  case Builtin::AcquireLock:
  case Builtin::ReleaseLock:
    return true;
  default:
    return false;
  }
}

class Solver {
public:
  Solver(const Program &p, const Bindings &b, const std::vector<BaseHole> &holes)
      : p_(p), b_(b), holeOf_(p.size(), 0) {
    for (const auto &h : holes)
      holeOf_[h.node] = h.id;
    f_.nodes.resize(p.size());
    f_.vars.resize(b.varCount());
    f_.applied.resize(p.size());
    // Independent annotations: for each match, the Var nodes naming the
    // variables it is declared independent of.
    indep_.resize(p.size());
    for (std::size_t id = 0; id < p.size(); ++id) {
      const Expr &e = p.node(static_cast<NodeId>(id));
      if (e.kind != ExprKind::Independent)
        continue;
      const Expr *inner = &e.child(0);
      while (inner->kind == ExprKind::Independent)
        inner = &inner->child(0);
      if (inner->kind == ExprKind::Match)
        indep_[inner->id].push_back(e.child(1).id);
    }
  }

  FlowFacts run() {
    do {
      changed_ = false;
      ++f_.rounds;
      for (std::size_t id = 0; id < p_.size(); ++id)
        step(p_.node(static_cast<NodeId>(id)));
    } while (changed_);
    return std::move(f_);
  }

private:
  void join(AbstractValue &into, const AbstractValue &from) {
    for (NodeId l : from.lambdas)
      changed_ |= into.lambdas.insert(l).second;
    for (int d : from.deps)
      changed_ |= into.deps.insert(d).second;
  }
  void joinDeps(AbstractValue &into, const std::set<int> &deps) {
    for (int d : deps)
      changed_ |= into.deps.insert(d).second;
  }
  void joinLambdas(AbstractValue &into, const std::set<NodeId> &lambdas) {
    for (NodeId l : lambdas)
      changed_ |= into.lambdas.insert(l).second;
  }
  AbstractValue &node(NodeId n) { return f_.nodes[n]; }
  AbstractValue &var(VarId v) { return f_.vars[v]; }
  AbstractValue &param(NodeId lambda) { return var(b_.binder(lambda)); }
  const AbstractValue &body(NodeId lambda) {
    return node(p_.node(lambda).child(0).id);
  }

  void step(const Expr &e) {
    AbstractValue &self = node(e.id);
    switch (e.kind) {
    case ExprKind::Int:
    case ExprKind::Bool:
      return;
    case ExprKind::Var: {
      VarId v = b_.use(e.id);
      if (v != kNoVar)
        join(self, var(v));
      return;
    }
    case ExprKind::Lam:
      changed_ |= self.lambdas.insert(e.id).second;
      return;
    case ExprKind::Let:
      join(var(b_.binder(e.id)), node(e.child(0).id));
      join(self, node(e.child(1).id));
      return;
    case ExprKind::RecLet:
      for (std::size_t i = 0; i < e.binders.size(); ++i)
        join(var(b_.binder(e.id, static_cast<int>(i))), node(e.kids[i]->id));
      join(self, node(e.kids.back()->id));
      return;
    case ExprKind::Seq:
      for (const auto &k : e.kids)
        join(self, node(k->id));
      return;
    case ExprKind::Match: {
      const AbstractValue &scrut = node(e.child(0).id);
      if (e.pattern.kind == PatternKind::Var)
        join(var(b_.binder(e.id)), scrut);
      AbstractValue result = node(e.child(1).id);
      for (NodeId l : node(e.child(2).id).lambdas)
        result.lambdas.insert(l);
      for (int d : node(e.child(2).id).deps)
        result.deps.insert(d);
      for (int d : scrut.deps)
        result.deps.insert(d);
      for (NodeId x : indep_[e.id])
        for (int d : node(x).deps)
          result.deps.erase(d);
      join(self, result);
      return;
    }
    case ExprKind::Hole:
      changed_ |= self.deps.insert(holeOf_[e.id]).second;
      return;
    case ExprKind::Independent:
      join(self, node(e.child(0).id));
      return;
    case ExprKind::App:
      if (const BuiltinInfo *bi = appBuiltin(p_, b_, e))
        stepBuiltin(e, *bi);
      else
        stepApply(e);
      return;
    }
  }

  void stepApply(const Expr &e) {
    AbstractValue &self = node(e.id);
    std::set<NodeId> fns = node(e.child(0).id).lambdas;
    joinDeps(self, node(e.child(0).id).deps);
    for (std::size_t i = 1; i < e.kids.size(); ++i) {
      const AbstractValue &arg = node(e.kids[i]->id);
      std::set<NodeId> next;
      for (NodeId l : fns) {
        changed_ |= f_.applied[e.id].insert(l).second;
        join(param(l), arg);
        const AbstractValue &ret = body(l);
        if (i + 1 == e.kids.size()) {
          join(self, ret);
        } else {
          next.insert(ret.lambdas.begin(), ret.lambdas.end());
          joinDeps(self, ret.deps);
        }
      }
      fns = std::move(next);
    }
  }

  void stepBuiltin(const Expr &e, const BuiltinInfo &bi) {
    AbstractValue &self = node(e.id);
    auto isFnArg = [&](int pos) {
      return std::find(bi.fnArgs.begin(), bi.fnArgs.end(), pos) !=
             bi.fnArgs.end();
    };
    for (std::size_t i = 1; i < e.kids.size(); ++i) {
      const AbstractValue &arg = node(e.kids[i]->id);
      joinDeps(self, arg.deps);
      if (!returnsScalar(bi.id) && !isFnArg(static_cast<int>(i) - 1))
        joinLambdas(self, arg.lambdas);
    }
    for (int pos : bi.fnArgs) {
      if (static_cast<std::size_t>(pos) + 1 >= e.kids.size())
        continue;
      const AbstractValue &fn = node(e.kids[pos + 1]->id);
      // What the applied function receives.
      AbstractValue input;
      if (bi.id == Builtin::ParMap) {
        input = node(e.kids[3]->id);
      } else {
        input.deps = node(e.kids[1]->id).deps;
      }
      std::set<NodeId> fns = fn.lambdas;
      for (NodeId l : fns) {
        changed_ |= f_.applied[e.id].insert(l).second;
        join(param(l), input);
        join(self, body(l));
      }
    }
  }

  const Program &p_;
  const Bindings &b_;
  std::vector<int> holeOf_;
  std::vector<std::vector<NodeId>> indep_;
  FlowFacts f_;
  bool changed_ = false;
};

} // namespace

FlowFacts dataFlow(const Program &program, const Bindings &bindings,
                   const std::vector<BaseHole> &holes) {
  return Solver(program, bindings, holes).run();
}

FlowFacts dataFlow(const Program &program) {
  Bindings bindings(program);
  FunctionTable functions(program, bindings);
  return dataFlow(program, bindings, listHoles(program, functions));
}

} // namespace holetune
