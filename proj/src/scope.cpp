#include "holetune/scope.hpp"

#include "holetune/builtins.hpp"

#include <unordered_map>

namespace holetune {

namespace {

class Resolver {
public:
  Resolver(std::vector<VarId> &useOf, std::vector<VarId> &firstVarOf,
           std::vector<std::string> &names, std::vector<NodeId> &binderNodes,
           std::vector<NodeId> &definitions, std::vector<NodeId> &unbound)
      : useOf_(useOf), firstVarOf_(firstVarOf), names_(names),
        binderNodes_(binderNodes), definitions_(definitions),
        unbound_(unbound) {}

  void walk(const Expr &e) {
    switch (e.kind) {
    case ExprKind::Var: {
      auto it = scope_.find(e.name);
      if (it != scope_.end() && !it->second.empty()) {
        useOf_[e.id] = it->second.back();
      } else if (!findBuiltin(e.name)) {
        unbound_.push_back(e.id);
      }
      return;
    }
    case ExprKind::Lam: {
      VarId v = fresh(e, e.name, kNoNode);
      push(e.name, v);
      walk(e.child(0));
      pop(e.name);
      return;
    }
    case ExprKind::Let: {
      walk(e.child(0));
      VarId v = fresh(e, e.name, e.child(0).id);
      push(e.name, v);
      walk(e.child(1));
      pop(e.name);
      return;
    }
    case ExprKind::RecLet: {
      for (std::size_t i = 0; i < e.binders.size(); ++i)
        push(e.binders[i], fresh(e, e.binders[i], e.kids[i]->id));
      for (const auto &k : e.kids)
        walk(*k);
      for (const auto &b : e.binders)
        pop(b);
      return;
    }
    case ExprKind::Match: {
      walk(e.child(0));
      if (e.pattern.kind == PatternKind::Var) {
        VarId v = fresh(e, e.pattern.name, kNoNode);
        push(e.pattern.name, v);
        walk(e.child(1));
        pop(e.pattern.name);
      } else {
        walk(e.child(1));
      }
      walk(e.child(2));
      return;
    }
    default:
      for (const auto &k : e.kids)
        walk(*k);
    }
  }

private:
  VarId fresh(const Expr &binder, const std::string &name, NodeId def) {
    VarId v = static_cast<VarId>(names_.size());
    names_.push_back(name);
    binderNodes_.push_back(binder.id);
    definitions_.push_back(def);
    if (firstVarOf_[binder.id] == kNoVar)
      firstVarOf_[binder.id] = v;
    return v;
  }
  void push(const std::string &name, VarId v) { scope_[name].push_back(v); }
  void pop(const std::string &name) { scope_[name].pop_back(); }

  std::vector<VarId> &useOf_;
  std::vector<VarId> &firstVarOf_;
  std::vector<std::string> &names_;
  std::vector<NodeId> &binderNodes_;
  std::vector<NodeId> &definitions_;
  std::vector<NodeId> &unbound_;
  std::unordered_map<std::string, std::vector<VarId>> scope_;
};

} // namespace

Bindings::Bindings(const Program &program)
    : useOf_(program.size(), kNoVar), firstVarOf_(program.size(), kNoVar) {
  Resolver r(useOf_, firstVarOf_, names_, binderNodes_, definitions_,
             unbound_);
  r.walk(program.root());
}

VarId Bindings::binder(NodeId binderNode, int index) const {
  VarId first = firstVarOf_.at(binderNode);
  return first == kNoVar ? kNoVar : first + index;
}

} // namespace holetune
