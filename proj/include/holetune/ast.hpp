#pragma once

#include "holetune/errors.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace holetune {

using NodeId = int;
inline constexpr NodeId kNoNode = -1;

enum class ExprKind {
  Var,
  Lam,
  App,
  Let,
  RecLet,
  Int,
  Bool,
  Seq,
  Match,
  Hole,
  Independent,
};

const char *kindName(ExprKind kind);

enum class PatternKind { Wildcard, Var, Int, Bool };

struct Pattern {
  PatternKind kind = PatternKind::Wildcard;
  std::string name;
  std::int64_t intValue = 0;
  bool boolValue = false;

  bool operator==(const Pattern &) const = default;
};

enum class HoleKind { Boolean, IntRange };

/// The record written inside `hole (...)`. Boolean defaults are stored as 0/1.
struct HoleSpec {
  HoleKind kind = HoleKind::Boolean;
  std::int64_t defaultValue = 0;
  std::int64_t min = 0;
  std::int64_t max = 1;
  std::int64_t step = 1;
  int depth = 0;

  bool operator==(const HoleSpec &) const = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

/// One AST node. Children layout per kind:
///   Lam [body]; App [fn, arg...]; Let [rhs, body]; RecLet [rhs..., body];
///   Seq [elem...]; Match [scrutinee, then, else]; Independent [inner, var].
struct Expr {
  ExprKind kind = ExprKind::Int;
  SourceLoc loc;
  NodeId id = kNoNode;
  /// Id of the node in the source program this node descends from, or
  /// kNoNode for nodes synthesized by a transformation.
  NodeId origin = kNoNode;

  std::string name;                 // Var, Lam parameter, Let binder
  std::vector<std::string> binders; // RecLet
  std::int64_t intValue = 0;
  bool boolValue = false;
  bool isIf = false; // Match written as if-then-else
  Pattern pattern;
  HoleSpec hole;
  std::vector<ExprPtr> kids;

  const Expr &child(std::size_t i) const { return *kids.at(i); }
};

ExprPtr clone(const Expr &e);
/// Copies the node payload without children.
ExprPtr cloneNode(const Expr &e);

/// Equality on shape and payload; ids, origins and locations are ignored.
bool structurallyEqual(const Expr &a, const Expr &b);

/// An expression tree with preorder node ids and parent links. Construction
/// numbers the tree in place, so the tree must not be shared with another
/// Program.
class Program {
public:
  Program() = default;
  /// `isSource` marks a freshly parsed program: every node becomes its own
  /// origin.
  explicit Program(ExprPtr root, bool isSource = true, std::string file = {});

  const Expr &root() const { return *root_; }
  const ExprPtr &rootPtr() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  const Expr &node(NodeId id) const { return *nodes_.at(id); }
  NodeId parent(NodeId id) const { return parents_.at(id); }
  const std::string &file() const { return file_; }

  /// Node in this program whose origin is `origin`, or nullptr.
  const Expr *findByOrigin(NodeId origin) const;

private:
  ExprPtr root_;
  std::vector<const Expr *> nodes_;
  std::vector<NodeId> parents_;
  std::vector<NodeId> byOrigin_;
  std::string file_;
};

namespace build {

ExprPtr var(std::string name);
ExprPtr lam(std::string param, ExprPtr body);
ExprPtr app(ExprPtr fn, std::vector<ExprPtr> args);
ExprPtr call(const std::string &fn, std::vector<ExprPtr> args);
ExprPtr let(std::string binder, ExprPtr rhs, ExprPtr body);
ExprPtr recLet(std::vector<std::string> binders, std::vector<ExprPtr> rhs,
               ExprPtr body);
ExprPtr intLit(std::int64_t v);
ExprPtr boolLit(bool v);
ExprPtr seq(std::vector<ExprPtr> elems);
ExprPtr match(ExprPtr scrutinee, Pattern pat, ExprPtr then, ExprPtr otherwise);
ExprPtr ifThenElse(ExprPtr cond, ExprPtr then, ExprPtr otherwise);
ExprPtr hole(HoleSpec spec);
ExprPtr independent(ExprPtr inner, std::string var);

Pattern intPattern(std::int64_t v);
Pattern boolPattern(bool v);
Pattern varPattern(std::string name);
Pattern wildcard();

} // namespace build

} // namespace holetune
