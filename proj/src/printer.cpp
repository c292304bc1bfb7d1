#include "holetune/printer.hpp"

#include <sstream>

namespace holetune {

namespace {

enum class Ctx { Top, Head, Arg };

class Printer {
public:
  std::string run(const Expr &e) {
    print(e, Ctx::Top, 0);
    out_ << '\n';
    return out_.str();
  }

private:
  void newline(int indent) {
    out_ << '\n';
    for (int i = 0; i < indent; ++i)
      out_ << "  ";
  }

  static bool isCompound(const Expr &e) {
    switch (e.kind) {
    case ExprKind::Let:
    case ExprKind::RecLet:
    case ExprKind::Lam:
    case ExprKind::Match:
    case ExprKind::Independent:
      return true;
    default:
      return false;
    }
  }

  void pattern(const Pattern &p) {
    switch (p.kind) {
    case PatternKind::Wildcard:
      out_ << '_';
      break;
    case PatternKind::Var:
      out_ << p.name;
      break;
    case PatternKind::Int:
      out_ << p.intValue;
      break;
    case PatternKind::Bool:
      out_ << (p.boolValue ? "true" : "false");
      break;
    }
  }

  void print(const Expr &e, Ctx ctx, int indent) {
    bool parens = (isCompound(e) && ctx != Ctx::Top) ||
                  (e.kind == ExprKind::App && ctx != Ctx::Top);
    if (parens) {
      out_ << '(';
      // A compound argument opens its own indentation level.
      printBare(e, indent + 1);
      out_ << ')';
    } else {
      printBare(e, indent);
    }
  }

  void printBare(const Expr &e, int indent) {
    switch (e.kind) {
    case ExprKind::Var:
      out_ << e.name;
      break;
    case ExprKind::Int:
      out_ << e.intValue;
      break;
    case ExprKind::Bool:
      out_ << (e.boolValue ? "true" : "false");
      break;
    case ExprKind::Hole:
      out_ << "hole (" << holeSpecText(e.hole) << ")";
      break;
    case ExprKind::Seq:
      out_ << '[';
      for (std::size_t i = 0; i < e.kids.size(); ++i) {
        if (i)
          out_ << ", ";
        print(*e.kids[i], Ctx::Top, indent);
      }
      out_ << ']';
      break;
    case ExprKind::App:
      print(*e.kids[0], Ctx::Head, indent);
      for (std::size_t i = 1; i < e.kids.size(); ++i) {
        out_ << ' ';
        print(*e.kids[i], Ctx::Arg, indent);
      }
      break;
    case ExprKind::Lam:
      out_ << "lam " << e.name << ". ";
      if (isCompound(e.child(0))) {
        newline(indent + 1);
        print(e.child(0), Ctx::Top, indent + 1);
      } else {
        print(e.child(0), Ctx::Top, indent);
      }
      break;
    case ExprKind::Let:
      out_ << "let " << e.name << " = ";
      print(e.child(0), Ctx::Top, indent + 1);
      out_ << " in";
      newline(indent);
      print(e.child(1), Ctx::Top, indent);
      break;
    case ExprKind::RecLet:
      out_ << "recursive";
      for (std::size_t i = 0; i < e.binders.size(); ++i) {
        newline(indent);
        out_ << (i == 0 ? "let " : "and ") << e.binders[i] << " = ";
        print(*e.kids[i], Ctx::Top, indent + 1);
      }
      out_ << " in";
      newline(indent);
      print(*e.kids.back(), Ctx::Top, indent);
      break;
    case ExprKind::Match:
      if (e.isIf) {
        out_ << "if ";
        print(e.child(0), Ctx::Top, indent + 1);
        out_ << " then";
      } else {
        out_ << "match ";
        print(e.child(0), Ctx::Top, indent + 1);
        out_ << " with ";
        pattern(e.pattern);
        out_ << " then";
      }
      newline(indent + 1);
      print(e.child(1), Ctx::Top, indent + 1);
      newline(indent);
      out_ << "else";
      newline(indent + 1);
      print(e.child(2), Ctx::Top, indent + 1);
      break;
    case ExprKind::Independent:
      out_ << "independent ";
      print(e.child(0), Ctx::Arg, indent);
      out_ << ' ' << e.child(1).name;
      break;
    }
  }

  std::ostringstream out_;
};

} // namespace

std::string holeSpecText(const HoleSpec &spec) {
  std::ostringstream os;
  if (spec.kind == HoleKind::Boolean) {
    os << "Boolean {default = " << (spec.defaultValue ? "true" : "false")
       << ", depth = " << spec.depth << "}";
  } else {
    os << "IntRange {default = " << spec.defaultValue << ", min = " << spec.min
       << ", max = " << spec.max << ", step = " << spec.step
       << ", depth = " << spec.depth << "}";
  }
  return os.str();
}

std::string prettyPrint(const Expr &e) { return Printer().run(e); }

std::string prettyPrint(const Program &p) { return prettyPrint(p.root()); }

} // namespace holetune
