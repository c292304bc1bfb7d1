#include "holetune/parser.hpp"

#include <cctype>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace holetune {

namespace {

enum class Tok {
  Ident,
  Int,
  Keyword,
  Symbol,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  SourceLoc loc;
};

const std::set<std::string, std::less<>> kKeywords = {
    "let",   "in",    "recursive", "and",   "lam",         "if",
    "then",  "else",  "match",     "with",  "hole",        "independent",
    "true",  "false",
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skipTrivia();
      Token t;
      t.loc = {line_, col_};
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '-' && pos_ + 1 < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        std::size_t start = pos_;
        advance();
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_])))
          advance();
        t.kind = Tok::Int;
        t.text = std::string(src_.substr(start, pos_ - start));
        try {
          t.value = std::stoll(t.text);
        } catch (const std::exception &) {
          throw SyntaxError(t.loc, "integer literal out of range");
        }
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() && isIdentChar(src_[pos_]))
          advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = kKeywords.count(t.text) ? Tok::Keyword : Tok::Ident;
      } else if (std::string_view("=.()[]{},").find(c) !=
                 std::string_view::npos) {
        t.kind = Tok::Symbol;
        t.text = std::string(1, c);
        advance();
      } else {
        throw SyntaxError(t.loc, std::string("unexpected character '") + c +
                                     "'");
      }
      out.push_back(std::move(t));
    }
  }

private:
  static bool isIdentChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '\'' || c == '#';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skipTrivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n')
          advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ExprPtr program() {
    auto e = expr();
    if (peek().kind != Tok::End)
      fail("unexpected '" + peek().text + "' after expression");
    return e;
  }

private:
  const Token &peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string &msg) const {
    throw SyntaxError(peek().loc, msg);
  }

  bool isKeyword(std::string_view kw) const {
    return peek().kind == Tok::Keyword && peek().text == kw;
  }
  bool isSymbol(std::string_view s) const {
    return peek().kind == Tok::Symbol && peek().text == s;
  }

  void expectKeyword(std::string_view kw) {
    if (!isKeyword(kw))
      fail("expected '" + std::string(kw) + "'");
    next();
  }
  void expectSymbol(std::string_view s) {
    if (!isSymbol(s))
      fail("expected '" + std::string(s) + "'");
    next();
  }
  std::string ident() {
    if (peek().kind != Tok::Ident)
      fail("expected identifier");
    return next().text;
  }

  static ExprPtr at(ExprPtr e, SourceLoc loc) {
    e->loc = loc;
    return e;
  }

  ExprPtr expr() {
    SourceLoc loc = peek().loc;
    if (isKeyword("let")) {
      next();
      std::string name = ident();
      expectSymbol("=");
      auto rhs = expr();
      expectKeyword("in");
      auto body = expr();
      return at(build::let(std::move(name), std::move(rhs), std::move(body)),
                loc);
    }
    if (isKeyword("recursive")) {
      next();
      expectKeyword("let");
      std::vector<std::string> names;
      std::vector<ExprPtr> rhs;
      for (;;) {
        names.push_back(ident());
        expectSymbol("=");
        rhs.push_back(expr());
        if (isKeyword("and")) {
          next();
          continue;
        }
        break;
      }
      expectKeyword("in");
      auto body = expr();
      return at(build::recLet(std::move(names), std::move(rhs),
                              std::move(body)),
                loc);
    }
    if (isKeyword("lam")) {
      next();
      std::string param = ident();
      expectSymbol(".");
      auto body = expr();
      return at(build::lam(std::move(param), std::move(body)), loc);
    }
    if (isKeyword("if")) {
      next();
      auto c = expr();
      expectKeyword("then");
      auto t = expr();
      expectKeyword("else");
      auto f = expr();
      return at(build::ifThenElse(std::move(c), std::move(t), std::move(f)),
                loc);
    }
    if (isKeyword("match")) {
      next();
      auto s = expr();
      expectKeyword("with");
      Pattern p = pattern();
      expectKeyword("then");
      auto t = expr();
      expectKeyword("else");
      auto f = expr();
      return at(build::match(std::move(s), std::move(p), std::move(t),
                             std::move(f)),
                loc);
    }
    if (isKeyword("independent")) {
      next();
      SourceLoc innerLoc = peek().loc;
      auto inner = atom();
      if (inner->kind != ExprKind::Match &&
          inner->kind != ExprKind::Independent)
        throw SyntaxError(innerLoc,
                          "'independent' must wrap a match expression");
      SourceLoc varLoc = peek().loc;
      auto e = build::independent(std::move(inner), ident());
      e->kids[1]->loc = varLoc;
      return at(e, loc);
    }
    return application();
  }

  bool atomStart() const {
    const Token &t = peek();
    if (t.kind == Tok::Ident || t.kind == Tok::Int)
      return true;
    if (t.kind == Tok::Keyword)
      return t.text == "true" || t.text == "false" || t.text == "hole";
    if (t.kind == Tok::Symbol)
      return t.text == "(" || t.text == "[";
    return false;
  }

  ExprPtr application() {
    SourceLoc loc = peek().loc;
    if (!atomStart())
      fail(peek().kind == Tok::End ? "unexpected end of input"
                                   : "unexpected '" + peek().text + "'");
    auto head = atom();
    std::vector<ExprPtr> args;
    while (atomStart())
      args.push_back(atom());
    if (args.empty())
      return head;
    return at(build::app(std::move(head), std::move(args)), loc);
  }

  ExprPtr atom() {
    SourceLoc loc = peek().loc;
    const Token &t = peek();
    if (t.kind == Tok::Int)
      return at(build::intLit(next().value), loc);
    if (t.kind == Tok::Ident)
      return at(build::var(next().text), loc);
    if (isKeyword("true") || isKeyword("false"))
      return at(build::boolLit(next().text == "true"), loc);
    if (isKeyword("hole"))
      return holeExpr();
    if (isSymbol("(")) {
      next();
      auto e = expr();
      expectSymbol(")");
      return e;
    }
    if (isSymbol("[")) {
      next();
      std::vector<ExprPtr> elems;
      if (!isSymbol("]")) {
        elems.push_back(expr());
        while (isSymbol(",")) {
          next();
          elems.push_back(expr());
        }
      }
      expectSymbol("]");
      return at(build::seq(std::move(elems)), loc);
    }
    fail("expected expression");
  }

  Pattern pattern() {
    const Token &t = peek();
    if (t.kind == Tok::Int)
      return build::intPattern(next().value);
    if (isKeyword("true") || isKeyword("false"))
      return build::boolPattern(next().text == "true");
    if (t.kind == Tok::Ident) {
      std::string name = next().text;
      return name == "_" ? build::wildcard() : build::varPattern(name);
    }
    fail("expected pattern");
  }

  ExprPtr holeExpr() {
    SourceLoc loc = peek().loc;
    expectKeyword("hole");
    expectSymbol("(");
    SourceLoc kindLoc = peek().loc;
    std::string kindName = ident();
    HoleSpec spec;
    if (kindName == "Boolean")
      spec.kind = HoleKind::Boolean;
    else if (kindName == "IntRange")
      spec.kind = HoleKind::IntRange;
    else
      throw SyntaxError(kindLoc, "unknown hole type '" + kindName + "'");
    expectSymbol("{");
    std::set<std::string> seen;
    bool hasMin = false, hasMax = false, hasDefault = false;
    while (!isSymbol("}")) {
      SourceLoc fieldLoc = peek().loc;
      std::string field = ident();
      if (!seen.insert(field).second)
        throw SyntaxError(fieldLoc, "duplicate hole field '" + field + "'");
      expectSymbol("=");
      std::int64_t value = 0;
      bool isBool = false;
      if (peek().kind == Tok::Int) {
        value = next().value;
      } else if (isKeyword("true") || isKeyword("false")) {
        value = next().text == "true" ? 1 : 0;
        isBool = true;
      } else {
        fail("expected integer or boolean field value");
      }
      bool boolField = spec.kind == HoleKind::Boolean && field == "default";
      if (boolField != isBool)
        throw SyntaxError(fieldLoc, "ill-typed value for hole field '" +
                                        field + "'");
      if (field == "default") {
        spec.defaultValue = value;
        hasDefault = true;
      } else if (field == "depth") {
        if (value < 0)
          throw SyntaxError(fieldLoc, "depth must be non-negative");
        spec.depth = static_cast<int>(value);
      } else if (spec.kind == HoleKind::IntRange && field == "min") {
        spec.min = value;
        hasMin = true;
      } else if (spec.kind == HoleKind::IntRange && field == "max") {
        spec.max = value;
        hasMax = true;
      } else if (spec.kind == HoleKind::IntRange && field == "step") {
        if (value <= 0)
          throw SyntaxError(fieldLoc, "step must be positive");
        spec.step = value;
      } else {
        throw SyntaxError(fieldLoc, "unknown hole field '" + field + "'");
      }
      if (isSymbol(","))
        next();
      else if (!isSymbol("}"))
        fail("expected ',' or '}'");
    }
    expectSymbol("}");
    expectSymbol(")");
    if (!hasDefault)
      throw SyntaxError(loc, "hole requires a default value");
    if (spec.kind == HoleKind::IntRange) {
      if (!hasMin || !hasMax)
        throw SyntaxError(loc, "IntRange hole requires min and max");
      if (spec.min > spec.defaultValue || spec.defaultValue > spec.max)
        throw SyntaxError(loc, "IntRange default must lie in [min, max]");
    } else {
      spec.min = 0;
      spec.max = 1;
    }
    return at(build::hole(spec), loc);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

} // namespace

ExprPtr parseExpr(std::string_view source) {
  Lexer lexer(source);
  Parser parser(lexer.run());
  return parser.program();
}

Program parse(std::string_view source, std::string file) {
  return Program(parseExpr(source), true, std::move(file));
}

Program parseFile(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

} // namespace holetune
