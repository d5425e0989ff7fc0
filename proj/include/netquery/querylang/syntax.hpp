#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "netquery/error.hpp"

namespace netquery::ql {

/// Thrown for malformed programs. Carries the position and what the parser
/// would have accepted there.
class ParseError : public Error {
 public:
  ParseError(int line, int col, std::vector<std::string> expected, const std::string& detail)
      : Error(ErrorCode::SyntaxError, describe(line, col, expected, detail)),
        line_(line),
        col_(col),
        expected_(std::move(expected)) {}

  int line() const { return line_; }
  int col() const { return col_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  static std::string describe(int line, int col, const std::vector<std::string>& expected, const std::string& detail) {
    std::string msg = "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + detail;
    if (!expected.empty()) {
      msg += " (expected ";
      if (expected.size() > 1) msg += "one of ";
      for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : "") + expected[i];
      msg += ")";
    }
    return msg;
  }

  int line_;
  int col_;
  std::vector<std::string> expected_;
};

// ---------------------------------------------------------------------------
// Predicates

enum class ArgKind { Router, Hops };

struct PredicateSignature {
  std::string name;
  std::vector<ArgKind> args;
};

inline const std::map<std::string, PredicateSignature>& predicates() {
  static const std::map<std::string, PredicateSignature> table = {
      {"Reach", {"Reach", {ArgKind::Router, ArgKind::Router}}},
      {"ExistPath", {"ExistPath", {ArgKind::Hops}}},
      {"AllPath", {"AllPath", {ArgKind::Router, ArgKind::Router}}},
      {"TraceRoute", {"TraceRoute", {ArgKind::Router, ArgKind::Router}}},
      {"ShortestOSPFPath", {"ShortestOSPFPath", {ArgKind::Router, ArgKind::Router}}},
      {"OSPFWeight", {"OSPFWeight", {ArgKind::Hops}}},
      {"EqualBestPaths", {"EqualBestPaths", {ArgKind::Router, ArgKind::Router}}},
  };
  return table;
}

// ---------------------------------------------------------------------------
// AST. Positions are kept for diagnostics but ignored by equality.

struct Expr {
  enum class Kind { Int, Str, Bool, None, List, Var, Compare, And, Or, Not, Index, Len, Call };

  Kind kind = Kind::None;
  long long integer = 0;
  bool flag = false;  // Bool value; for Call: written inside `query { }`
  std::string text;   // Str value, Var name, Compare operator, Call predicate
  std::vector<Expr> args;
  int line = 0;
  int col = 0;

  friend bool operator==(const Expr& a, const Expr& b) {
    return a.kind == b.kind && a.integer == b.integer && a.flag == b.flag && a.text == b.text && a.args == b.args;
  }
};

struct Stmt {
  enum class Kind { Assign, If, For, Return, ExprStmt };

  Kind kind = Kind::ExprStmt;
  std::string name;                      // Assign target, For variable
  std::vector<Expr> exprs;               // value / conditions / iterable
  std::vector<std::vector<Stmt>> bodies;  // If: one per condition, plus else
  bool has_else = false;
  int line = 0;

  friend bool operator==(const Stmt& a, const Stmt& b) {
    return a.kind == b.kind && a.name == b.name && a.exprs == b.exprs && a.bodies == b.bodies &&
           a.has_else == b.has_else;
  }
};

struct Program {
  std::vector<Stmt> body;

  friend bool operator==(const Program&, const Program&) = default;
};

template <class F>
void walk_exprs(const Expr& e, F&& f) {
  f(e);
  for (const auto& a : e.args) walk_exprs(a, f);
}

template <class F>
void walk_stmts(const std::vector<Stmt>& body, F&& f) {
  for (const auto& s : body) {
    f(s);
    for (const auto& b : s.bodies) walk_stmts(b, f);
  }
}

/// Predicate calls in source order (not execution order).
inline std::vector<const Expr*> predicate_calls(const Program& p) {
  std::vector<const Expr*> out;
  walk_stmts(p.body, [&](const Stmt& s) {
    for (const auto& e : s.exprs)
      walk_exprs(e, [&](const Expr& x) {
        if (x.kind == Expr::Kind::Call) out.push_back(&x);
      });
  });
  return out;
}

// ---------------------------------------------------------------------------
// Lexer

struct Token {
  enum class Kind { Name, Int, Str, Op, Newline, Indent, Dedent, End };

  Kind kind = Kind::End;
  std::string text;
  long long value = 0;
  int line = 0;
  int col = 0;
};

inline std::string describe(const Token& t) {
  switch (t.kind) {
    case Token::Kind::Name: return "'" + t.text + "'";
    case Token::Kind::Int: return "integer " + t.text;
    case Token::Kind::Str: return "string";
    case Token::Kind::Op: return "'" + t.text + "'";
    case Token::Kind::Newline: return "end of line";
    case Token::Kind::Indent: return "indent";
    case Token::Kind::Dedent: return "dedent";
    case Token::Kind::End: return "end of input";
  }
  return "token";
}

inline std::vector<Token> tokenize(std::string_view src) {
  static const std::vector<std::string> ops = {"==", "!=", "<=", ">=", "<", ">", "=", "(", ")", "[", "]",
                                               "{",  "}",  ",",  ":",  "-", "+", "*", "/", "%", ".", ";"};
  std::vector<Token> out;
  std::vector<int> indents{0};
  int depth = 0;
  int line = 1;
  std::size_t i = 0;
  bool at_line_start = true;
  auto push = [&](Token::Kind k, std::string text, int col, long long v = 0) {
    out.push_back(Token{k, std::move(text), v, line, col});
  };
  std::size_t line_begin = 0;

  while (i <= src.size()) {
    if (at_line_start && depth == 0) {
      int width = 0;
      std::size_t j = i;
      while (j < src.size() && (src[j] == ' ' || src[j] == '\t')) {
        width = src[j] == '\t' ? (width / 8 + 1) * 8 : width + 1;
        ++j;
      }
      // blank and comment-only lines carry no indentation
      if (j >= src.size() || src[j] == '\n' || src[j] == '\r' || src[j] == '#') {
        while (j < src.size() && src[j] != '\n') ++j;
        if (j >= src.size()) {
          i = src.size() + 1;
          break;
        }
        i = j + 1;
        ++line;
        line_begin = i;
        continue;
      }
      int col = static_cast<int>(j - line_begin) + 1;
      if (width > indents.back()) {
        indents.push_back(width);
        push(Token::Kind::Indent, "", col);
      } else {
        while (width < indents.back()) {
          indents.pop_back();
          push(Token::Kind::Dedent, "", col);
        }
        if (width != indents.back()) throw ParseError(line, col, {}, "inconsistent dedent");
      }
      i = j;
      at_line_start = false;
    }
    if (i >= src.size()) break;
    char c = src[i];
    int col = static_cast<int>(i - line_begin) + 1;
    if (c == '\n') {
      if (depth == 0) push(Token::Kind::Newline, "", col);
      ++i;
      ++line;
      line_begin = i;
      at_line_start = depth == 0;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '\\' && i + 1 < src.size() && (src[i + 1] == '\n' || src[i + 1] == '\r')) {
      i += src[i + 1] == '\r' ? 2 : 1;
      if (i < src.size() && src[i] == '\n') ++i;
      ++line;
      line_begin = i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      push(Token::Kind::Name, std::string(src.substr(i, j - i)), col);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      std::string digits(src.substr(i, j - i));
      if (digits.size() > 18) throw ParseError(line, col, {}, "integer literal out of range");
      push(Token::Kind::Int, digits, col, std::stoll(digits));
      i = j;
      continue;
    }
    if (c == '\'' || c == '"') {
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < src.size() && src[j] != '\n') {
        char d = src[j];
        if (d == c) {
          closed = true;
          break;
        }
        if (d == '\\' && j + 1 < src.size()) {
          char e = src[j + 1];
          switch (e) {
            case 'n': value += '\n'; break;
            case 't': value += '\t'; break;
            case '\\': value += '\\'; break;
            case '\'': value += '\''; break;
            case '"': value += '"'; break;
            default: value += '\\'; value += e;
          }
          j += 2;
          continue;
        }
        value += d;
        ++j;
      }
      if (!closed) throw ParseError(line, col, {}, "unterminated string literal");
      push(Token::Kind::Str, value, col);
      i = j + 1;
      continue;
    }
    bool matched = false;
    for (const auto& op : ops) {
      if (src.substr(i, op.size()) == op) {
        if (op == "(" || op == "[" || op == "{") ++depth;
        if ((op == ")" || op == "]" || op == "}") && depth > 0) --depth;
        push(Token::Kind::Op, op, col);
        i += op.size();
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(line, col, {}, std::string("unexpected character '") + c + "'");
  }
  if (!out.empty() && out.back().kind != Token::Kind::Newline && out.back().kind != Token::Kind::Dedent)
    push(Token::Kind::Newline, "", 1);
  while (indents.size() > 1) {
    indents.pop_back();
    push(Token::Kind::Dedent, "", 1);
  }
  push(Token::Kind::End, "", 1);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

inline const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {"if",   "elif",   "else",  "for",   "in",    "return", "and",
                                              "or",   "not",    "is",    "None",  "True",  "False",  "query",
                                              "def",  "class",  "import", "from", "while", "lambda", "with",
                                              "try",  "except", "raise", "del",   "global", "yield", "pass",
                                              "break", "continue", "assert", "async", "await", "nonlocal", "finally"};
  return words;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program program() {
    Program p;
    while (!at(Token::Kind::End)) {
      if (at(Token::Kind::Newline)) {
        ++pos_;
        continue;
      }
      p.body.push_back(statement());
    }
    return p;
  }

  Expr lone_expression() {
    while (at(Token::Kind::Newline)) ++pos_;
    Expr e = expression();
    while (at(Token::Kind::Newline)) ++pos_;
    if (!at(Token::Kind::End)) fail({"end of input"});
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool at(Token::Kind k) const { return peek().kind == k; }
  bool at_op(std::string_view op) const { return peek().kind == Token::Kind::Op && peek().text == op; }
  bool at_word(std::string_view w) const { return peek().kind == Token::Kind::Name && peek().text == w; }

  [[noreturn]] void fail(std::vector<std::string> expected, std::string detail = {}) const {
    const Token& t = peek();
    if (detail.empty()) detail = "unexpected " + describe(t);
    throw ParseError(t.line, t.col, std::move(expected), detail);
  }

  void expect_op(std::string_view op) {
    if (!at_op(op)) fail({"'" + std::string(op) + "'"});
    ++pos_;
  }

  void expect_word(std::string_view w) {
    if (!at_word(w)) fail({"'" + std::string(w) + "'"});
    ++pos_;
  }

  std::string identifier() {
    if (!at(Token::Kind::Name) || reserved_words().count(peek().text)) fail({"identifier"});
    return toks_[pos_++].text;
  }

  void end_of_simple() {
    if (at_op(";")) fail({"end of line"}, "multiple statements on one line are not supported");
    if (at(Token::Kind::Newline)) {
      ++pos_;
      return;
    }
    if (at(Token::Kind::End) || at(Token::Kind::Dedent)) return;
    fail({"end of line"});
  }

  std::vector<Stmt> suite() {
    expect_op(":");
    std::vector<Stmt> body;
    if (!at(Token::Kind::Newline)) {
      body.push_back(simple_statement());
      return body;
    }
    ++pos_;
    if (!at(Token::Kind::Indent)) fail({"indented block"});
    ++pos_;
    while (!at(Token::Kind::Dedent) && !at(Token::Kind::End)) {
      if (at(Token::Kind::Newline)) {
        ++pos_;
        continue;
      }
      body.push_back(statement());
    }
    if (at(Token::Kind::Dedent)) ++pos_;
    return body;
  }

  Stmt statement() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Indent) fail({"statement"}, "unexpected indent");
    if (t.kind == Token::Kind::Name) {
      if (t.text == "if") return if_statement();
      if (t.text == "for") return for_statement();
      static const std::set<std::string> unsupported = {"def",   "class", "import", "from",   "while", "lambda",
                                                        "with",  "try",   "raise",  "del",    "global", "yield",
                                                        "async", "await", "assert", "nonlocal", "pass", "break",
                                                        "continue", "elif", "else", "except", "finally"};
      if (unsupported.count(t.text))
        fail({"statement"}, "'" + t.text + "' is not part of the query language");
    }
    return simple_statement();
  }

  Stmt simple_statement() {
    Stmt s;
    s.line = peek().line;
    if (at_word("return")) {
      ++pos_;
      s.kind = Stmt::Kind::Return;
      if (!at(Token::Kind::Newline) && !at(Token::Kind::End) && !at(Token::Kind::Dedent))
        s.exprs.push_back(expression());
      end_of_simple();
      return s;
    }
    if (at(Token::Kind::Name) && !reserved_words().count(peek().text) && peek(1).kind == Token::Kind::Op &&
        peek(1).text == "=") {
      s.kind = Stmt::Kind::Assign;
      s.name = identifier();
      ++pos_;
      s.exprs.push_back(expression());
      end_of_simple();
      return s;
    }
    s.kind = Stmt::Kind::ExprStmt;
    s.exprs.push_back(expression());
    if (at_op("=")) fail({"end of line"}, "only plain names can be assigned");
    end_of_simple();
    return s;
  }

  Stmt if_statement() {
    Stmt s;
    s.kind = Stmt::Kind::If;
    s.line = peek().line;
    expect_word("if");
    s.exprs.push_back(expression());
    s.bodies.push_back(suite());
    while (at_word("elif")) {
      ++pos_;
      s.exprs.push_back(expression());
      s.bodies.push_back(suite());
    }
    if (at_word("else")) {
      ++pos_;
      s.bodies.push_back(suite());
      s.has_else = true;
    }
    return s;
  }

  Stmt for_statement() {
    Stmt s;
    s.kind = Stmt::Kind::For;
    s.line = peek().line;
    expect_word("for");
    s.name = identifier();
    expect_word("in");
    s.exprs.push_back(expression());
    s.bodies.push_back(suite());
    return s;
  }

  Expr node(Expr::Kind k, const Token& at_token) {
    Expr e;
    e.kind = k;
    e.line = at_token.line;
    e.col = at_token.col;
    return e;
  }

  Expr expression() { return or_expr(); }

  Expr or_expr() {
    const Token& start = peek();
    Expr first = and_expr();
    if (!at_word("or")) return first;
    Expr e = node(Expr::Kind::Or, start);
    e.args.push_back(std::move(first));
    while (at_word("or")) {
      ++pos_;
      e.args.push_back(and_expr());
    }
    return e;
  }

  Expr and_expr() {
    const Token& start = peek();
    Expr first = not_expr();
    if (!at_word("and")) return first;
    Expr e = node(Expr::Kind::And, start);
    e.args.push_back(std::move(first));
    while (at_word("and")) {
      ++pos_;
      e.args.push_back(not_expr());
    }
    return e;
  }

  Expr not_expr() {
    if (at_word("not")) {
      Expr e = node(Expr::Kind::Not, peek());
      ++pos_;
      e.args.push_back(not_expr());
      return e;
    }
    return comparison();
  }

  std::optional<std::string> comparison_operator() {
    if (peek().kind == Token::Kind::Op) {
      static const std::set<std::string> ops = {"==", "!=", "<", "<=", ">", ">="};
      if (ops.count(peek().text)) return toks_[pos_++].text;
      return std::nullopt;
    }
    if (at_word("is")) {
      ++pos_;
      if (at_word("not")) {
        ++pos_;
        return "is not";
      }
      return "is";
    }
    if (at_word("in")) {
      ++pos_;
      return "in";
    }
    if (at_word("not") && peek(1).kind == Token::Kind::Name && peek(1).text == "in") {
      pos_ += 2;
      return "not in";
    }
    return std::nullopt;
  }

  Expr comparison() {
    Expr left = postfix();
    const Token& op_token = peek();
    auto op = comparison_operator();
    if (!op) return left;
    Expr e = node(Expr::Kind::Compare, op_token);
    e.text = *op;
    e.args.push_back(std::move(left));
    e.args.push_back(postfix());
    if (comparison_operator()) {
      --pos_;
      fail({}, "chained comparisons are not supported; combine them with 'and'");
    }
    return e;
  }

  Expr postfix() {
    Expr e = primary();
    for (;;) {
      if (at_op("[")) {
        Expr idx = node(Expr::Kind::Index, peek());
        ++pos_;
        if (at_op(":") || at_op("]")) fail({"expression"}, "slices are not supported");
        idx.args.push_back(std::move(e));
        idx.args.push_back(expression());
        if (at_op(":")) fail({"']'"}, "slices are not supported");
        expect_op("]");
        e = std::move(idx);
      } else if (at_op(".")) {
        fail({}, "attribute access is not supported");
      } else if (at_op("(")) {
        fail({}, "only predicates and len() can be called");
      } else {
        return e;
      }
    }
  }

  std::vector<Expr> call_arguments() {
    expect_op("(");
    std::vector<Expr> args;
    if (at_op(")")) {
      ++pos_;
      return args;
    }
    for (;;) {
      args.push_back(expression());
      if (at_op(",")) {
        ++pos_;
        if (at_op(")")) break;
        continue;
      }
      if (at_op(")")) break;
      fail({"','", "')'"});
    }
    ++pos_;
    return args;
  }

  Expr call(const Token& name_token, bool wrapped) {
    Expr e = node(Expr::Kind::Call, name_token);
    e.text = name_token.text;
    e.flag = wrapped;
    auto it = predicates().find(e.text);
    if (it == predicates().end())
      throw Error(ErrorCode::UnknownPredicate, "line " + std::to_string(name_token.line) + ": '" + e.text +
                                                   "' is not a registered predicate");
    e.args = call_arguments();
    if (e.args.size() != it->second.args.size())
      throw Error(ErrorCode::ArityMismatch, "line " + std::to_string(name_token.line) + ": " + e.text + " takes " +
                                                std::to_string(it->second.args.size()) + " argument(s), got " +
                                                std::to_string(e.args.size()));
    return e;
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Int: {
        Expr e = node(Expr::Kind::Int, t);
        e.integer = t.value;
        ++pos_;
        return e;
      }
      case Token::Kind::Str: {
        Expr e = node(Expr::Kind::Str, t);
        e.text = t.text;
        ++pos_;
        return e;
      }
      case Token::Kind::Op: {
        if (t.text == "-" && peek(1).kind == Token::Kind::Int) {
          Expr e = node(Expr::Kind::Int, t);
          e.integer = -peek(1).value;
          pos_ += 2;
          return e;
        }
        if (t.text == "(") {
          ++pos_;
          Expr e = expression();
          if (at_op(",")) fail({"')'"}, "tuples are not supported");
          expect_op(")");
          return e;
        }
        if (t.text == "[") {
          Expr e = node(Expr::Kind::List, t);
          ++pos_;
          while (!at_op("]")) {
            e.args.push_back(expression());
            if (at_op(",")) {
              ++pos_;
              continue;
            }
            if (!at_op("]")) {
              if (at_word("for")) fail({"','", "']'"}, "comprehensions are not supported");
              fail({"','", "']'"});
            }
          }
          ++pos_;
          return e;
        }
        if (t.text == "+" || t.text == "-" || t.text == "*" || t.text == "/" || t.text == "%")
          fail({"expression"}, "arithmetic is not supported");
        fail({"expression"});
      }
      case Token::Kind::Name: {
        if (t.text == "True" || t.text == "False") {
          Expr e = node(Expr::Kind::Bool, t);
          e.flag = t.text == "True";
          ++pos_;
          return e;
        }
        if (t.text == "None") {
          ++pos_;
          return node(Expr::Kind::None, t);
        }
        if (t.text == "query") {
          ++pos_;
          expect_op("{");
          if (!at(Token::Kind::Name)) fail({"predicate"});
          const Token& name_token = toks_[pos_++];
          Expr e = call(name_token, true);
          expect_op("}");
          return e;
        }
        if (t.text == "lambda") fail({"expression"}, "'lambda' is not part of the query language");
        if (reserved_words().count(t.text)) fail({"expression"});
        ++pos_;
        if (at_op("(")) {
          if (t.text == "len") {
            Expr e = node(Expr::Kind::Len, t);
            e.args = call_arguments();
            if (e.args.size() != 1)
              throw Error(ErrorCode::ArityMismatch,
                          "line " + std::to_string(t.line) + ": len takes 1 argument, got " +
                              std::to_string(e.args.size()));
            return e;
          }
          return call(t, false);
        }
        Expr e = node(Expr::Kind::Var, t);
        e.text = t.text;
        return e;
      }
      default: fail({"expression"});
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline Program parse_program(std::string_view src) { return Parser(tokenize(src)).program(); }

inline Expr parse_expression(std::string_view src) { return Parser(tokenize(src)).lone_expression(); }

// ---------------------------------------------------------------------------
// Printer

inline std::string quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "'";
}

inline int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Or: return 1;
    case Expr::Kind::And: return 2;
    case Expr::Kind::Not: return 3;
    case Expr::Kind::Compare: return 4;
    default: return 5;
  }
}

inline std::string print_expr(const Expr& e);

inline std::string print_operand(const Expr& e, int min_prec) {
  std::string s = print_expr(e);
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

inline std::string print_args(const std::vector<Expr>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + print_expr(args[i]);
  return out;
}

inline std::string print_expr(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Int: return std::to_string(e.integer);
    case K::Str: return quote(e.text);
    case K::Bool: return e.flag ? "True" : "False";
    case K::None: return "None";
    case K::List: return "[" + print_args(e.args) + "]";
    case K::Var: return e.text;
    case K::Compare: return print_operand(e.args[0], 5) + " " + e.text + " " + print_operand(e.args[1], 5);
    case K::And:
    case K::Or: {
      std::string out;
      int min = precedence(e) + 1;
      for (std::size_t i = 0; i < e.args.size(); ++i)
        out += (i ? (e.kind == K::And ? " and " : " or ") : "") + print_operand(e.args[i], min);
      return out;
    }
    case K::Not: return "not " + print_operand(e.args[0], 3);
    case K::Index: return print_operand(e.args[0], 5) + "[" + print_expr(e.args[1]) + "]";
    case K::Len: return "len(" + print_expr(e.args[0]) + ")";
    case K::Call: {
      std::string call = e.text + "(" + print_args(e.args) + ")";
      return e.flag ? "query { " + call + " }" : call;
    }
  }
  return "";
}

inline void print_block(const std::vector<Stmt>& body, int depth, std::string& out) {
  std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
  for (const auto& s : body) {
    switch (s.kind) {
      case Stmt::Kind::Assign: out += pad + s.name + " = " + print_expr(s.exprs[0]) + "\n"; break;
      case Stmt::Kind::ExprStmt: out += pad + print_expr(s.exprs[0]) + "\n"; break;
      case Stmt::Kind::Return:
        out += pad + (s.exprs.empty() ? "return" : "return " + print_expr(s.exprs[0])) + "\n";
        break;
      case Stmt::Kind::For:
        out += pad + "for " + s.name + " in " + print_expr(s.exprs[0]) + ":\n";
        print_block(s.bodies[0], depth + 1, out);
        break;
      case Stmt::Kind::If:
        for (std::size_t i = 0; i < s.exprs.size(); ++i) {
          out += pad + (i ? "elif " : "if ") + print_expr(s.exprs[i]) + ":\n";
          print_block(s.bodies[i], depth + 1, out);
        }
        if (s.has_else) {
          out += pad + "else:\n";
          print_block(s.bodies.back(), depth + 1, out);
        }
        break;
    }
  }
}

inline std::string print_program(const Program& p) {
  std::string out;
  print_block(p.body, 0, out);
  return out;
}

}  // namespace netquery::ql
