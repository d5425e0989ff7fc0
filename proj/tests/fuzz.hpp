#pragma once
// Random grammar-valid query programs, built as ASTs so the printer and the
// parser can be checked against each other.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "netquery/querylang/syntax.hpp"

namespace fuzz {

using netquery::ql::Expr;
using netquery::ql::Program;
using netquery::ql::Stmt;

class ProgramFuzzer {
 public:
  explicit ProgramFuzzer(std::uint64_t seed) : rng_(seed) {}

  Program program() {
    Program p;
    int n = between(1, 6);
    for (int i = 0; i < n; ++i) p.body.push_back(statement(0));
    return p;
  }

 private:
  int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(int percent = 50) { return between(1, 100) <= percent; }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(between(0, static_cast<int>(v.size()) - 1))];
  }

  std::string name() {
    static const std::vector<std::string> names = {"answer", "p1", "p2", "res", "hops", "x", "ok", "cost", "_tmp", "path_3"};
    return pick(names);
  }

  std::string router() {
    static const std::vector<std::string> rs = {"R1", "R2", "R3", "R4", "core-1", "edge_a"};
    return pick(rs);
  }

  std::string string_literal() {
    static const std::string alphabet = "abcXYZ019 _-'\\\n\t.,:#[]()";
    std::string s;
    int n = between(0, 8);
    for (int i = 0; i < n; ++i) s += alphabet[static_cast<std::size_t>(between(0, static_cast<int>(alphabet.size()) - 1))];
    return s;
  }

  Expr leaf() {
    Expr e;
    switch (between(0, 5)) {
      case 0:
        e.kind = Expr::Kind::Int;
        e.integer = between(-1000, 1000);
        break;
      case 1:
        e.kind = Expr::Kind::Str;
        e.text = coin() ? router() : string_literal();
        break;
      case 2:
        e.kind = Expr::Kind::Bool;
        e.flag = coin();
        break;
      case 3: e.kind = Expr::Kind::None; break;
      default:
        e.kind = Expr::Kind::Var;
        e.text = name();
    }
    return e;
  }

  Expr path_literal() {
    Expr e;
    e.kind = Expr::Kind::List;
    int n = between(0, 4);
    for (int i = 0; i < n; ++i) {
      Expr r;
      r.kind = Expr::Kind::Str;
      r.text = router();
      e.args.push_back(r);
    }
    return e;
  }

  Expr call(int depth) {
    static const std::vector<std::pair<std::string, int>> preds = {
        {"Reach", 2},      {"AllPath", 2},    {"TraceRoute", 2}, {"ShortestOSPFPath", 2},
        {"EqualBestPaths", 2}, {"ExistPath", 1}, {"OSPFWeight", 1}};
    const auto& [pred, arity] = pick(preds);
    Expr e;
    e.kind = Expr::Kind::Call;
    e.text = pred;
    e.flag = coin(20);
    for (int i = 0; i < arity; ++i) {
      if (arity == 1) e.args.push_back(coin(70) ? path_literal() : expr(depth + 1));
      else if (coin(70)) {
        Expr r;
        r.kind = coin() ? Expr::Kind::Str : Expr::Kind::Var;
        r.text = router();
        if (r.kind == Expr::Kind::Var) std::replace(r.text.begin(), r.text.end(), '-', '_');
        e.args.push_back(r);
      } else {
        e.args.push_back(expr(depth + 1));
      }
    }
    return e;
  }

  Expr expr(int depth) {
    if (depth >= 4) return leaf();
    Expr e;
    switch (between(0, 10)) {
      case 0: return leaf();
      case 1: return call(depth);
      case 2: {
        e.kind = Expr::Kind::List;
        int n = between(0, 3);
        for (int i = 0; i < n; ++i) e.args.push_back(expr(depth + 1));
        return e;
      }
      case 3: {
        static const std::vector<std::string> ops = {"==", "!=", "<", "<=", ">", ">=", "is", "is not", "in", "not in"};
        e.kind = Expr::Kind::Compare;
        e.text = pick(ops);
        e.args = {expr(depth + 1), expr(depth + 1)};
        return e;
      }
      case 4:
      case 5: {
        e.kind = coin() ? Expr::Kind::And : Expr::Kind::Or;
        int n = between(2, 3);
        for (int i = 0; i < n; ++i) {
          Expr child = expr(depth + 1);
          // a same-kind child would print flat and reparse as one node
          if (child.kind == e.kind) {
            Expr wrap;
            wrap.kind = Expr::Kind::Not;
            wrap.args.push_back(std::move(child));
            child = std::move(wrap);
          }
          e.args.push_back(std::move(child));
        }
        return e;
      }
      case 6:
        e.kind = Expr::Kind::Not;
        e.args.push_back(expr(depth + 1));
        return e;
      case 7:
        e.kind = Expr::Kind::Index;
        e.args = {expr(depth + 1), expr(depth + 1)};
        return e;
      case 8:
        e.kind = Expr::Kind::Len;
        e.args.push_back(expr(depth + 1));
        return e;
      default: return leaf();
    }
  }

  std::vector<Stmt> block(int depth) {
    std::vector<Stmt> body;
    int n = between(1, 3);
    for (int i = 0; i < n; ++i) body.push_back(statement(depth + 1));
    return body;
  }

  Stmt statement(int depth) {
    Stmt s;
    int roll = between(0, depth >= 3 ? 5 : 8);
    if (roll <= 2) {
      s.kind = Stmt::Kind::Assign;
      s.name = name();
      s.exprs.push_back(expr(0));
    } else if (roll == 3) {
      s.kind = Stmt::Kind::ExprStmt;
      s.exprs.push_back(expr(0));
    } else if (roll <= 5) {
      s.kind = Stmt::Kind::Return;
      if (coin(85)) s.exprs.push_back(expr(0));
    } else if (roll <= 7) {
      s.kind = Stmt::Kind::If;
      int branches = between(1, 3);
      for (int i = 0; i < branches; ++i) {
        s.exprs.push_back(expr(0));
        s.bodies.push_back(block(depth));
      }
      if (coin()) {
        s.has_else = true;
        s.bodies.push_back(block(depth));
      }
    } else {
      s.kind = Stmt::Kind::For;
      s.name = name();
      s.exprs.push_back(expr(0));
      s.bodies.push_back(block(depth));
    }
    return s;
  }

  std::mt19937_64 rng_;
};

}  // namespace fuzz
