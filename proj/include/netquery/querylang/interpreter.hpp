#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "netquery/querylang/syntax.hpp"
#include "netquery/routing.hpp"

namespace netquery::ql {

/// Runtime value. Paths and router lists are lists of router-name strings;
/// path lists are lists of those.
struct Value {
  enum class Kind { Null, Bool, Int, String, List };

  Kind kind = Kind::Null;
  bool boolean = false;
  long long integer = 0;
  std::string text;
  std::vector<Value> items;

  static Value null() { return {}; }
  static Value of(bool b) {
    Value v;
    v.kind = Kind::Bool;
    v.boolean = b;
    return v;
  }
  static Value of(long long i) {
    Value v;
    v.kind = Kind::Int;
    v.integer = i;
    return v;
  }
  static Value of(std::string s) {
    Value v;
    v.kind = Kind::String;
    v.text = std::move(s);
    return v;
  }
  static Value list(std::vector<Value> items) {
    Value v;
    v.kind = Kind::List;
    v.items = std::move(items);
    return v;
  }
  static Value path(const std::vector<std::string>& hops) {
    std::vector<Value> items;
    for (const auto& h : hops) items.push_back(of(h));
    return list(std::move(items));
  }
  static Value paths(const std::vector<RoutePath>& ps) {
    std::vector<Value> items;
    for (const auto& p : ps) items.push_back(path(p.hops));
    return list(std::move(items));
  }

  bool is_null() const { return kind == Kind::Null; }

  bool truthy() const {
    switch (kind) {
      case Kind::Null: return false;
      case Kind::Bool: return boolean;
      case Kind::Int: return integer != 0;
      case Kind::String: return !text.empty();
      case Kind::List: return !items.empty();
    }
    return false;
  }

  std::string type_name() const {
    switch (kind) {
      case Kind::Null: return "Null";
      case Kind::Bool: return "Bool";
      case Kind::Int: return "Int";
      case Kind::String: return "String";
      case Kind::List: {
        bool strings = true, lists = !items.empty();
        for (const auto& i : items) {
          strings = strings && i.kind == Kind::String;
          lists = lists && i.kind == Kind::List;
        }
        if (items.empty() || strings) return "Path";
        if (lists) return "PathList";
        return "List";
      }
    }
    return "?";
  }

  friend bool operator==(const Value& a, const Value& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Kind::Null: return true;
      case Kind::Bool: return a.boolean == b.boolean;
      case Kind::Int: return a.integer == b.integer;
      case Kind::String: return a.text == b.text;
      case Kind::List: return a.items == b.items;
    }
    return false;
  }

  /// Python-style rendering.
  std::string repr() const {
    switch (kind) {
      case Kind::Null: return "None";
      case Kind::Bool: return boolean ? "True" : "False";
      case Kind::Int: return std::to_string(integer);
      case Kind::String: return quote(text);
      case Kind::List: {
        std::string out = "[";
        for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i].repr();
        return out + "]";
      }
    }
    return "";
  }

  nlohmann::json to_json() const {
    switch (kind) {
      case Kind::Null: return nullptr;
      case Kind::Bool: return boolean;
      case Kind::Int: return integer;
      case Kind::String: return text;
      case Kind::List: {
        auto arr = nlohmann::json::array();
        for (const auto& i : items) arr.push_back(i.to_json());
        return arr;
      }
    }
    return nullptr;
  }
};

struct TraceEntry {
  std::string call;
  nlohmann::json args;
  nlohmann::json result;
  long long micros = 0;

  nlohmann::json to_json() const { return {{"call", call}, {"args", args}, {"result", result}, {"micros", micros}}; }
};

struct Answer {
  Value value;
  std::vector<TraceEntry> trace;
  std::chrono::microseconds elapsed{0};
  long long statements = 0;
  std::vector<std::string> lints;
};

struct Budget {
  long long statements = 100000;
  std::chrono::milliseconds wall_clock{10000};
};

inline std::string trace_jsonl(const std::vector<TraceEntry>& trace) {
  std::string out;
  for (const auto& t : trace) out += t.to_json().dump() + "\n";
  return out;
}

inline bool assigns(const std::vector<Stmt>& body, const std::string& name) {
  bool found = false;
  walk_stmts(body, [&](const Stmt& s) {
    if ((s.kind == Stmt::Kind::Assign || s.kind == Stmt::Kind::For) && s.name == name) found = true;
  });
  return found;
}

/// Static warnings: dead `answer` assignments and unreachable statements.
inline std::vector<std::string> lint(const Program& p) {
  std::vector<std::string> out;
  bool answer_assigned = assigns(p.body, "answer");
  walk_stmts(p.body, [&](const Stmt& s) {
    if (s.kind != Stmt::Kind::Return || !answer_assigned) return;
    bool returns_answer = !s.exprs.empty() && s.exprs[0].kind == Expr::Kind::Var && s.exprs[0].text == "answer";
    if (!returns_answer)
      out.push_back("line " + std::to_string(s.line) +
                    ": return takes precedence; assignments to 'answer' do not reach the result");
  });
  std::function<void(const std::vector<Stmt>&)> unreachable = [&](const std::vector<Stmt>& body) {
    for (std::size_t i = 0; i < body.size(); ++i) {
      for (const auto& b : body[i].bodies) unreachable(b);
      if (body[i].kind == Stmt::Kind::Return && i + 1 < body.size()) {
        out.push_back("line " + std::to_string(body[i + 1].line) + ": unreachable statement after return");
        break;
      }
    }
  };
  unreachable(p.body);
  return out;
}

class Interpreter {
 public:
  Interpreter(const Network& net, Budget budget) : net_(net), budget_(budget) {}

  Answer run(const Program& p) {
    start_ = std::chrono::steady_clock::now();
    Answer ans;
    ans.lints = lint(p);
    // Programs that set `answer` start from True, so they only need to record
    // failures (the pattern generated code uses).
    if (assigns(p.body, "answer")) env_["answer"] = Value::of(true);
    bool returned = exec_block(p.body);
    ans.trace = std::move(trace_);
    ans.statements = executed_;
    ans.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start_);
    if (returned) {
      ans.value = returned_;
    } else if (auto it = env_.find("answer"); it != env_.end()) {
      ans.value = it->second;
    } else {
      throw Error(ErrorCode::NoResult, "program ended without return and without assigning 'answer'");
    }
    return ans;
  }

 private:
  [[noreturn]] static void type_error(int line, const std::string& msg) {
    throw Error(ErrorCode::TypeError, "line " + std::to_string(line) + ": " + msg);
  }

  void tick(int line) {
    if (++executed_ > budget_.statements)
      throw Error(ErrorCode::BudgetExceeded, "statement cap of " + std::to_string(budget_.statements) +
                                                 " exceeded at line " + std::to_string(line));
    if (std::chrono::steady_clock::now() - start_ > budget_.wall_clock)
      throw Error(ErrorCode::BudgetExceeded, "wall-clock cap of " + std::to_string(budget_.wall_clock.count()) +
                                                 " ms exceeded at line " + std::to_string(line));
  }

  // true when a return statement ran
  bool exec_block(const std::vector<Stmt>& body) {
    for (const auto& s : body)
      if (exec(s)) return true;
    return false;
  }

  bool exec(const Stmt& s) {
    tick(s.line);
    switch (s.kind) {
      case Stmt::Kind::Assign: env_[s.name] = eval(s.exprs[0]); return false;
      case Stmt::Kind::ExprStmt: eval(s.exprs[0]); return false;
      case Stmt::Kind::Return:
        returned_ = s.exprs.empty() ? Value::null() : eval(s.exprs[0]);
        return true;
      case Stmt::Kind::If:
        for (std::size_t i = 0; i < s.exprs.size(); ++i)
          if (eval(s.exprs[i]).truthy()) return exec_block(s.bodies[i]);
        if (s.has_else) return exec_block(s.bodies.back());
        return false;
      case Stmt::Kind::For: {
        Value seq = eval(s.exprs[0]);
        if (seq.kind != Value::Kind::List) type_error(s.line, "cannot iterate over " + seq.type_name());
        for (const auto& item : seq.items) {
          tick(s.line);
          env_[s.name] = item;
          if (exec_block(s.bodies[0])) return true;
        }
        return false;
      }
    }
    return false;
  }

  Value eval(const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind) {
      case K::Int: return Value::of(e.integer);
      case K::Str: return Value::of(e.text);
      case K::Bool: return Value::of(e.flag);
      case K::None: return Value::null();
      case K::List: {
        std::vector<Value> items;
        for (const auto& a : e.args) items.push_back(eval(a));
        return Value::list(std::move(items));
      }
      case K::Var: {
        auto it = env_.find(e.text);
        if (it == env_.end())
          throw Error(ErrorCode::NameError, "line " + std::to_string(e.line) + ": name '" + e.text + "' is not defined");
        return it->second;
      }
      case K::Not: return Value::of(!eval(e.args[0]).truthy());
      case K::And: {
        Value v;
        for (const auto& a : e.args) {
          v = eval(a);
          if (!v.truthy()) return v;
        }
        return v;
      }
      case K::Or: {
        Value v;
        for (const auto& a : e.args) {
          v = eval(a);
          if (v.truthy()) return v;
        }
        return v;
      }
      case K::Compare: return Value::of(compare(e.text, eval(e.args[0]), eval(e.args[1]), e.line));
      case K::Index: {
        Value seq = eval(e.args[0]);
        Value idx = eval(e.args[1]);
        if (idx.kind != Value::Kind::Int) type_error(e.line, "index must be Int, not " + idx.type_name());
        long long n;
        if (seq.kind == Value::Kind::List) n = static_cast<long long>(seq.items.size());
        else if (seq.kind == Value::Kind::String) n = static_cast<long long>(seq.text.size());
        else type_error(e.line, seq.type_name() + " is not indexable");
        long long i = idx.integer < 0 ? idx.integer + n : idx.integer;
        if (i < 0 || i >= n)
          throw Error(ErrorCode::IndexError, "line " + std::to_string(e.line) + ": index " +
                                                 std::to_string(idx.integer) + " out of range");
        if (seq.kind == Value::Kind::List) return seq.items[static_cast<std::size_t>(i)];
        return Value::of(std::string(1, seq.text[static_cast<std::size_t>(i)]));
      }
      case K::Len: {
        Value v = eval(e.args[0]);
        if (v.kind == Value::Kind::List) return Value::of(static_cast<long long>(v.items.size()));
        if (v.kind == Value::Kind::String) return Value::of(static_cast<long long>(v.text.size()));
        type_error(e.line, v.type_name() + " has no len()");
      }
      case K::Call: return call(e);
    }
    return Value::null();
  }

  static bool comparable_eq(const Value& a, const Value& b) {
    return a.is_null() || b.is_null() || a.kind == b.kind;
  }

  bool compare(const std::string& op, const Value& a, const Value& b, int line) {
    if (op == "==" || op == "!=") {
      if (!comparable_eq(a, b)) type_error(line, "cannot compare " + a.type_name() + " with " + b.type_name());
      return (a == b) == (op == "==");
    }
    if (op == "is") return a == b;
    if (op == "is not") return !(a == b);
    if (op == "in" || op == "not in") {
      bool found = false;
      if (b.kind == Value::Kind::List) {
        for (const auto& item : b.items) found = found || item == a;
      } else if (b.kind == Value::Kind::String && a.kind == Value::Kind::String) {
        found = b.text.find(a.text) != std::string::npos;
      } else {
        type_error(line, "'in' needs a List or String on the right, not " + b.type_name());
      }
      return found == (op == "in");
    }
    int c;
    if (a.kind == Value::Kind::Int && b.kind == Value::Kind::Int) c = a.integer < b.integer ? -1 : a.integer > b.integer;
    else if (a.kind == Value::Kind::String && b.kind == Value::Kind::String) c = a.text.compare(b.text);
    else type_error(line, "cannot order " + a.type_name() + " and " + b.type_name());
    if (op == "<") return c < 0;
    if (op == "<=") return c <= 0;
    if (op == ">") return c > 0;
    return c >= 0;
  }

  std::string router_arg(const Expr& arg) {
    // Bare identifiers that are not variables name routers directly.
    if (arg.kind == Expr::Kind::Var && !env_.count(arg.text)) return arg.text;
    Value v = eval(arg);
    if (v.kind != Value::Kind::String)
      type_error(arg.line, "router argument must be a String, not " + v.type_name());
    return v.text;
  }

  std::vector<std::string> hops_arg(const Expr& arg) {
    Value v = eval(arg);
    if (v.kind != Value::Kind::List) type_error(arg.line, "path argument must be a list, not " + v.type_name());
    std::vector<std::string> hops;
    for (const auto& item : v.items) {
      if (item.kind != Value::Kind::String)
        type_error(arg.line, "path elements must be router names, not " + item.type_name());
      hops.push_back(item.text);
    }
    return hops;
  }

  Value call(const Expr& e) {
    const auto& sig = predicates().at(e.text);
    std::vector<std::string> routers;
    std::vector<std::string> hops;
    nlohmann::json args = nlohmann::json::array();
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      if (sig.args[i] == ArgKind::Router) {
        routers.push_back(router_arg(e.args[i]));
        args.push_back(routers.back());
      } else {
        hops = hops_arg(e.args[i]);
        args.push_back(hops);
      }
    }
    auto t0 = std::chrono::steady_clock::now();
    Value result;
    try {
      result = dispatch(e.text, routers, hops);
    } catch (const Error& err) {
      auto c = err.code();
      if (c != ErrorCode::UnknownRouter && c != ErrorCode::NoPath && c != ErrorCode::NotAdjacent) throw;
      result = Value::null();
    }
    auto micros = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0);
    trace_.push_back({e.text, args, result.to_json(), micros.count()});
    return result;
  }

  Value dispatch(const std::string& name, const std::vector<std::string>& r, const std::vector<std::string>& hops) {
    if (name == "Reach") return Value::of(reach(net_, r[0], r[1]));
    if (name == "ExistPath") return exist_path(net_, hops) ? Value::path(hops) : Value::null();
    if (name == "AllPath") return Value::paths(all_paths(net_, r[0], r[1]));
    if (name == "TraceRoute") return Value::path(trace_route(net_, r[0], r[1]).hops);
    if (name == "ShortestOSPFPath") return Value::path(shortest_ospf_path(net_, r[0], r[1]).hops);
    if (name == "OSPFWeight") return Value::of(ospf_weight(net_, hops));
    if (name == "EqualBestPaths") return Value::paths(equal_best_paths(net_, r[0], r[1]));
    throw Error(ErrorCode::UnknownPredicate, name);
  }

  const Network& net_;
  Budget budget_;
  std::map<std::string, Value> env_;
  std::vector<TraceEntry> trace_;
  Value returned_;
  long long executed_ = 0;
  std::chrono::steady_clock::time_point start_;
};

inline Answer interpret(const Program& p, const Network& net, Budget budget = {}) {
  return Interpreter(net, budget).run(p);
}

inline Answer interpret(const Program& p, const FactGraph& g, Budget budget = {}) {
  Network net(g);
  return Interpreter(net, budget).run(p);
}

}  // namespace netquery::ql
