#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "netquery/config.hpp"
#include "netquery/fact.hpp"
#include "netquery/factbase.hpp"

namespace netquery {

/// Value expression in a rule comparison: a term or a builtin call.
struct RuleExpr {
  Term value;
  std::string fn;  // empty for plain values
  std::vector<RuleExpr> args;
};

struct RuleLiteral {
  enum class Kind { Atom, Equal, NotEqual } kind = Kind::Atom;
  Fact atom;  // pattern (Var terms allowed) for Atom
  RuleExpr lhs, rhs;
};

/// One conjunctive rule. Source disjunctions are expanded into several Rules
/// sharing `line`.
struct Rule {
  Fact head;
  std::vector<RuleLiteral> body;
  std::size_t line = 0;
};

struct DeducedBase {
  FactBase all;
  std::map<Fact, std::vector<Fact>> derivation;  // implicit fact -> supporting facts

  bool is_implicit(const Fact& f) const { return derivation.count(f) > 0; }

  std::vector<Fact> implicit_facts() const {
    std::vector<Fact> out;
    for (const auto& [f, _] : derivation) out.push_back(f);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Builtins

/// Network address of a prefix under its own mask.
inline Ipv4Prefix builtin_subnet(const Ipv4Prefix& p) { return p.network(); }

inline Ipv4Prefix builtin_subnet(std::string_view text) {
  if (text.find(':') != std::string_view::npos)
    throw Error(ErrorCode::InvalidPrefix, "IPv6 is not supported: '" + std::string(text) + "'");
  return Ipv4Prefix::parse(text).network();
}

namespace rules {

inline void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Var && t.text != "_") out.insert(t.text);
  for (const auto& i : t.items) collect_vars(i, out);
}

inline void collect_vars(const RuleExpr& e, std::set<std::string>& out) {
  if (e.fn.empty()) collect_vars(e.value, out);
  for (const auto& a : e.args) collect_vars(a, out);
}

inline std::set<std::string> vars_of(const RuleLiteral& l) {
  std::set<std::string> out;
  if (l.kind == RuleLiteral::Kind::Atom) {
    for (const auto& a : l.atom.args) collect_vars(a, out);
  } else {
    collect_vars(l.lhs, out);
    collect_vars(l.rhs, out);
  }
  return out;
}

using Alternatives = std::vector<std::vector<RuleLiteral>>;

inline Alternatives product(const Alternatives& a, const Alternatives& b) {
  Alternatives out;
  for (const auto& x : a)
    for (const auto& y : b) {
      auto z = x;
      z.insert(z.end(), y.begin(), y.end());
      out.push_back(std::move(z));
    }
  return out;
}

class RuleParser {
 public:
  explicit RuleParser(std::string_view src) : r_(src, true) {}

  std::pair<Fact, Alternatives> statement() {
    Fact head = literal::parse_fact(r_);
    if (!r_.consume(":-")) r_.fail("expected ':-'");
    Alternatives body = conjunction();
    if (!r_.at_end()) r_.fail("unexpected input after rule body");
    return {std::move(head), std::move(body)};
  }

 private:
  Alternatives conjunction() {
    Alternatives acc{{}};
    do {
      acc = product(acc, item());
    } while (r_.consume(','));
    return acc;
  }

  Alternatives item() {
    if (r_.peek() == '(') {
      r_.expect('(');
      Alternatives alts = conjunction();
      while (r_.consume(';')) {
        auto more = conjunction();
        alts.insert(alts.end(), more.begin(), more.end());
      }
      r_.expect(')');
      return alts;
    }
    // Atom "Pred(args)" unless a comparison operator follows.
    std::size_t start = r_.position();
    char c = r_.peek();
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::string id = r_.identifier();
      if (r_.peek() == '(') {
        r_.seek(start);
        Fact atom = literal::parse_fact(r_);
        RuleLiteral lit;
        lit.atom = std::move(atom);
        return {{lit}};
      }
      r_.seek(start);
    }
    RuleLiteral lit;
    lit.lhs = expr();
    if (r_.consume("==")) lit.kind = RuleLiteral::Kind::Equal;
    else if (r_.consume("!=")) lit.kind = RuleLiteral::Kind::NotEqual;
    else r_.fail("expected '==' or '!='");
    lit.rhs = expr();
    return {{lit}};
  }

  RuleExpr expr() {
    std::size_t start = r_.position();
    char c = r_.peek();
    if (std::islower(static_cast<unsigned char>(c))) {
      std::string id = r_.identifier();
      if (r_.consume('(')) {
        RuleExpr e;
        e.fn = id;
        if (!r_.consume(')')) {
          do {
            e.args.push_back(expr());
          } while (r_.consume(','));
          r_.expect(')');
        }
        return e;
      }
      r_.seek(start);
    }
    return RuleExpr{r_.term(), {}, {}};
  }

  literal::Reader r_;
};

/// Splits rule text into statements at '.' terminators outside brackets.
inline std::vector<std::pair<std::size_t, std::string>> statements(std::string_view src) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string cur;
  std::size_t line = 1, start_line = 0;
  int depth = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < src.size(); ++i) {
    char c = src[i];
    if (!quoted && c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      if (i < src.size()) {
        ++line;
        cur += '\n';
      }
      continue;
    }
    if (c == '\n') ++line;
    if (c == '"') quoted = !quoted;
    if (!quoted && (c == '(' || c == '[')) ++depth;
    if (!quoted && (c == ')' || c == ']')) --depth;
    bool terminator = !quoted && depth == 0 && c == '.' &&
                      (i + 1 >= src.size() || std::isspace(static_cast<unsigned char>(src[i + 1])));
    if (terminator) {
      out.emplace_back(start_line, cur);
      cur.clear();
      start_line = 0;
      continue;
    }
    if (!start_line && !std::isspace(static_cast<unsigned char>(c))) start_line = line;
    cur += c;
  }
  if (!text::trim(cur).empty()) throw Error(ErrorCode::RuleSyntax, "line " + std::to_string(start_line) + ": missing '.'");
  return out;
}

inline void check_safety(const Rule& rule) {
  std::set<std::string> bound;
  for (const auto& l : rule.body)
    if (l.kind == RuleLiteral::Kind::Atom) {
      auto v = vars_of(l);
      bound.insert(v.begin(), v.end());
    }
  std::set<std::string> head;
  for (const auto& a : rule.head.args) collect_vars(a, head);
  for (const auto& v : head)
    if (!bound.count(v))
      throw Error(ErrorCode::UnsafeRule, "line " + std::to_string(rule.line) + ": head variable " + v +
                                             " does not occur in a positive body atom");
  for (const auto& l : rule.body)
    if (l.kind != RuleLiteral::Kind::Atom)
      for (const auto& v : vars_of(l))
        if (!bound.count(v))
          throw Error(ErrorCode::UnsafeRule, "line " + std::to_string(rule.line) + ": comparison variable " + v +
                                                 " does not occur in a positive body atom");
}

}  // namespace rules

/// Parses rule text ("Head(...) :- body."). Disjunction groups "( a ; b )"
/// are expanded to one rule per alternative. Throws RuleSyntax / UnsafeRule.
inline std::vector<Rule> parse_rules(std::string_view src) {
  std::vector<Rule> out;
  for (const auto& [line, text] : rules::statements(src)) {
    std::pair<Fact, rules::Alternatives> parsed;
    try {
      rules::RuleParser p(text);
      parsed = p.statement();
    } catch (const Error& e) {
      throw Error(ErrorCode::RuleSyntax, "rule at line " + std::to_string(line) + ": " + e.what());
    }
    for (auto& body : parsed.second) {
      Rule r{parsed.first, std::move(body), line};
      rules::check_safety(r);
      out.push_back(std::move(r));
    }
  }
  return out;
}

inline std::vector<Rule> default_rules() { return parse_rules(read_data_file("rules/default.rules")); }

namespace rules {

class Bindings {
 public:
  const Term* get(const std::string& v) const {
    for (auto it = slots_.rbegin(); it != slots_.rend(); ++it)
      if (it->first == v) return &it->second;
    return nullptr;
  }
  void bind(const std::string& v, const Term& t) { slots_.emplace_back(v, t); }
  std::size_t mark() const { return slots_.size(); }
  void undo(std::size_t m) { slots_.resize(m); }

 private:
  std::vector<std::pair<std::string, Term>> slots_;
};

inline bool unify(const Term& pat, const Term& val, Bindings& b) {
  using K = Term::Kind;
  if (pat.kind == K::Var) {
    if (pat.text == "_") return true;
    if (const Term* cur = b.get(pat.text)) return *cur == val;
    b.bind(pat.text, val);
    return true;
  }
  if (pat.kind == K::Record) {
    if (val.kind != K::Record || val.text != pat.text) return false;
    for (std::size_t i = 0; i < pat.keys.size(); ++i) {
      const Term* f = val.field(pat.keys[i]);
      if (!f || !unify(pat.items[i], *f, b)) return false;
    }
    return true;
  }
  if (pat.kind == K::List) {
    if (val.kind != K::List || val.items.size() != pat.items.size()) return false;
    for (std::size_t i = 0; i < pat.items.size(); ++i)
      if (!unify(pat.items[i], val.items[i], b)) return false;
    return true;
  }
  return pat == val;
}

inline Term substitute(const Term& t, const Bindings& b) {
  if (t.kind == Term::Kind::Var) {
    if (const Term* v = b.get(t.text)) return *v;
    throw Error(ErrorCode::UnsafeRule, "unbound variable " + t.text);
  }
  Term out = t;
  for (auto& i : out.items) i = substitute(i, b);
  return out;
}

inline Term evaluate(const RuleExpr& e, const Bindings& b) {
  if (e.fn.empty()) return substitute(e.value, b);
  std::vector<Term> args;
  for (const auto& a : e.args) args.push_back(evaluate(a, b));
  if ((e.fn == "subnet" || e.fn == "addr") && args.size() == 1) {
    Ipv4Prefix p;
    if (args[0].kind == Term::Kind::Prefix) p = args[0].prefix;
    else if (args[0].kind == Term::Kind::Symbol) p = Ipv4Prefix::parse(args[0].text);
    else return Term::null();
    return e.fn == "subnet" ? Term::prefix_value(builtin_subnet(p)) : Term::address(p.address);
  }
  throw Error(ErrorCode::RuleSyntax, "unknown builtin " + e.fn + "/" + std::to_string(args.size()));
}

/// Facts grouped by predicate with a first-argument index.
class Store {
 public:
  bool add(const Fact& f) {
    if (!all_.insert(f).second) return false;
    auto& vec = by_pred_[f.predicate];
    vec.push_back(f);
    if (!f.args.empty()) index_[{f.predicate, f.args[0]}].push_back(vec.size() - 1);
    return true;
  }
  bool contains(const Fact& f) const { return all_.count(f) > 0; }

  template <class Fn>
  void scan(const Fact& pattern, const Bindings& b, Fn&& fn) const {
    auto it = by_pred_.find(pattern.predicate);
    if (it == by_pred_.end()) return;
    const auto& vec = it->second;
    std::optional<Term> first;
    if (!pattern.args.empty()) {
      const Term& p0 = pattern.args[0];
      if (p0.kind == Term::Kind::Var) {
        if (p0.text != "_")
          if (const Term* v = b.get(p0.text)) first = *v;
      } else if (p0.kind != Term::Kind::Record && p0.kind != Term::Kind::List) {
        first = p0;
      }
    }
    if (first) {
      auto ix = index_.find({pattern.predicate, *first});
      if (ix == index_.end()) return;
      for (auto i : ix->second) fn(vec[i]);
    } else {
      for (const auto& f : vec) fn(f);
    }
  }

 private:
  std::set<Fact> all_;
  std::map<std::string, std::vector<Fact>> by_pred_;
  std::map<std::pair<std::string, Term>, std::vector<std::size_t>> index_;
};

/// Literal order used for evaluation: atoms in source order, each comparison
/// right after the atom that binds its last variable.
inline std::vector<std::size_t> plan(const Rule& r) {
  std::vector<std::size_t> order;
  std::vector<bool> placed(r.body.size(), false);
  std::set<std::string> bound;
  auto place_ready = [&]() {
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (placed[i] || r.body[i].kind == RuleLiteral::Kind::Atom) continue;
      auto v = vars_of(r.body[i]);
      if (std::includes(bound.begin(), bound.end(), v.begin(), v.end())) {
        order.push_back(i);
        placed[i] = true;
      }
    }
  };
  place_ready();
  for (std::size_t i = 0; i < r.body.size(); ++i) {
    if (r.body[i].kind != RuleLiteral::Kind::Atom) continue;
    order.push_back(i);
    placed[i] = true;
    auto v = vars_of(r.body[i]);
    bound.insert(v.begin(), v.end());
    place_ready();
  }
  return order;
}

}  // namespace rules

/// Least fixed point of `rules` over `base` (semi-naive). Each implicit fact
/// records its lexicographically smallest support so the result does not
/// depend on rule or fact order.
inline DeducedBase apply_rules(const FactBase& base, const std::vector<Rule>& rule_set) {
  DeducedBase out;
  out.all = base;
  rules::Store store;
  std::vector<Fact> delta;
  for (const auto& f : base.facts())
    if (store.add(f)) delta.push_back(f);

  std::vector<std::vector<std::size_t>> plans;
  for (const auto& r : rule_set) plans.push_back(rules::plan(r));

  std::map<Fact, std::vector<Fact>> support;
  while (!delta.empty()) {
    rules::Store delta_store;
    std::set<std::string> delta_preds;
    for (const auto& f : delta) {
      delta_store.add(f);
      delta_preds.insert(f.predicate);
    }
    std::map<Fact, std::vector<Fact>> found;
    for (std::size_t ri = 0; ri < rule_set.size(); ++ri) {
      const Rule& rule = rule_set[ri];
      const auto& order = plans[ri];
      for (std::size_t pivot = 0; pivot < rule.body.size(); ++pivot) {
        if (rule.body[pivot].kind != RuleLiteral::Kind::Atom) continue;
        if (!delta_preds.count(rule.body[pivot].atom.predicate)) continue;
        rules::Bindings b;
        std::vector<Fact> used;
        std::function<void(std::size_t)> step = [&](std::size_t k) {
          if (k == order.size()) {
            Fact head{rule.head.predicate, {}};
            for (const auto& a : rule.head.args) head.args.push_back(rules::substitute(a, b));
            auto it = found.find(head);
            if (it == found.end() || used < it->second) found[head] = used;
            return;
          }
          const RuleLiteral& lit = rule.body[order[k]];
          if (lit.kind != RuleLiteral::Kind::Atom) {
            bool eq = rules::evaluate(lit.lhs, b) == rules::evaluate(lit.rhs, b);
            if (eq == (lit.kind == RuleLiteral::Kind::Equal)) step(k + 1);
            return;
          }
          const rules::Store& src = order[k] == pivot ? delta_store : store;
          src.scan(lit.atom, b, [&](const Fact& f) {
            if (f.args.size() != lit.atom.args.size()) return;
            auto m = b.mark();
            bool ok = true;
            for (std::size_t i = 0; i < f.args.size() && ok; ++i) ok = rules::unify(lit.atom.args[i], f.args[i], b);
            if (ok) {
              used.push_back(f);
              step(k + 1);
              used.pop_back();
            }
            b.undo(m);
          });
        };
        step(0);
      }
    }
    delta.clear();
    for (auto& [f, s] : found) {
      if (base.contains(f)) continue;  // explicit facts stay explicit
      auto it = support.find(f);
      if (it == support.end()) {
        support.emplace(f, s);
        if (store.add(f)) delta.push_back(f);
      } else if (s < it->second) {
        it->second = s;
      }
    }
  }
  for (auto& [f, s] : support) {
    std::string router = (!f.args.empty() && f.args[0].kind == Term::Kind::Symbol) ? f.args[0].text : "";
    out.all.insert(f, Provenance{router, "rules", "deducer"});
    out.derivation.emplace(f, std::move(s));
  }
  return out;
}

/// OSPFCost(r1, r2, c) for every RouteEdge(r1, r2): the cheapest configured
/// cost among r1's interfaces on a subnet shared with r2, `default_cost` when
/// none is configured.
inline std::vector<Fact> derive_pairwise_ospf_cost(DeducedBase& base, long long default_cost = 1) {
  std::map<std::string, std::vector<Fact>> ifaces;
  for (const auto& f : base.all.with_predicate("Interface")) ifaces[f.args[0].text].push_back(f);
  std::map<std::pair<std::string, std::string>, Fact> cost;
  for (const auto& f : base.all.with_predicate("InterfaceOSPFCost")) cost.emplace(std::pair{f.args[0].text, f.args[1].text}, f);

  std::vector<Fact> out;
  for (const auto& edge : base.all.with_predicate("RouteEdge")) {
    const std::string& r1 = edge.args[0].text;
    const std::string& r2 = edge.args[1].text;
    std::optional<long long> best;
    std::vector<Fact> why{edge};
    for (const auto& a : ifaces[r1]) {
      bool shared = false;
      for (const auto& b : ifaces[r2])
        if (a.args[2].prefix.network() == b.args[2].prefix.network()) shared = true;
      if (!shared) continue;
      long long c = default_cost;
      auto it = cost.find({r1, a.args[1].text});
      if (it != cost.end()) c = it->second.args[2].integer;
      if (!best || c < *best) {
        best = c;
        why = {edge, a};
        if (it != cost.end()) why.push_back(it->second);
      }
    }
    Fact f{"OSPFCost", {Term::symbol(r1), Term::symbol(r2), Term::integer_value(best.value_or(default_cost))}};
    if (base.all.contains(f)) continue;
    base.all.insert(f, Provenance{r1, "rules", "deducer"});
    base.derivation[f] = why;
    out.push_back(f);
  }
  return out;
}

/// Rules to fixed point, then pairwise OSPF costs.
inline DeducedBase deduce(const FactBase& base, const std::vector<Rule>& rule_set, long long default_cost = 1) {
  DeducedBase d = apply_rules(base, rule_set);
  derive_pairwise_ospf_cost(d, default_cost);
  return d;
}

/// Fact-literal rendering; implicit facts carry a "# derived" trailer.
inline std::string render_deduced(const DeducedBase& d) {
  std::string out;
  for (const auto& f : d.all.facts()) {
    out += literal::to_string(f);
    if (d.is_implicit(f)) out += "  # derived";
    out += '\n';
  }
  return out;
}

}  // namespace netquery
