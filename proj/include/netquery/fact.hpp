#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "netquery/error.hpp"
#include "netquery/ipv4.hpp"

namespace netquery {

/// A ground (or, inside rules, variable) argument of a fact.
///
/// Records reuse `items` for their values and `keys` for the field names, so a
/// record `neighbor(ip=1.1.1.5, remote_as=1)` has text="neighbor",
/// keys={"ip","remote_as"}, items={Ip, Int}.
class Term {
 public:
  enum class Kind { Null, Int, Symbol, Ip, Prefix, List, Record, Var };

  Kind kind = Kind::Null;
  long long integer = 0;
  std::string text;
  Ipv4 ip;
  Ipv4Prefix prefix;
  std::vector<std::string> keys;
  std::vector<Term> items;

  static Term null() { return Term{}; }
  static Term integer_value(long long v) {
    Term t;
    t.kind = Kind::Int;
    t.integer = v;
    return t;
  }
  static Term symbol(std::string s) {
    Term t;
    t.kind = Kind::Symbol;
    t.text = std::move(s);
    return t;
  }
  static Term address(Ipv4 a) {
    Term t;
    t.kind = Kind::Ip;
    t.ip = a;
    return t;
  }
  static Term prefix_value(Ipv4Prefix p) {
    Term t;
    t.kind = Kind::Prefix;
    t.prefix = p;
    return t;
  }
  static Term list(std::vector<Term> elems) {
    Term t;
    t.kind = Kind::List;
    t.items = std::move(elems);
    return t;
  }
  static Term record(std::string name, std::vector<std::pair<std::string, Term>> fields) {
    Term t;
    t.kind = Kind::Record;
    t.text = std::move(name);
    for (auto& [k, v] : fields) {
      t.keys.push_back(k);
      t.items.push_back(std::move(v));
    }
    return t;
  }
  static Term variable(std::string name) {
    Term t;
    t.kind = Kind::Var;
    t.text = std::move(name);
    return t;
  }

  bool is_null() const { return kind == Kind::Null; }

  /// Field lookup on records; nullptr when absent.
  const Term* field(std::string_view key) const {
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i] == key) return &items[i];
    return nullptr;
  }
  Term* field(std::string_view key) {
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i] == key) return &items[i];
    return nullptr;
  }

  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.kind != b.kind) return a.kind <=> b.kind;
    switch (a.kind) {
      case Kind::Null: return std::strong_ordering::equal;
      case Kind::Int: return a.integer <=> b.integer;
      case Kind::Symbol:
      case Kind::Var: return a.text <=> b.text;
      case Kind::Ip: return a.ip <=> b.ip;
      case Kind::Prefix: return a.prefix <=> b.prefix;
      case Kind::List: return compare_items(a.items, b.items);
      case Kind::Record:
        if (auto c = a.text <=> b.text; c != 0) return c;
        if (auto c = a.keys <=> b.keys; c != 0) return c;
        return compare_items(a.items, b.items);
    }
    return std::strong_ordering::equal;
  }
  friend bool operator==(const Term& a, const Term& b) { return (a <=> b) == 0; }

 private:
  static std::strong_ordering compare_items(const std::vector<Term>& a, const std::vector<Term>& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
      if (auto c = a[i] <=> b[i]; c != 0) return c;
    return a.size() <=> b.size();
  }
};

struct Fact {
  std::string predicate;
  std::vector<Term> args;

  friend std::strong_ordering operator<=>(const Fact& a, const Fact& b) {
    if (auto c = a.predicate <=> b.predicate; c != 0) return c;
    std::size_t n = std::min(a.args.size(), b.args.size());
    for (std::size_t i = 0; i < n; ++i)
      if (auto c = a.args[i] <=> b.args[i]; c != 0) return c;
    return a.args.size() <=> b.args.size();
  }
  friend bool operator==(const Fact& a, const Fact& b) { return (a <=> b) == 0; }
};

// ---------------------------------------------------------------------------
// Fact-literal text form

namespace literal {

inline bool is_bare_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_bare_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '/' || c == ':';
}

inline bool needs_quotes(std::string_view s) {
  if (s.empty() || s == "_" || !is_bare_start(s.front())) return true;
  return !std::all_of(s.begin(), s.end(), is_bare_char);
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

inline void print(std::ostream& os, const Term& t) {
  switch (t.kind) {
    case Term::Kind::Null: os << '_'; break;
    case Term::Kind::Int: os << t.integer; break;
    case Term::Kind::Symbol: os << (needs_quotes(t.text) ? quote(t.text) : t.text); break;
    case Term::Kind::Var: os << t.text; break;
    case Term::Kind::Ip: os << t.ip.str(); break;
    case Term::Kind::Prefix: os << t.prefix.str(); break;
    case Term::Kind::List:
      os << '[';
      for (std::size_t i = 0; i < t.items.size(); ++i) {
        if (i) os << ", ";
        print(os, t.items[i]);
      }
      os << ']';
      break;
    case Term::Kind::Record:
      os << t.text << '(';
      for (std::size_t i = 0; i < t.items.size(); ++i) {
        if (i) os << ", ";
        os << t.keys[i] << '=';
        print(os, t.items[i]);
      }
      os << ')';
      break;
  }
}

inline std::string to_string(const Term& t) {
  std::ostringstream os;
  print(os, t);
  return os.str();
}

inline std::string to_string(const Fact& f) {
  std::ostringstream os;
  os << f.predicate << '(';
  for (std::size_t i = 0; i < f.args.size(); ++i) {
    if (i) os << ", ";
    print(os, f.args[i]);
  }
  os << ')';
  return os.str();
}

/// Cursor-based reader shared by the fact-literal parser and the rule parser.
/// With `variables` set, bare identifiers starting with an uppercase letter or
/// '_' (other than a lone '_') read as Var terms.
class Reader {
 public:
  explicit Reader(std::string_view src, bool variables = false) : src_(src), variables_(variables) {}

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip_space();
    return pos_ >= src_.size();
  }

  char peek() {
    skip_space();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool consume(std::string_view s) {
    skip_space();
    if (src_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  std::string identifier() {
    skip_space();
    std::size_t start = pos_;
    if (pos_ >= src_.size() || !is_bare_start(src_[pos_])) fail("expected identifier");
    while (pos_ < src_.size() && is_bare_char(src_[pos_])) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  Term term() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    char c = src_[pos_];
    if (c == '"') return Term::symbol(quoted());
    if (c == '[') {
      ++pos_;
      std::vector<Term> elems;
      if (!consume(']')) {
        do {
          elems.push_back(term());
        } while (consume(','));
        expect(']');
      }
      return Term::list(std::move(elems));
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return numeric();
    if (is_bare_start(c)) {
      std::string id = identifier();
      if (peek() == '(') {
        ++pos_;
        std::vector<std::pair<std::string, Term>> fields;
        if (!consume(')')) {
          do {
            std::string key = identifier();
            expect('=');
            fields.emplace_back(key, term());
          } while (consume(','));
          expect(')');
        }
        return Term::record(id, std::move(fields));
      }
      if (id == "_") return variables_ ? Term::variable("_") : Term::null();
      if (variables_ && (std::isupper(static_cast<unsigned char>(id.front())) || id.front() == '_'))
        return Term::variable(id);
      return Term::symbol(id);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::FactSyntax, what + " at " + std::to_string(line) + ":" + std::to_string(col));
  }

  std::size_t position() const { return pos_; }
  void seek(std::size_t pos) { pos_ = pos; }
  std::string_view source() const { return src_; }

 private:
  std::string quoted() {
    ++pos_;
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      char c = src_[pos_++];
      if (c == '\\' && pos_ < src_.size()) {
        char e = src_[pos_++];
        out += (e == 'n') ? '\n' : e;
      } else {
        out += c;
      }
    }
    if (pos_ >= src_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  Term numeric() {
    std::size_t start = pos_;
    if (src_[pos_] == '-') ++pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
                                  src_[pos_] == '/' || src_[pos_] == ':'))
      ++pos_;
    std::string_view tok = src_.substr(start, pos_ - start);
    if (tok.find('/') != std::string_view::npos) {
      if (auto p = Ipv4Prefix::try_parse(tok)) return Term::prefix_value(*p);
      fail("bad prefix '" + std::string(tok) + "'");
    }
    if (tok.find('.') != std::string_view::npos) {
      if (auto a = Ipv4::parse(tok)) return Term::address(*a);
      fail("bad address '" + std::string(tok) + "'");
    }
    if (tok.find(':') != std::string_view::npos) return Term::symbol(std::string(tok));
    if (auto v = text::parse_int(tok)) return Term::integer_value(*v);
    fail("bad number '" + std::string(tok) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  bool variables_;
};

inline Term parse_term(std::string_view s) {
  Reader r(s);
  Term t = r.term();
  if (!r.at_end()) r.fail("trailing input");
  return t;
}

inline Fact parse_fact(Reader& r) {
  Fact f;
  f.predicate = r.identifier();
  r.expect('(');
  if (!r.consume(')')) {
    do {
      f.args.push_back(r.term());
    } while (r.consume(','));
    r.expect(')');
  }
  return f;
}

inline Fact parse_fact(std::string_view s) {
  Reader r(s);
  Fact f = parse_fact(r);
  if (!r.at_end()) r.fail("trailing input");
  return f;
}

/// One parsed line of a fact-literal document.
struct Line {
  std::size_t number = 0;
  Fact fact;
  bool derived = false;  // carried a "# derived" trailer
};

/// Parses a whole document. Blank lines and '#' comments are skipped.
inline std::vector<Line> parse_document(std::string_view doc) {
  std::vector<Line> out;
  auto lines = text::split_lines(doc);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view raw = text::trim(text::strip_cr(lines[i]));
    if (raw.empty() || raw.front() == '#') continue;
    Reader r(raw);
    Line line;
    line.number = i + 1;
    try {
      line.fact = parse_fact(r);
    } catch (const Error& e) {
      throw Error(ErrorCode::FactSyntax, "line " + std::to_string(i + 1) + ": " + e.what());
    }
    std::size_t after = r.position();
    std::string_view rest = text::trim(raw.substr(after));
    if (!rest.empty() && rest.front() != '#') {
      throw Error(ErrorCode::FactSyntax, "line " + std::to_string(i + 1) + ": trailing input");
    }
    line.derived = rest.find("derived") != std::string_view::npos;
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace literal

// ---------------------------------------------------------------------------
// Schema

enum class ArgType { Symbol, Int, Access, InterfaceAddress, Prefix, Ip, SymbolList, ClauseList, Neighbor, Any };

struct PredicateSchema {
  std::string name;
  std::vector<ArgType> args;
  std::vector<std::size_t> key;  // argument positions forming the conflict key
  enum class Merge { Replace, AppendList, FieldUnion, Set } merge = Merge::Set;
};

/// Built-in predicate schemas. Router-local entities carry the router name as
/// their first argument so facts from different devices never collide.
inline const std::map<std::string, PredicateSchema, std::less<>>& schemas() {
  using A = ArgType;
  using M = PredicateSchema::Merge;
  static const std::map<std::string, PredicateSchema, std::less<>> table = {
      {"Router", {"Router", {A::Symbol}, {0}, M::Set}},
      {"Interface", {"Interface", {A::Symbol, A::Symbol, A::InterfaceAddress}, {0, 1}, M::Replace}},
      {"IPPrefixList", {"IPPrefixList", {A::Symbol, A::Symbol, A::Int, A::Access, A::Prefix}, {0, 1, 2}, M::Replace}},
      {"CommunityList", {"CommunityList", {A::Symbol, A::Symbol, A::Access, A::SymbolList}, {}, M::Set}},
      {"RouteMap",
       {"RouteMap", {A::Symbol, A::Symbol, A::Int, A::Access, A::ClauseList, A::ClauseList}, {0, 1, 2}, M::Replace}},
      {"BGP", {"BGP", {A::Symbol, A::Int, A::Neighbor}, {0}, M::FieldUnion}},
      {"OSPFNetwork", {"OSPFNetwork", {A::Symbol, A::SymbolList}, {0}, M::AppendList}},
      {"InterfaceOSPFCost", {"InterfaceOSPFCost", {A::Symbol, A::Symbol, A::Int}, {0, 1}, M::Replace}},
      {"OSPFCost", {"OSPFCost", {A::Symbol, A::Symbol, A::Int}, {0, 1}, M::Replace}},
      {"RouteEdge", {"RouteEdge", {A::Symbol, A::Symbol}, {}, M::Set}},
      {"BGPPeer", {"BGPPeer", {A::Symbol, A::Symbol}, {}, M::Set}},
  };
  return table;
}

/// Field order of the BGP neighbor record.
inline const std::vector<std::string>& neighbor_fields() {
  static const std::vector<std::string> f = {"ip", "remote_as", "peer", "in", "out", "adv_interval"};
  return f;
}

inline Term make_neighbor(Ipv4 ip, std::optional<long long> remote_as = std::nullopt) {
  std::vector<std::pair<std::string, Term>> fields;
  for (const auto& k : neighbor_fields()) fields.emplace_back(k, Term::null());
  Term t = Term::record("neighbor", std::move(fields));
  *t.field("ip") = Term::address(ip);
  if (remote_as) *t.field("remote_as") = Term::integer_value(*remote_as);
  return t;
}

namespace detail {

inline bool check_arg(const Term& t, ArgType type, std::string& why) {
  using K = Term::Kind;
  switch (type) {
    case ArgType::Any: return true;
    case ArgType::Symbol: return t.kind == K::Symbol;
    case ArgType::Int: return t.kind == K::Int;
    case ArgType::Access: return t.kind == K::Symbol && (t.text == "permit" || t.text == "deny");
    case ArgType::InterfaceAddress: return t.kind == K::Prefix;
    case ArgType::Prefix:
      if (t.kind != K::Prefix) return false;
      if (!t.prefix.is_canonical()) {
        why = "prefix " + t.prefix.str() + " has host bits set";
        return false;
      }
      return true;
    case ArgType::Ip: return t.kind == K::Ip;
    case ArgType::SymbolList:
      return t.kind == K::List &&
             std::all_of(t.items.begin(), t.items.end(), [](const Term& e) { return e.kind == K::Symbol; });
    case ArgType::ClauseList:
      return t.kind == K::List &&
             std::all_of(t.items.begin(), t.items.end(), [](const Term& e) { return e.kind == K::Record; });
    case ArgType::Neighbor: {
      if (t.kind != K::Record || t.text != "neighbor" || t.keys != neighbor_fields()) return false;
      const Term& ip = *t.field("ip");
      const Term& ras = *t.field("remote_as");
      auto sym_or_null = [](const Term& x) { return x.kind == K::Symbol || x.kind == K::Null; };
      auto int_or_null = [](const Term& x) { return x.kind == K::Int || x.kind == K::Null; };
      return ip.kind == K::Ip && int_or_null(ras) && sym_or_null(*t.field("peer")) &&
             sym_or_null(*t.field("in")) && sym_or_null(*t.field("out")) && int_or_null(*t.field("adv_interval"));
    }
  }
  return false;
}

}  // namespace detail

/// Empty string when the fact matches its schema (or has no schema); an
/// explanation otherwise.
inline std::string schema_problem(const Fact& f) {
  const auto& table = schemas();
  auto it = table.find(f.predicate);
  if (it == table.end()) return {};
  const auto& s = it->second;
  if (f.args.size() != s.args.size())
    return f.predicate + " expects " + std::to_string(s.args.size()) + " arguments, got " +
           std::to_string(f.args.size());
  for (std::size_t i = 0; i < s.args.size(); ++i) {
    std::string why;
    if (!detail::check_arg(f.args[i], s.args[i], why))
      return f.predicate + " argument " + std::to_string(i + 1) + " has the wrong type" +
             (why.empty() ? "" : " (" + why + ")");
  }
  return {};
}

inline void validate(const Fact& f) {
  if (auto p = schema_problem(f); !p.empty()) throw Error(ErrorCode::SchemaViolation, p);
}

/// Conflict key: predicate plus key arguments (the whole fact when the schema
/// declares no key). BGP facts are keyed by router and neighbor address.
inline Fact key_of(const Fact& f) {
  const auto& table = schemas();
  auto it = table.find(f.predicate);
  if (it == table.end() || it->second.key.empty()) return f;
  Fact k{f.predicate, {}};
  for (auto i : it->second.key)
    if (i < f.args.size()) k.args.push_back(f.args[i]);
  if (f.predicate == "BGP" && f.args.size() == 3) {
    if (const Term* ip = f.args[2].field("ip")) k.args.push_back(*ip);
  }
  return k;
}

}  // namespace netquery
