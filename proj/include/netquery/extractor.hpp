#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netquery/chunker.hpp"
#include "netquery/fact.hpp"
#include "netquery/factbase.hpp"
#include "netquery/ipv4.hpp"
#include "netquery/snapshot.hpp"

namespace netquery {

/// Raw grammar output for one chunk, in statement order.
struct Extraction {
  std::vector<Fact> facts;
  std::vector<std::string> skipped;  // "line: text" of unrecognized statements
  std::vector<std::string> notes;    // approximations (ge/le, secondary addresses, ...)
};

namespace grammar {

inline Term sym(std::string s) { return Term::symbol(std::move(s)); }
inline Term num(long long v) { return Term::integer_value(v); }

inline Term clause(std::string name, std::vector<std::pair<std::string, Term>> fields) {
  return Term::record(std::move(name), std::move(fields));
}

inline Term raw_clause(std::string_view line) { return clause("raw", {{"text", sym(std::string(text::trim(line)))}}); }

/// Accumulates facts whose arguments arrive over several statements.
struct Collector {
  std::string router;
  Extraction out;
  std::vector<std::pair<Ipv4, Fact>> neighbors;  // BGP facts by neighbor, first-seen order
  std::vector<std::string> ospf_members;

  void emit(Fact f) { out.facts.push_back(std::move(f)); }

  Term& neighbor(long long asn, Ipv4 ip) {
    for (auto& [addr, f] : neighbors) {
      if (addr == ip) {
        f.args[1] = num(asn);
        return f.args[2];
      }
    }
    neighbors.emplace_back(ip, Fact{"BGP", {sym(router), num(asn), make_neighbor(ip)}});
    return neighbors.back().second.args[2];
  }

  void ospf_member(const std::string& iface) {
    if (std::find(ospf_members.begin(), ospf_members.end(), iface) == ospf_members.end())
      ospf_members.push_back(iface);
  }

  void skip(std::size_t line, std::string_view text) {
    out.skipped.push_back(std::to_string(line) + ": " + std::string(text::trim(text)));
  }

  Extraction finish() {
    for (auto& [_, f] : neighbors) out.facts.push_back(f);
    if (!ospf_members.empty()) {
      std::vector<Term> names;
      for (const auto& m : ospf_members) names.push_back(sym(m));
      out.facts.push_back(Fact{"OSPFNetwork", {sym(router), Term::list(std::move(names))}});
    }
    return std::move(out);
  }
};

inline std::optional<long long> to_int(std::string_view s) { return text::parse_int(s); }

/// Interface addresses visible in a chunk (for OSPF network statements).
inline std::vector<std::pair<std::string, Ipv4>> interface_addresses(const std::vector<ConfigBlock>& blocks) {
  std::vector<std::pair<std::string, Ipv4>> out;
  for (const auto& b : blocks)
    if (b.kind == BlockKind::Interface && b.identifier)
      for (Ipv4 a : b.addresses) out.emplace_back(*b.identifier, a);
  return out;
}

inline void covered_interfaces(Collector& c, const std::vector<std::pair<std::string, Ipv4>>& addrs,
                               const WildcardRange& range) {
  for (const auto& [name, a] : addrs)
    if (range.covers(a)) c.ospf_member(name);
}

inline void prefix_list_entry(Collector& c, const std::string& name, long long seq, const std::string& access,
                              Ipv4Prefix p, bool range_modifier, std::size_t ln) {
  if (!p.is_canonical()) {
    c.out.notes.push_back("line " + std::to_string(ln) + ": prefix " + p.str() + " canonicalized");
    p = p.network();
  }
  if (range_modifier)
    c.out.notes.push_back("line " + std::to_string(ln) + ": ge/le range on " + name +
                          " not modelled; treated as exact match");
  c.emit(Fact{"IPPrefixList", {sym(c.router), sym(name), num(seq), sym(access), Term::prefix_value(p)}});
}

// ---- Cisco IOS and Aruba ----------------------------------------------------

struct RouteMapClause {
  std::string name;
  long long seq = 10;
  std::string access = "permit";
  std::vector<Term> matches;
  std::vector<Term> actions;

  Fact fact(const std::string& router) const {
    return Fact{"RouteMap",
                {sym(router), sym(name), num(seq), sym(access), Term::list(matches), Term::list(actions)}};
  }
};

inline Extraction cisco(const ConfigDocument& doc, const std::vector<ConfigBlock>& blocks, const std::string& router) {
  Collector c{router, {}, {}, {}};
  auto addrs = interface_addresses(blocks);
  std::map<std::string, long long> prefix_seq;

  for (const auto& b : blocks) {
    std::optional<RouteMapClause> rm;
    auto flush = [&]() {
      if (rm) c.emit(rm->fact(router));
      rm.reset();
    };
    std::optional<long long> bgp_asn;
    bool is_ospf = b.kind == BlockKind::RouterProcess && b.identifier && text::starts_with(*b.identifier, "ospf");
    if (b.kind == BlockKind::RouterProcess && b.identifier && text::starts_with(*b.identifier, "bgp "))
      bgp_asn = to_int(b.identifier->substr(4));

    bool seen_address = false;
    for (std::size_t ln : b.lines) {
      std::string_view line = doc.line(ln);
      auto t = text::split_ws(line);
      if (t.empty()) continue;
      bool recognized = true;
      switch (b.kind) {
        case BlockKind::Hostname: c.emit(Fact{"Router", {sym(t[1])}}); break;
        case BlockKind::Interface:
          if (t[0] == "interface") break;
          if (t[0] == "ip" && t.size() >= 3 && t[1] == "address") {
            std::optional<Ipv4Prefix> p = t.size() >= 4 ? Ipv4Prefix::from_mask(t[2], t[3]) : std::nullopt;
            if (!p) p = Ipv4Prefix::try_parse(t[2]);
            if (!p) {
              recognized = false;
            } else if (seen_address || (t.size() >= 5 && t[4] == "secondary")) {
              c.out.notes.push_back("line " + std::to_string(ln) + ": additional address ignored");
            } else {
              seen_address = true;
              c.emit(Fact{"Interface", {sym(router), sym(*b.identifier), Term::prefix_value(*p)}});
            }
          } else if (t[0] == "ip" && t.size() >= 4 && t[1] == "ospf" && t[2] == "cost") {
            if (auto v = to_int(t[3])) c.emit(Fact{"InterfaceOSPFCost", {sym(router), sym(*b.identifier), num(*v)}});
            else recognized = false;
          } else if (t[0] == "ip" && t.size() >= 5 && t[1] == "ospf" && t[3] == "area") {
            c.ospf_member(*b.identifier);  // Aruba/IOS per-interface OSPF enablement
          } else {
            recognized = false;
          }
          break;
        case BlockKind::RouterProcess:
          if (t[0] == "router") break;
          if (is_ospf && t[0] == "network" && t.size() >= 3) {
            auto base = Ipv4::parse(t[1]);
            auto wc = Ipv4::parse(t[2]);
            if (base && wc) covered_interfaces(c, addrs, WildcardRange{*base, *wc});
            else recognized = false;
          } else if (bgp_asn && t[0] == "neighbor" && t.size() >= 3) {
            auto ip = Ipv4::parse(t[1]);
            if (!ip) {
              recognized = false;
              break;
            }
            if (t[2] == "remote-as" && t.size() >= 4 && to_int(t[3])) {
              *c.neighbor(*bgp_asn, *ip).field("remote_as") = num(*to_int(t[3]));
            } else if (t[2] == "route-map" && t.size() >= 5 && (t[4] == "in" || t[4] == "out")) {
              *c.neighbor(*bgp_asn, *ip).field(t[4]) = sym(t[3]);
            } else if (t[2] == "advertisement-interval" && t.size() >= 4 && to_int(t[3])) {
              *c.neighbor(*bgp_asn, *ip).field("adv_interval") = num(*to_int(t[3]));
            } else {
              recognized = false;
            }
          } else {
            recognized = false;
          }
          break;
        case BlockKind::RouteMap:
          if (t[0] == "route-map") {
            flush();
            rm = RouteMapClause{};
            rm->name = t[1];
            if (t.size() >= 3) rm->access = t[2];
            std::size_t seq_at = (t.size() >= 5 && t[3] == "seq") ? 4 : 3;
            if (t.size() > seq_at) rm->seq = to_int(t[seq_at]).value_or(10);
            break;
          }
          if (!rm) {
            recognized = false;
            break;
          }
          if (t[0] == "match" && t.size() >= 5 && t[1] == "ip" && t[2] == "address" && t[3] == "prefix-list") {
            for (std::size_t i = 4; i < t.size(); ++i) rm->matches.push_back(clause("prefix_list", {{"name", sym(t[i])}}));
          } else if (t[0] == "match" && t.size() >= 4 && t[1] == "ip" && t[2] == "address") {
            for (std::size_t i = 3; i < t.size(); ++i) {
              if (auto ip = Ipv4::parse(t[i])) rm->matches.push_back(clause("ip_address", {{"value", Term::address(*ip)}}));
              else rm->matches.push_back(clause("acl", {{"name", sym(t[i])}}));
            }
          } else if (t[0] == "match" && t.size() >= 3 && t[1] == "community") {
            for (std::size_t i = 2; i < t.size(); ++i)
              if (t[i] != "exact-match") rm->matches.push_back(clause("community", {{"name", sym(t[i])}}));
          } else if (t[0] == "set" && t.size() >= 3 && t[1] == "local-preference" && to_int(t[2])) {
            rm->actions.push_back(clause("local_preference", {{"value", num(*to_int(t[2]))}}));
          } else if (t[0] == "set" && t.size() >= 4 && t[1] == "as-path" && t[2] == "prepend") {
            std::vector<Term> asns;
            for (std::size_t i = 3; i < t.size(); ++i)
              if (auto v = to_int(t[i])) asns.push_back(num(*v));
            rm->actions.push_back(clause("as_path_prepend", {{"asns", Term::list(std::move(asns))}}));
          } else if (t[0] == "set" && t.size() >= 3 && t[1] == "metric" && to_int(t[2])) {
            rm->actions.push_back(clause("metric", {{"value", num(*to_int(t[2]))}}));
          } else if (t[0] == "set" && t.size() >= 3 && t[1] == "community") {
            std::vector<Term> values;
            for (std::size_t i = 2; i < t.size(); ++i)
              if (t[i] != "additive") values.push_back(sym(t[i]));
            rm->actions.push_back(clause("community", {{"values", Term::list(std::move(values))}}));
          } else if (t[0] == "match") {
            rm->matches.push_back(raw_clause(line));
          } else if (t[0] == "set") {
            rm->actions.push_back(raw_clause(line));
          } else {
            recognized = false;
          }
          break;
        case BlockKind::IPPrefixList: {
          // ip prefix-list NAME [seq N] permit|deny A/len [ge x] [le y]
          if (t.size() < 5 || t[0] != "ip") {
            recognized = false;
            break;
          }
          std::size_t i = 3;
          long long seq;
          if (t[i] == "seq" && t.size() >= 7) {
            seq = to_int(t[i + 1]).value_or(0);
            i += 2;
          } else {
            seq = prefix_seq[t[2]] + 5;
          }
          prefix_seq[t[2]] = seq;
          if ((t[i] != "permit" && t[i] != "deny") || i + 1 >= t.size()) {
            recognized = false;
            break;
          }
          auto p = Ipv4Prefix::try_parse(t[i + 1]);
          if (!p) {
            recognized = false;
            break;
          }
          prefix_list_entry(c, t[2], seq, t[i], *p, t.size() > i + 2, ln);
          break;
        }
        case BlockKind::CommunityList: {
          std::size_t i = (t.size() >= 4 && (t[2] == "standard" || t[2] == "expanded")) ? 3 : 2;
          if (t.size() < i + 3 || (t[i + 1] != "permit" && t[i + 1] != "deny")) {
            recognized = false;
            break;
          }
          std::vector<Term> members;
          for (std::size_t k = i + 2; k < t.size(); ++k) members.push_back(sym(t[k]));
          c.emit(Fact{"CommunityList", {sym(router), sym(t[i]), sym(t[i + 1]), Term::list(std::move(members))}});
          break;
        }
        case BlockKind::Other: recognized = false; break;
      }
      if (!recognized) c.skip(ln, line);
    }
    flush();
  }
  return c.finish();
}

// ---- Huawei VRP and H3C Comware --------------------------------------------

inline Extraction vrp(const ConfigDocument& doc, const std::vector<ConfigBlock>& blocks, const std::string& router) {
  Collector c{router, {}, {}, {}};
  auto addrs = interface_addresses(blocks);

  for (const auto& b : blocks) {
    std::optional<RouteMapClause> rm;
    auto flush = [&]() {
      if (rm) c.emit(rm->fact(router));
      rm.reset();
    };
    std::optional<long long> bgp_asn;
    bool is_ospf = b.kind == BlockKind::RouterProcess && b.identifier && text::starts_with(*b.identifier, "ospf");
    if (b.kind == BlockKind::RouterProcess && b.identifier && text::starts_with(*b.identifier, "bgp "))
      bgp_asn = to_int(b.identifier->substr(4));
    bool seen_address = false;

    for (std::size_t ln : b.lines) {
      std::string_view line = doc.line(ln);
      auto t = text::split_ws(line);
      if (t.empty()) continue;
      bool recognized = true;
      switch (b.kind) {
        case BlockKind::Hostname: c.emit(Fact{"Router", {sym(t[1])}}); break;
        case BlockKind::Interface:
          if (t[0] == "interface") break;
          if (t[0] == "ip" && t.size() >= 4 && t[1] == "address") {
            std::optional<Ipv4Prefix> p = Ipv4Prefix::from_mask(t[2], t[3]);
            if (!p) {
              auto a = Ipv4::parse(t[2]);
              auto len = to_int(t[3]);
              if (a && len && *len >= 0 && *len <= 32) p = Ipv4Prefix{*a, static_cast<int>(*len)};
            }
            if (!p) {
              recognized = false;
            } else if (seen_address || (t.size() >= 5 && t[4] == "sub")) {
              c.out.notes.push_back("line " + std::to_string(ln) + ": additional address ignored");
            } else {
              seen_address = true;
              c.emit(Fact{"Interface", {sym(router), sym(*b.identifier), Term::prefix_value(*p)}});
            }
          } else if (t[0] == "ospf" && t.size() >= 3 && t[1] == "cost" && to_int(t[2])) {
            c.emit(Fact{"InterfaceOSPFCost", {sym(router), sym(*b.identifier), num(*to_int(t[2]))}});
          } else if (t[0] == "ospf" && t.size() >= 4 && t[2] == "area") {
            c.ospf_member(*b.identifier);
          } else {
            recognized = false;
          }
          break;
        case BlockKind::RouterProcess:
          if (t[0] == "ospf" || t[0] == "bgp" || t[0] == "area" || t[0] == "ipv4-family") break;
          if (is_ospf && t[0] == "network" && t.size() >= 3) {
            auto base = Ipv4::parse(t[1]);
            auto wc = Ipv4::parse(t[2]);
            if (base && wc) covered_interfaces(c, addrs, WildcardRange{*base, *wc});
            else recognized = false;
          } else if (bgp_asn && t[0] == "peer" && t.size() >= 4) {
            auto ip = Ipv4::parse(t[1]);
            if (!ip) {
              recognized = false;
            } else if (t[2] == "as-number" && to_int(t[3])) {
              *c.neighbor(*bgp_asn, *ip).field("remote_as") = num(*to_int(t[3]));
            } else if (t[2] == "route-policy" && t.size() >= 5 && (t[4] == "import" || t[4] == "export")) {
              *c.neighbor(*bgp_asn, *ip).field(t[4] == "import" ? "in" : "out") = sym(t[3]);
            } else if (t[2] == "route-update-interval" && to_int(t[3])) {
              *c.neighbor(*bgp_asn, *ip).field("adv_interval") = num(*to_int(t[3]));
            } else {
              recognized = false;
            }
          } else {
            recognized = false;
          }
          break;
        case BlockKind::RouteMap:
          if (t[0] == "route-policy") {
            flush();
            rm = RouteMapClause{};
            rm->name = t[1];
            if (t.size() >= 3) rm->access = t[2];
            if (t.size() >= 5 && t[3] == "node") rm->seq = to_int(t[4]).value_or(10);
            break;
          }
          if (!rm) {
            recognized = false;
            break;
          }
          if (t[0] == "if-match" && t.size() >= 3 && (t[1] == "ip-prefix" || t[1] == "prefix-list")) {
            rm->matches.push_back(clause("prefix_list", {{"name", sym(t[2])}}));
          } else if (t[0] == "if-match" && t.size() >= 5 && t[1] == "ip" && t[2] == "address" &&
                     t[3] == "prefix-list") {
            rm->matches.push_back(clause("prefix_list", {{"name", sym(t[4])}}));
          } else if (t[0] == "if-match" && t.size() >= 3 && (t[1] == "community-filter" || t[1] == "community-list")) {
            rm->matches.push_back(clause("community", {{"name", sym(t[2])}}));
          } else if (t[0] == "apply" && t.size() >= 3 && t[1] == "local-preference" && to_int(t[2])) {
            rm->actions.push_back(clause("local_preference", {{"value", num(*to_int(t[2]))}}));
          } else if (t[0] == "apply" && t.size() >= 4 && t[1] == "as-path" && t.back() == "additive") {
            std::vector<Term> asns;
            for (std::size_t i = 2; i + 1 < t.size(); ++i)
              if (auto v = to_int(t[i])) asns.push_back(num(*v));
            rm->actions.push_back(clause("as_path_prepend", {{"asns", Term::list(std::move(asns))}}));
          } else if (t[0] == "apply" && t.size() >= 3 && t[1] == "cost" && to_int(t[2])) {
            rm->actions.push_back(clause("metric", {{"value", num(*to_int(t[2]))}}));
          } else if (t[0] == "apply" && t.size() >= 3 && t[1] == "community") {
            std::vector<Term> values;
            for (std::size_t i = 2; i < t.size(); ++i)
              if (t[i] != "additive") values.push_back(sym(t[i]));
            rm->actions.push_back(clause("community", {{"values", Term::list(std::move(values))}}));
          } else if (t[0] == "if-match") {
            rm->matches.push_back(raw_clause(line));
          } else if (t[0] == "apply") {
            rm->actions.push_back(raw_clause(line));
          } else {
            recognized = false;
          }
          break;
        case BlockKind::IPPrefixList: {
          // ip ip-prefix NAME index N permit|deny A LEN [greater-equal x] [less-equal y]
          if (t.size() < 8 || t[3] != "index" || (t[5] != "permit" && t[5] != "deny")) {
            recognized = false;
            break;
          }
          auto a = Ipv4::parse(t[6]);
          auto len = to_int(t[7]);
          auto seq = to_int(t[4]);
          if (!a || !len || !seq || *len < 0 || *len > 32) {
            recognized = false;
            break;
          }
          prefix_list_entry(c, t[2], *seq, t[5], Ipv4Prefix{*a, static_cast<int>(*len)}, t.size() > 8, ln);
          break;
        }
        case BlockKind::CommunityList: {
          std::size_t i = (t.size() >= 4 && (t[2] == "basic" || t[2] == "advanced")) ? 3 : 2;
          if (t.size() < i + 3 || (t[i + 1] != "permit" && t[i + 1] != "deny")) {
            recognized = false;
            break;
          }
          std::vector<Term> members;
          for (std::size_t k = i + 2; k < t.size(); ++k) members.push_back(sym(t[k]));
          c.emit(Fact{"CommunityList", {sym(router), sym(t[i]), sym(t[i + 1]), Term::list(std::move(members))}});
          break;
        }
        case BlockKind::Other: recognized = false; break;
      }
      if (!recognized) c.skip(ln, line);
    }
    flush();
  }
  return c.finish();
}

// ---- Juniper -----------------------------------------------------------------

/// Junos hierarchical statement: words up to ';' or a '{ ... }' body.
struct JunosNode {
  std::vector<std::string> words;
  std::vector<JunosNode> children;
  std::size_t line = 0;
  bool block = false;

  const JunosNode* child(std::string_view first) const {
    for (const auto& c : children)
      if (!c.words.empty() && c.words[0] == first) return &c;
    return nullptr;
  }
};

inline std::vector<JunosNode> parse_junos(const ConfigDocument& doc, const std::vector<std::size_t>& lines) {
  struct Tok {
    std::string text;
    std::size_t line;
  };
  std::vector<Tok> toks;
  for (std::size_t ln : lines) {
    std::string_view l = doc.line(ln);
    std::size_t i = 0;
    while (i < l.size()) {
      char ch = l[i];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
      } else if (ch == '#') {
        break;
      } else if (ch == '{' || ch == '}' || ch == ';' || ch == '[' || ch == ']') {
        toks.push_back({std::string(1, ch), ln});
        ++i;
      } else if (ch == '"') {
        std::size_t j = l.find('"', i + 1);
        if (j == std::string_view::npos) j = l.size();
        toks.push_back({std::string(l.substr(i + 1, j - i - 1)), ln});
        i = j + 1;
      } else {
        std::size_t j = i;
        while (j < l.size() && !std::isspace(static_cast<unsigned char>(l[j])) && l[j] != '{' && l[j] != '}' &&
               l[j] != ';' && l[j] != '[' && l[j] != ']')
          ++j;
        toks.push_back({std::string(l.substr(i, j - i)), ln});
        i = j;
      }
    }
  }
  std::size_t pos = 0;
  std::function<std::vector<JunosNode>()> body = [&]() {
    std::vector<JunosNode> out;
    JunosNode cur;
    while (pos < toks.size()) {
      const auto& tk = toks[pos++];
      if (tk.text == "}") break;
      if (tk.text == "[" || tk.text == "]") continue;
      if (tk.text == ";") {
        if (!cur.words.empty()) out.push_back(std::move(cur));
        cur = JunosNode{};
      } else if (tk.text == "{") {
        cur.block = true;
        cur.children = body();
        out.push_back(std::move(cur));
        cur = JunosNode{};
      } else {
        if (cur.words.empty()) cur.line = tk.line;
        cur.words.push_back(tk.text);
      }
    }
    if (!cur.words.empty()) out.push_back(std::move(cur));
    return out;
  };
  return body();
}

inline void junos_leaves(const JunosNode& n, std::vector<const JunosNode*>& out) {
  if (!n.block) out.push_back(&n);
  for (const auto& c : n.children) junos_leaves(c, out);
}

inline Extraction juniper(const ConfigDocument& doc, const std::vector<ConfigBlock>& blocks,
                          const std::string& router) {
  Collector c{router, {}, {}, {}};
  std::optional<long long> autonomous;
  for (const auto& b : blocks) {
    for (std::size_t ln : b.lines) {
      auto t = text::split_ws(doc.line(ln));
      if (t.size() >= 2 && t[0] == "autonomous-system") autonomous = to_int(chunking::strip_semicolon(t[1]));
    }
  }

  for (const auto& b : blocks) {
    auto nodes = parse_junos(doc, b.lines);
    std::set<std::size_t> used_lines;
    auto use = [&](const JunosNode& n) { used_lines.insert(n.line); };

    for (const auto& top : nodes) {
      if (top.words.empty()) continue;
      const std::string& head = top.words[0];
      if (b.kind == BlockKind::Hostname) {
        use(top);
        if (auto* h = top.child("host-name"); h && h->words.size() >= 2) {
          use(*h);
          c.emit(Fact{"Router", {sym(h->words[1])}});
        }
      } else if (b.kind == BlockKind::Interface) {
        use(top);
        for (const auto& unit : top.children) {
          if (unit.words.size() < 2 || unit.words[0] != "unit") continue;
          use(unit);
          std::string name = unit.words[1] == "0" ? head : head + "." + unit.words[1];
          bool seen = false;
          for (const auto& fam : unit.children) {
            use(fam);
            for (const auto& addr : fam.children) {
              if (addr.words.size() < 2 || addr.words[0] != "address") continue;
              use(addr);
              auto p = Ipv4Prefix::try_parse(addr.words[1]);
              if (!p) continue;
              if (seen) {
                c.out.notes.push_back("line " + std::to_string(addr.line) + ": additional address ignored");
                continue;
              }
              seen = true;
              c.emit(Fact{"Interface", {sym(router), sym(name), Term::prefix_value(*p)}});
            }
          }
        }
      } else if (b.kind == BlockKind::RouterProcess && head == "routing-options") {
        use(top);
        if (auto* as = top.child("autonomous-system")) use(*as);
      } else if (b.kind == BlockKind::RouterProcess && head == "ospf") {
        use(top);
        for (const auto& area : top.children) {
          if (area.words.empty() || area.words[0] != "area") continue;
          use(area);
          for (const auto& itf : area.children) {
            if (itf.words.size() < 2 || itf.words[0] != "interface") continue;
            use(itf);
            std::string name = chunking::juniper_interface_name(itf.words[1]);
            c.ospf_member(name);
            if (auto* m = itf.child("metric"); m && m->words.size() >= 2 && to_int(m->words[1])) {
              use(*m);
              c.emit(Fact{"InterfaceOSPFCost", {sym(router), sym(name), num(*to_int(m->words[1]))}});
            }
          }
        }
      } else if (b.kind == BlockKind::RouterProcess && head == "bgp") {
        use(top);
        std::optional<long long> local = autonomous;
        if (auto* la = top.child("local-as"); la && la->words.size() >= 2) {
          use(*la);
          local = to_int(la->words[1]);
        }
        auto scalar = [&](const JunosNode& n, std::string_view key) -> const JunosNode* {
          auto* x = n.child(key);
          if (x && x->words.size() >= 2) use(*x);
          return x && x->words.size() >= 2 ? x : nullptr;
        };
        for (const auto& group : top.children) {
          if (group.words.empty() || group.words[0] != "group") continue;
          use(group);
          std::optional<long long> group_as = local;
          if (auto* la = scalar(group, "local-as")) group_as = to_int(la->words[1]);
          scalar(group, "type");
          auto* g_peer = scalar(group, "peer-as");
          auto* g_in = scalar(group, "import");
          auto* g_out = scalar(group, "export");
          auto* g_delay = scalar(group, "out-delay");
          for (const auto& nb : group.children) {
            if (nb.words.size() < 2 || nb.words[0] != "neighbor") continue;
            use(nb);
            auto ip = Ipv4::parse(nb.words[1]);
            if (!ip || !group_as) {
              c.out.notes.push_back("line " + std::to_string(nb.line) + ": neighbor without local AS skipped");
              continue;
            }
            Term& rec = c.neighbor(*group_as, *ip);
            auto* peer = scalar(nb, "peer-as");
            if (!peer) peer = g_peer;
            if (peer && to_int(peer->words[1])) *rec.field("remote_as") = num(*to_int(peer->words[1]));
            auto* in = scalar(nb, "import");
            if (!in) in = g_in;
            if (in) *rec.field("in") = sym(in->words[1]);
            auto* out = scalar(nb, "export");
            if (!out) out = g_out;
            if (out) *rec.field("out") = sym(out->words[1]);
            auto* delay = scalar(nb, "out-delay");
            if (!delay) delay = g_delay;
            if (delay && to_int(delay->words[1])) *rec.field("adv_interval") = num(*to_int(delay->words[1]));
          }
        }
      } else if (b.kind == BlockKind::RouteMap && head == "policy-statement" && top.words.size() >= 2) {
        use(top);
        std::vector<const JunosNode*> terms;
        for (const auto& t : top.children)
          if (t.words.size() >= 2 && t.words[0] == "term") terms.push_back(&t);
        std::vector<const JunosNode*> single;
        if (terms.empty()) single.push_back(&top);
        const auto& list = terms.empty() ? single : terms;
        for (std::size_t idx = 0; idx < list.size(); ++idx) {
          const JunosNode& term = *list[idx];
          use(term);
          RouteMapClause rm;
          rm.name = top.words[1];
          rm.seq = terms.empty() ? 10 : to_int(term.words[1]).value_or(static_cast<long long>(idx + 1) * 10);
          for (const auto& part : term.children) {
            use(part);
            if (part.words.empty()) continue;
            bool is_from = part.words[0] == "from";
            bool is_then = part.words[0] == "then";
            if (!is_from && !is_then) continue;
            // "from prefix-list X;" one-liner or "from { ... }" body
            std::vector<std::vector<std::string>> stmts;
            if (part.block) {
              for (const auto& s : part.children) {
                use(s);
                stmts.push_back(s.words);
              }
            } else {
              stmts.emplace_back(part.words.begin() + 1, part.words.end());
            }
            for (const auto& s : stmts) {
              if (s.empty()) continue;
              std::string joined = text::join(s, " ");
              if (is_from) {
                if (s[0] == "prefix-list" && s.size() >= 2)
                  rm.matches.push_back(clause("prefix_list", {{"name", sym(s[1])}}));
                else if (s[0] == "community" && s.size() >= 2)
                  rm.matches.push_back(clause("community", {{"name", sym(s[1])}}));
                else
                  rm.matches.push_back(raw_clause(joined));
              } else {
                if (s[0] == "accept") rm.access = "permit";
                else if (s[0] == "reject") rm.access = "deny";
                else if (s[0] == "local-preference" && s.size() >= 2 && to_int(s[1]))
                  rm.actions.push_back(clause("local_preference", {{"value", num(*to_int(s[1]))}}));
                else if (s[0] == "metric" && s.size() >= 2 && to_int(s[1]))
                  rm.actions.push_back(clause("metric", {{"value", num(*to_int(s[1]))}}));
                else if (s[0] == "as-path-prepend" && s.size() >= 2) {
                  std::vector<Term> asns;
                  for (std::size_t i = 1; i < s.size(); ++i)
                    for (const auto& piece : text::split_ws(s[i]))
                      if (auto v = to_int(piece)) asns.push_back(num(*v));
                  rm.actions.push_back(clause("as_path_prepend", {{"asns", Term::list(std::move(asns))}}));
                } else if (s[0] == "community" && s.size() >= 3) {
                  rm.actions.push_back(clause("community", {{"values", Term::list({sym(s[2])})}}));
                } else {
                  rm.actions.push_back(raw_clause(joined));
                }
              }
            }
          }
          c.emit(rm.fact(router));
        }
      } else if (b.kind == BlockKind::IPPrefixList && head == "prefix-list" && top.words.size() >= 2) {
        use(top);
        long long seq = 0;
        for (const auto& e : top.children) {
          use(e);
          auto p = e.words.empty() ? std::nullopt : Ipv4Prefix::try_parse(e.words[0]);
          if (!p) continue;
          seq += 10;
          prefix_list_entry(c, top.words[1], seq, "permit", *p, false, e.line);
        }
      } else if (b.kind == BlockKind::CommunityList && head == "community" && top.words.size() >= 2) {
        use(top);
        std::vector<Term> members;
        auto collect = [&](const std::vector<std::string>& w, std::size_t from) {
          for (std::size_t i = from; i < w.size(); ++i) members.push_back(sym(w[i]));
        };
        if (top.words.size() >= 3 && top.words[2] == "members") collect(top.words, 3);
        for (const auto& m : top.children)
          if (!m.words.empty() && m.words[0] == "members") {
            use(m);
            collect(m.words, 1);
          }
        c.emit(Fact{"CommunityList", {sym(router), sym(top.words[1]), sym("permit"), Term::list(std::move(members))}});
      }
    }
    for (std::size_t ln : b.lines) {
      auto t = text::trim(doc.line(ln));
      if (t.empty() || t == "}" || t.front() == '#') continue;
      if (!used_lines.count(ln)) c.skip(ln, t);
    }
  }
  return c.finish();
}

}  // namespace grammar

inline bool has_grammar(Dialect d) { return d != Dialect::Unknown; }

inline std::string extractor_tag(Dialect d) { return "grammar:" + std::string(to_string(d)); }

/// Deterministic, chunk-local extraction. Statements the grammar does not
/// recognize are skipped and listed in `skipped`.
inline Extraction extract_statements(const ConfigChunk& chunk) {
  Dialect d = chunk.dialect == Dialect::Unknown ? detect_dialect(chunk.text) : chunk.dialect;
  if (!has_grammar(d))
    throw Error(ErrorCode::GrammarUnavailable, "no grammar for the dialect of chunk " + chunk.id());
  ConfigDocument doc = ConfigDocument::from_text(chunk.router, chunk.text);
  doc.dialect = d;
  auto blocks = split_blocks(doc);
  switch (d) {
    case Dialect::CiscoIOS:
    case Dialect::Aruba: return grammar::cisco(doc, blocks, chunk.router);
    case Dialect::Huawei:
    case Dialect::H3C: return grammar::vrp(doc, blocks, chunk.router);
    case Dialect::Juniper: return grammar::juniper(doc, blocks, chunk.router);
    case Dialect::Unknown: break;
  }
  throw Error(ErrorCode::GrammarUnavailable, "no grammar for the dialect of chunk " + chunk.id());
}

inline std::vector<Fact> extract_explicit(const ConfigChunk& chunk) { return extract_statements(chunk).facts; }

/// Facts of one chunk as a base (intra-chunk merge policies applied).
inline FactBase extract_chunk_base(const ConfigChunk& chunk) {
  auto ex = extract_statements(chunk);
  Dialect d = chunk.dialect == Dialect::Unknown ? detect_dialect(chunk.text) : chunk.dialect;
  FactBase base;
  Provenance prov{chunk.router, chunk.id(), extractor_tag(d)};
  for (const auto& f : ex.facts) base.insert(f, prov);
  for (const auto& n : ex.notes) base.note(chunk.id() + " " + n);
  return base;
}

/// Whole-document extraction: chunk, extract every chunk, merge.
inline FactBase extract_document(const ConfigDocument& doc) {
  std::vector<FactBase> bases;
  for (const auto& chunk : chunk_document(doc)) bases.push_back(extract_chunk_base(chunk));
  FactBase merged = merge_fact_bases(bases);
  // A config without a hostname statement still names a router (its file).
  if (merged.with_predicate("Router").empty() && !doc.router.empty())
    merged.insert(Fact{"Router", {grammar::sym(doc.router)}}, Provenance{doc.router, doc.router + "#0", extractor_tag(doc.dialect)});
  return merged;
}

inline FactBase extract_snapshot(const ConfigSnapshot& snap) {
  std::vector<FactBase> bases;
  for (const auto& [_, doc] : snap.routers) bases.push_back(extract_document(doc));
  return merge_fact_bases(bases);
}

}  // namespace netquery
