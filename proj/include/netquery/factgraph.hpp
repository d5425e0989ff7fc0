#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "netquery/deducer.hpp"
#include "netquery/fact.hpp"

namespace netquery {

using Json = nlohmann::json;

struct FactNode {
  std::string id;    // canonical key, e.g. "Interface(R1, lo0)"
  std::string kind;  // Router, Interface, SubNet, RouteMap, IPPrefixList, CommunityList
  Json attrs = Json::object();
};

struct FactEdge {
  std::string src;
  std::string label;
  std::string dst;
  std::string key;  // discriminator for parallel edges with one label ("" when unique)
  Json attrs = Json::object();

  auto id() const { return std::tie(src, label, dst, key); }
};

namespace graph_labels {
inline constexpr const char* has_interface = "has-interface";
inline constexpr const char* in_subnet = "in-subnet";
inline constexpr const char* route_edge = "route-edge";
inline constexpr const char* bgp_peer = "bgp-peer";
inline constexpr const char* uses_route_map = "uses-route-map";
inline constexpr const char* uses_prefix_list = "uses-prefix-list";
inline constexpr const char* uses_community_list = "uses-community-list";
inline constexpr const char* ospf_member = "ospf-member";
}  // namespace graph_labels

class FactGraph {
 public:
  using EdgeKey = std::tuple<std::string, std::string, std::string, std::string>;

  static std::string router_id(const std::string& r) { return "Router(" + r + ")"; }
  static std::string interface_id(const std::string& r, const std::string& i) { return "Interface(" + r + ", " + i + ")"; }
  static std::string subnet_id(const Ipv4Prefix& p) { return "SubNet(" + p.str() + ")"; }
  static std::string route_map_id(const std::string& r, const std::string& n) { return "RouteMap(" + r + ", " + n + ")"; }
  static std::string prefix_list_id(const std::string& r, const std::string& n) {
    return "IPPrefixList(" + r + ", " + n + ")";
  }
  static std::string community_list_id(const std::string& r, const std::string& n) {
    return "CommunityList(" + r + ", " + n + ")";
  }

  FactNode& add_node(const std::string& id, const std::string& kind) {
    auto [it, inserted] = nodes_.try_emplace(id);
    if (inserted) {
      it->second.id = id;
      it->second.kind = kind;
    }
    if (kind == "Router") router_index_[it->second.attrs.value("name", id.substr(7, id.size() - 8))] = id;
    return it->second;
  }

  FactEdge& add_edge(const std::string& src, const std::string& label, const std::string& dst,
                     const std::string& key = {}) {
    auto [it, inserted] = edges_.try_emplace(EdgeKey{src, label, dst, key});
    if (inserted) it->second = FactEdge{src, label, dst, key, Json::object()};
    return it->second;
  }

  bool has_node(const std::string& id) const { return nodes_.count(id) > 0; }
  const FactNode* node(const std::string& id) const {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
  }
  const std::map<std::string, FactNode>& nodes() const { return nodes_; }
  const std::map<EdgeKey, FactEdge>& edges() const { return edges_; }
  const std::map<std::string, std::string>& router_index() const { return router_index_; }

  std::vector<const FactEdge*> edges_from(const std::string& src, std::string_view label) const {
    std::vector<const FactEdge*> out;
    for (auto it = edges_.lower_bound(EdgeKey{src, "", "", ""}); it != edges_.end() && std::get<0>(it->first) == src;
         ++it)
      if (it->second.label == label) out.push_back(&it->second);
    return out;
  }

  void remove_node(const std::string& id) {
    nodes_.erase(id);
    for (auto it = edges_.begin(); it != edges_.end();) {
      if (it->second.src == id || it->second.dst == id) it = edges_.erase(it);
      else ++it;
    }
    for (auto it = router_index_.begin(); it != router_index_.end();) {
      if (it->second == id) it = router_index_.erase(it);
      else ++it;
    }
  }

  void remove_edge(const EdgeKey& k) { edges_.erase(k); }
  FactEdge* find_edge(const EdgeKey& k) {
    auto it = edges_.find(k);
    return it == edges_.end() ? nullptr : &it->second;
  }
  FactNode* find_node(const std::string& id) {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
  }

  std::vector<std::string> diagnostics;

 private:
  std::map<std::string, FactNode> nodes_;
  std::map<EdgeKey, FactEdge> edges_;
  std::map<std::string, std::string> router_index_;
};

/// JSON form of a fact argument: records become objects with a "kind" field.
inline Json term_json(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Null: return nullptr;
    case Term::Kind::Int: return t.integer;
    case Term::Kind::Symbol:
    case Term::Kind::Var: return t.text;
    case Term::Kind::Ip: return t.ip.str();
    case Term::Kind::Prefix: return t.prefix.str();
    case Term::Kind::List: {
      Json a = Json::array();
      for (const auto& i : t.items) a.push_back(term_json(i));
      return a;
    }
    case Term::Kind::Record: {
      Json o = Json::object();
      o["kind"] = t.text;
      for (std::size_t i = 0; i < t.keys.size(); ++i) o[t.keys[i]] = term_json(t.items[i]);
      return o;
    }
  }
  return nullptr;
}

/// Builds the fact graph. References to route-maps, prefix-lists or
/// community-lists without a definition are reported in `diagnostics` and
/// their edges omitted.
inline FactGraph build_graph(const DeducedBase& base, long long default_cost = 1) {
  namespace L = graph_labels;
  FactGraph g;
  const FactBase& fb = base.all;

  auto router = [&](const std::string& r) -> FactNode& {
    FactNode& n = g.add_node(FactGraph::router_id(r), "Router");
    n.attrs["name"] = r;
    return n;
  };
  for (const auto& f : fb.with_predicate("Router")) router(f.args[0].text);

  std::map<std::string, std::string> address_owner;  // interface address -> router
  for (const auto& f : fb.with_predicate("Interface")) {
    const std::string& r = f.args[0].text;
    const std::string& i = f.args[1].text;
    router(r);
    FactNode& n = g.add_node(FactGraph::interface_id(r, i), "Interface");
    n.attrs["router"] = r;
    n.attrs["name"] = i;
    n.attrs["address"] = f.args[2].prefix.str();
    g.add_edge(FactGraph::router_id(r), L::has_interface, n.id);
    Ipv4Prefix net = f.args[2].prefix.network();
    FactNode& s = g.add_node(FactGraph::subnet_id(net), "SubNet");
    s.attrs["prefix"] = net.str();
    g.add_edge(FactGraph::router_id(r), L::in_subnet, s.id, i).attrs["interface"] = i;
    address_owner[f.args[2].prefix.address.str()] = r;
  }
  for (const auto& f : fb.with_predicate("InterfaceOSPFCost")) {
    if (FactNode* n = g.find_node(FactGraph::interface_id(f.args[0].text, f.args[1].text)))
      n->attrs["ospf_cost"] = f.args[2].integer;
  }
  for (const auto& f : fb.with_predicate("OSPFNetwork")) {
    const std::string& r = f.args[0].text;
    router(r);
    for (const auto& m : f.args[1].items) {
      std::string iid = FactGraph::interface_id(r, m.text);
      if (!g.has_node(iid)) {
        g.diagnostics.push_back("DanglingReference: OSPF network on " + r + " names interface " + m.text +
                                " without an address");
        continue;
      }
      g.add_edge(FactGraph::router_id(r), L::ospf_member, iid);
    }
  }

  std::map<std::pair<std::string, std::string>, long long> cost;
  for (const auto& f : fb.with_predicate("OSPFCost")) cost[{f.args[0].text, f.args[1].text}] = f.args[2].integer;
  for (const auto& f : fb.with_predicate("RouteEdge")) {
    const std::string& a = f.args[0].text;
    const std::string& b = f.args[1].text;
    router(a);
    router(b);
    auto it = cost.find({a, b});
    g.add_edge(FactGraph::router_id(a), L::route_edge, FactGraph::router_id(b)).attrs["cost"] =
        it == cost.end() ? default_cost : it->second;
  }
  std::set<std::pair<std::string, std::string>> peers;
  for (const auto& f : fb.with_predicate("BGPPeer")) {
    router(f.args[0].text);
    router(f.args[1].text);
    g.add_edge(FactGraph::router_id(f.args[0].text), L::bgp_peer, FactGraph::router_id(f.args[1].text));
    peers.emplace(f.args[0].text, f.args[1].text);
  }

  // Policy objects.
  std::map<std::pair<std::string, std::string>, Json> prefix_lists, community_lists, route_maps;
  for (const auto& f : fb.with_predicate("IPPrefixList")) {
    auto& entries = prefix_lists[{f.args[0].text, f.args[1].text}];
    entries.push_back({{"seq", f.args[2].integer}, {"access", f.args[3].text}, {"prefix", f.args[4].prefix.str()}});
  }
  for (const auto& f : fb.with_predicate("CommunityList")) {
    auto& entries = community_lists[{f.args[0].text, f.args[1].text}];
    entries.push_back({{"access", f.args[2].text}, {"members", term_json(f.args[3])}});
  }
  for (const auto& f : fb.with_predicate("RouteMap")) {
    auto& clauses = route_maps[{f.args[0].text, f.args[1].text}];
    clauses.push_back({{"seq", f.args[2].integer},
                       {"access", f.args[3].text},
                       {"match", term_json(f.args[4])},
                       {"actions", term_json(f.args[5])}});
  }
  auto by_seq = [](Json& arr) {
    std::stable_sort(arr.begin(), arr.end(), [](const Json& a, const Json& b) {
      return a.value("seq", 0LL) < b.value("seq", 0LL);
    });
  };
  for (auto& [k, entries] : prefix_lists) {
    by_seq(entries);
    FactNode& n = g.add_node(FactGraph::prefix_list_id(k.first, k.second), "IPPrefixList");
    n.attrs = {{"router", k.first}, {"name", k.second}, {"entries", entries}};
  }
  for (auto& [k, entries] : community_lists) {
    FactNode& n = g.add_node(FactGraph::community_list_id(k.first, k.second), "CommunityList");
    n.attrs = {{"router", k.first}, {"name", k.second}, {"entries", entries}};
  }
  for (auto& [k, clauses] : route_maps) {
    by_seq(clauses);
    FactNode& n = g.add_node(FactGraph::route_map_id(k.first, k.second), "RouteMap");
    n.attrs = {{"router", k.first}, {"name", k.second}, {"clauses", clauses}};
    for (const auto& c : clauses) {
      for (const auto& m : c["match"]) {
        std::string kind = m.value("kind", "");
        if (kind != "prefix_list" && kind != "community") continue;
        std::string name = m.value("name", "");
        std::string target = kind == "prefix_list" ? FactGraph::prefix_list_id(k.first, name)
                                                   : FactGraph::community_list_id(k.first, name);
        if (!g.has_node(target)) {
          g.diagnostics.push_back("DanglingReference: route-map " + k.second + " on " + k.first + " uses undefined " +
                                  (kind == "prefix_list" ? "prefix-list " : "community-list ") + name);
          continue;
        }
        g.add_edge(n.id, kind == "prefix_list" ? L::uses_prefix_list : L::uses_community_list, target);
      }
    }
  }

  // BGP neighbors: router attributes plus policy edges.
  for (const auto& f : fb.with_predicate("BGP")) {
    const std::string& r = f.args[0].text;
    FactNode& rn = router(r);
    rn.attrs["asn"] = f.args[1].integer;
    const Term& nb = f.args[2];
    std::string ip = nb.field("ip")->ip.str();
    Json nj = term_json(nb);
    nj.erase("kind");
    std::string peer;
    if (auto it = address_owner.find(ip); it != address_owner.end() && it->second != r) peer = it->second;
    nj["peer"] = peer.empty() ? Json(nullptr) : Json(peer);
    if (!rn.attrs.contains("neighbors")) rn.attrs["neighbors"] = Json::array();
    rn.attrs["neighbors"].push_back(nj);
    for (const char* dir : {"in", "out"}) {
      const Term* pol = nb.field(dir);
      if (!pol || pol->is_null()) continue;
      std::string target = FactGraph::route_map_id(r, pol->text);
      if (!g.has_node(target)) {
        g.diagnostics.push_back("DanglingReference: BGP neighbor " + ip + " on " + r + " uses undefined route-map " +
                                pol->text);
        continue;
      }
      FactEdge& e = g.add_edge(rn.id, L::uses_route_map, target, std::string(dir) + " " + ip);
      e.attrs = {{"direction", dir}, {"neighbor", ip}, {"peer", peer.empty() ? Json(nullptr) : Json(peer)}};
    }
  }
  for (const auto& [name, id] : g.router_index()) {
    (void)name;
    Json& attrs = g.find_node(id)->attrs;
    if (attrs.contains("neighbors"))
      std::sort(attrs["neighbors"].begin(), attrs["neighbors"].end(),
                [](const Json& a, const Json& b) { return a["ip"] < b["ip"]; });
  }
  return g;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string export_jsonl(const FactGraph& g) {
  std::string out;
  for (const auto& [id, n] : g.nodes())
    out += Json{{"type", "node"}, {"id", id}, {"kind", n.kind}, {"attrs", n.attrs}}.dump() + "\n";
  for (const auto& [k, e] : g.edges())
    out += Json{{"type", "edge"}, {"src", e.src}, {"label", e.label}, {"dst", e.dst}, {"key", e.key}, {"attrs", e.attrs}}
               .dump() +
           "\n";
  return out;
}

inline FactGraph import_jsonl(std::string_view text) {
  FactGraph g;
  std::size_t n = 0;
  for (const auto& raw : text::split_lines(text)) {
    ++n;
    auto line = text::trim(raw);
    if (line.empty()) continue;
    try {
      Json j = Json::parse(line);
      std::string type = j.at("type").get<std::string>();
      if (type == "node") {
        FactNode& node = g.add_node(j.at("id").get<std::string>(), j.at("kind").get<std::string>());
        node.attrs = j.value("attrs", Json::object());
      } else if (type == "edge") {
        FactEdge& e = g.add_edge(j.at("src").get<std::string>(), j.at("label").get<std::string>(),
                                 j.at("dst").get<std::string>(), j.value("key", std::string()));
        e.attrs = j.value("attrs", Json::object());
      } else {
        throw Error(ErrorCode::GraphFormat, "line " + std::to_string(n) + ": unknown record type '" + type + "'");
      }
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::GraphFormat, "line " + std::to_string(n) + ": " + e.what());
    }
  }
  return g;
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string export_dot(const FactGraph& g) {
  std::ostringstream os;
  os << "digraph facts {\n  rankdir=LR;\n";
  for (const auto& [id, n] : g.nodes()) {
    std::string shape = n.kind == "Router" ? "box" : n.kind == "SubNet" ? "ellipse" : "note";
    os << "  \"" << dot_escape(id) << "\" [shape=" << shape << "];\n";
  }
  for (const auto& [k, e] : g.edges()) {
    std::string label = e.label;
    if (e.attrs.contains("cost")) label += " " + e.attrs["cost"].dump();
    if (e.attrs.contains("direction")) label += " " + e.attrs["direction"].get<std::string>();
    os << "  \"" << dot_escape(e.src) << "\" -> \"" << dot_escape(e.dst) << "\" [label=\"" << dot_escape(label)
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Graph Match Ratio

struct GmrReport {
  std::size_t matched_nodes = 0;
  std::size_t matched_edges = 0;
  std::size_t reference_size = 0;
  double gmr = 0.0;
  std::vector<std::string> unmatched;  // reference elements without an equal candidate
};

/// Nodes map by canonical key; a node counts when kind and every attribute
/// agree, an edge when the reference has the same (src, label, dst, key)
/// with equal attributes.
inline GmrReport compute_gmr(const FactGraph& candidate, const FactGraph& reference) {
  GmrReport r;
  r.reference_size = reference.nodes().size() + reference.edges().size();
  if (r.reference_size == 0) throw Error(ErrorCode::EmptyReference, "reference graph has no nodes or edges");
  for (const auto& [id, n] : reference.nodes()) {
    const FactNode* c = candidate.node(id);
    if (c && c->kind == n.kind && c->attrs == n.attrs) ++r.matched_nodes;
    else r.unmatched.push_back("node " + id);
  }
  for (const auto& [k, e] : reference.edges()) {
    auto it = candidate.edges().find(k);
    if (it != candidate.edges().end() && it->second.attrs == e.attrs) ++r.matched_edges;
    else r.unmatched.push_back("edge " + e.src + " -" + e.label + "-> " + e.dst + (e.key.empty() ? "" : " [" + e.key + "]"));
  }
  r.gmr = static_cast<double>(r.matched_nodes + r.matched_edges) / static_cast<double>(r.reference_size);
  return r;
}

}  // namespace netquery
