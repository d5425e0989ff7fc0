#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "netquery/endpoint.hpp"
#include "netquery/fact.hpp"
#include "netquery/parallel.hpp"
#include "netquery/querylang/compiler.hpp"
#include "netquery/querylang/interpreter.hpp"
#include "netquery/routing.hpp"
#include "netquery/snapshot.hpp"

namespace netquery::bench {

using Json = nlohmann::json;

/// mt19937_64 output is fixed by the standard; the distributions are not,
/// so draws go through this instead of <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::uint64_t below(std::uint64_t n) { return n ? g_() % n : 0; }
  long long between(long long lo, long long hi) { return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 g_;
};

// ---------------------------------------------------------------------------
// Snapshot generation

struct GeneratorSpec {
  int routers = 8;
  double degree = 3.0;
  std::uint64_t seed = 1;
  int policies = -1;  // planted local-preference route-maps; -1: routers / 8
  int diamonds = -1;  // planted equal-cost 4-cycles; -1: max(2, routers / 10)
  std::string name;
};

struct Link {
  std::string a, b;
  std::string a_if, b_if;
  Ipv4 a_ip, b_ip;
  long long a_cost = 1, b_cost = 1;  // cost of a's / b's interface on the link
};

struct PlantedPolicy {
  std::string router;
  std::string neighbor;
  std::string destination;
  std::string route_map;
  std::string prefix_list;
  Ipv4 neighbor_ip;
  Ipv4Prefix prefix;
  long long local_preference = 200;
};

/// Ground truth for a generated snapshot.
struct EmissionLog {
  std::vector<std::string> routers;
  std::vector<Link> links;
  std::vector<PlantedPolicy> policies;
  std::vector<std::array<std::string, 4>> diamonds;  // a, b, c, d: a-b-d and a-c-d
  std::vector<Fact> facts;                           // explicit facts the configs state
  std::map<std::string, std::size_t> blocks;         // configuration blocks per router

  /// Router pairs whose traffic a planted policy steers.
  std::vector<std::pair<std::string, std::string>> policy_pairs() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& p : policies) out.emplace_back(p.router, p.destination);
    return out;
  }

  std::vector<std::pair<std::string, std::string>> diamond_pairs() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& d : diamonds) {
      out.emplace_back(d[0], d[3]);
      out.emplace_back(d[3], d[0]);
    }
    return out;
  }

  Json to_json() const {
    Json j;
    j["routers"] = routers;
    j["links"] = Json::array();
    for (const auto& l : links)
      j["links"].push_back({{"a", l.a}, {"b", l.b}, {"a_if", l.a_if}, {"b_if", l.b_if}, {"a_ip", l.a_ip.str()},
                            {"b_ip", l.b_ip.str()}, {"a_cost", l.a_cost}, {"b_cost", l.b_cost}});
    j["policies"] = Json::array();
    for (const auto& p : policies)
      j["policies"].push_back({{"router", p.router}, {"neighbor", p.neighbor}, {"destination", p.destination},
                               {"route_map", p.route_map}, {"prefix_list", p.prefix_list},
                               {"neighbor_ip", p.neighbor_ip.str()}, {"prefix", p.prefix.str()},
                               {"local_preference", p.local_preference}});
    j["diamonds"] = diamonds;
    j["blocks"] = blocks;
    j["facts"] = Json::array();
    for (const auto& f : facts) j["facts"].push_back(literal::to_string(f));
    return j;
  }

  static EmissionLog from_json(const Json& j) {
    EmissionLog log;
    log.routers = j.at("routers").get<std::vector<std::string>>();
    for (const auto& l : j.at("links"))
      log.links.push_back({l.at("a"), l.at("b"), l.at("a_if"), l.at("b_if"), *Ipv4::parse(l.at("a_ip").get<std::string>()),
                           *Ipv4::parse(l.at("b_ip").get<std::string>()), l.at("a_cost"), l.at("b_cost")});
    for (const auto& p : j.at("policies"))
      log.policies.push_back({p.at("router"), p.at("neighbor"), p.at("destination"), p.at("route_map"),
                              p.at("prefix_list"), *Ipv4::parse(p.at("neighbor_ip").get<std::string>()),
                              Ipv4Prefix::parse(p.at("prefix").get<std::string>()), p.at("local_preference")});
    log.diamonds = j.at("diamonds").get<std::vector<std::array<std::string, 4>>>();
    log.blocks = j.at("blocks").get<std::map<std::string, std::size_t>>();
    for (const auto& f : j.at("facts")) log.facts.push_back(literal::parse_fact(f.get<std::string>()));
    return log;
  }
};

struct GeneratedNetwork {
  ConfigSnapshot snapshot;
  EmissionLog log;
};

namespace detail {

struct Topology {
  std::vector<std::string> names;
  std::set<std::pair<std::size_t, std::size_t>> edges;  // (lo, hi)

  bool adjacent(std::size_t a, std::size_t b) const { return edges.count({std::min(a, b), std::max(a, b)}) > 0; }
  void connect(std::size_t a, std::size_t b) { edges.insert({std::min(a, b), std::max(a, b)}); }
};

inline Ipv4 loopback_of(std::size_t index) {
  std::size_t n = index + 1;
  return Ipv4{(172u << 24) | (16u << 16) | (static_cast<std::uint32_t>(n >> 8 & 0xff) << 8) |
              static_cast<std::uint32_t>(n & 0xff)};
}

inline Ipv4 link_address(std::size_t link_index, int host) {
  std::size_t n = link_index + 1;
  return Ipv4{(10u << 24) | (static_cast<std::uint32_t>(n >> 8 & 0xff) << 16) |
              (static_cast<std::uint32_t>(n & 0xff) << 8) | static_cast<std::uint32_t>(host)};
}

inline Topology random_topology(int routers, double degree, Rng& rng) {
  Topology t;
  for (int i = 1; i <= routers; ++i) t.names.push_back("R" + std::to_string(i));
  for (std::size_t i = 1; i < t.names.size(); ++i) t.connect(i, rng.below(i));
  std::size_t n = t.names.size();
  std::size_t max_edges = n * (n - 1) / 2;
  auto target = static_cast<std::size_t>(std::llround(static_cast<double>(n) * degree / 2.0));
  target = std::min(std::max(target, n - 1), max_edges);
  for (std::size_t attempts = 0; t.edges.size() < target && attempts < 50 * max_edges; ++attempts) {
    std::size_t a = rng.below(n), b = rng.below(n);
    if (a != b) t.connect(a, b);
  }
  return t;
}

/// Adds 4-cycles a-b-d-c whose links all cost 1, so a reaches d over two
/// equally good paths. a and d are never adjacent.
inline std::vector<std::array<std::size_t, 4>> plant_diamonds(Topology& t, int count, Rng& rng) {
  std::vector<std::array<std::size_t, 4>> out;
  std::size_t n = t.names.size();
  if (n < 4) return out;
  std::set<std::pair<std::size_t, std::size_t>> forbidden;
  std::set<std::size_t> endpoints;
  for (int made = 0, attempts = 0; made < count && attempts < 200 * count; ++attempts) {
    std::array<std::size_t, 4> q{rng.below(n), rng.below(n), rng.below(n), rng.below(n)};
    std::set<std::size_t> distinct(q.begin(), q.end());
    if (distinct.size() != 4) continue;
    auto [a, b, c, d] = q;
    if (t.adjacent(a, d) || endpoints.count(a) || endpoints.count(d)) continue;
    std::vector<std::pair<std::size_t, std::size_t>> need = {{a, b}, {a, c}, {b, d}, {c, d}};
    bool ok = true;
    for (auto [x, y] : need)
      if (forbidden.count({std::min(x, y), std::max(x, y)})) ok = false;
    if (!ok) continue;
    for (auto [x, y] : need) t.connect(x, y);
    forbidden.insert({std::min(a, d), std::max(a, d)});
    endpoints.insert(a);
    endpoints.insert(d);
    out.push_back(q);
    ++made;
  }
  return out;
}

struct RouterText {
  std::vector<std::string> interfaces;  // rendered interface blocks, lo0 first
  std::vector<std::string> ospf_networks;
  std::vector<std::string> ospf_ifaces;
  std::vector<std::pair<Ipv4, std::string>> neighbors;  // ip, out route-map ("" none)
  std::vector<std::string> prefix_lists;
  std::vector<std::string> route_maps;
};

inline std::string mask_of(int length) { return Ipv4{mask_bits(length)}.str(); }

/// Least-cost first hop from `src` toward every router (ties by index).
inline std::vector<long long> costs_from(const Topology& t, const std::map<std::pair<std::size_t, std::size_t>, long long>& cost,
                                         std::size_t src, std::size_t banned = static_cast<std::size_t>(-1)) {
  std::size_t n = t.names.size();
  std::vector<long long> dist(n, -1);
  using Item = std::pair<long long, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0;
  pq.push({0, src});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[u]) continue;
    for (std::size_t v = 0; v < n; ++v) {
      if (v == banned || !t.adjacent(u, v)) continue;
      long long nd = d + cost.at({u, v});
      if (dist[v] < 0 || nd < dist[v]) {
        dist[v] = nd;
        pq.push({nd, v});
      }
    }
  }
  return dist;
}

inline GeneratedNetwork render(const Topology& topo, const GeneratorSpec& spec, Rng& rng,
                               const std::vector<std::array<std::size_t, 4>>& diamonds) {
  GeneratedNetwork out;
  EmissionLog& log = out.log;
  std::size_t n = topo.names.size();
  log.routers = topo.names;

  std::set<std::pair<std::size_t, std::size_t>> unit_cost;
  std::set<std::size_t> diamond_ends;
  for (const auto& q : diamonds) {
    for (auto [x, y] : std::vector<std::pair<std::size_t, std::size_t>>{{q[0], q[1]}, {q[0], q[2]}, {q[1], q[3]}, {q[2], q[3]}}) {
      unit_cost.insert({x, y});
      unit_cost.insert({y, x});
    }
    diamond_ends.insert(q[0]);
    diamond_ends.insert(q[3]);
    log.diamonds.push_back({topo.names[q[0]], topo.names[q[1]], topo.names[q[2]], topo.names[q[3]]});
  }

  std::vector<RouterText> rt(n);
  std::vector<int> next_if(n, 0);
  std::map<std::pair<std::size_t, std::size_t>, long long> cost;
  std::map<std::pair<std::size_t, std::size_t>, Ipv4> peer_ip;  // (r, neighbor) -> neighbor's address on the link
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> neighbor_slot;

  for (std::size_t r = 0; r < n; ++r) {
    Ipv4 lo = loopback_of(r);
    rt[r].interfaces.push_back("interface lo0\n ip address " + lo.str() + " 255.255.255.255\n");
    rt[r].ospf_networks.push_back(" network " + lo.str() + " 0.0.0.0 area 0\n");
    rt[r].ospf_ifaces.push_back("lo0");
    log.facts.push_back(
        Fact{"Interface", {Term::symbol(topo.names[r]), Term::symbol("lo0"), Term::prefix_value(Ipv4Prefix{lo, 32})}});
  }

  std::size_t index = 0;
  for (auto [a, b] : topo.edges) {
    Link l;
    l.a = topo.names[a];
    l.b = topo.names[b];
    l.a_if = "GigabitEthernet" + std::to_string(next_if[a]++);
    l.b_if = "GigabitEthernet" + std::to_string(next_if[b]++);
    l.a_ip = link_address(index, 1);
    l.b_ip = link_address(index, 2);
    l.a_cost = unit_cost.count({a, b}) ? 1 : rng.between(1, 20);
    l.b_cost = unit_cost.count({b, a}) ? 1 : rng.between(1, 20);
    cost[{a, b}] = l.a_cost;
    cost[{b, a}] = l.b_cost;
    peer_ip[{a, b}] = l.b_ip;
    peer_ip[{b, a}] = l.a_ip;
    for (int side = 0; side < 2; ++side) {
      std::size_t r = side ? b : a;
      const std::string& ifname = side ? l.b_if : l.a_if;
      Ipv4 ip = side ? l.b_ip : l.a_ip;
      long long c = side ? l.b_cost : l.a_cost;
      rt[r].interfaces.push_back("interface " + ifname + "\n ip address " + ip.str() + " " + mask_of(24) +
                                 "\n ip ospf cost " + std::to_string(c) + "\n");
      rt[r].ospf_networks.push_back(" network " + ip.str() + " 0.0.0.0 area 0\n");
      rt[r].ospf_ifaces.push_back(ifname);
      neighbor_slot[{r, side ? a : b}] = rt[r].neighbors.size();
      rt[r].neighbors.emplace_back(side ? l.a_ip : l.b_ip, "");
      log.facts.push_back(Fact{"Interface", {Term::symbol(topo.names[r]), Term::symbol(ifname),
                                             Term::prefix_value(Ipv4Prefix{ip, 24})}});
      log.facts.push_back(Fact{"InterfaceOSPFCost",
                               {Term::symbol(topo.names[r]), Term::symbol(ifname), Term::integer_value(c)}});
    }
    log.links.push_back(l);
    ++index;
  }

  // Local-preference policies steering traffic off its IGP-best first hop.
  int want = spec.policies >= 0 ? spec.policies : static_cast<int>(n / 8);
  std::set<std::pair<std::size_t, std::size_t>> used_pairs, used_sessions;
  for (int made = 0, attempts = 0; made < want && attempts < 100 * std::max(1, want) && n >= 3; ++attempts) {
    std::size_t src = rng.below(n), dst = rng.below(n);
    if (src == dst || diamond_ends.count(dst) || used_pairs.count({src, dst})) continue;
    std::vector<std::size_t> nbrs;
    for (std::size_t v = 0; v < n; ++v)
      if (topo.adjacent(src, v) && v != dst) nbrs.push_back(v);
    if (nbrs.size() < 1) continue;
    auto dist = costs_from(topo, cost, src);
    std::size_t best_first = static_cast<std::size_t>(-1);
    long long best = -1;
    for (std::size_t v = 0; v < n; ++v) {
      if (!topo.adjacent(src, v)) continue;
      auto from_v = costs_from(topo, cost, v, src);
      if (from_v[dst] < 0) continue;
      long long total = cost[{src, v}] + from_v[dst];
      if (best < 0 || total < best) {
        best = total;
        best_first = v;
      }
    }
    std::vector<std::size_t> options;
    for (auto v : nbrs) {
      if (v == best_first || used_sessions.count({src, v})) continue;
      if (costs_from(topo, cost, v, src)[dst] >= 0) options.push_back(v);
    }
    if (options.empty()) continue;
    std::size_t via = rng.pick(options);
    PlantedPolicy p;
    p.router = topo.names[src];
    p.neighbor = topo.names[via];
    p.destination = topo.names[dst];
    p.route_map = "PREF_" + topo.names[dst];
    p.prefix_list = "DST_" + topo.names[dst];
    p.neighbor_ip = peer_ip[{src, via}];
    p.prefix = Ipv4Prefix{loopback_of(dst), 32};
    rt[src].neighbors[neighbor_slot[{src, via}]].second = p.route_map;
    rt[src].prefix_lists.push_back("ip prefix-list " + p.prefix_list + " seq 5 permit " + p.prefix.str() + "\n");
    rt[src].route_maps.push_back("route-map " + p.route_map + " permit 10\n match ip address prefix-list " +
                                 p.prefix_list + "\n set local-preference " + std::to_string(p.local_preference) +
                                 "\n!\nroute-map " + p.route_map + " permit 20\n");
    const std::string& R = p.router;
    log.facts.push_back(literal::parse_fact("IPPrefixList(" + R + ", " + p.prefix_list + ", 5, permit, " +
                                            p.prefix.str() + ")"));
    log.facts.push_back(literal::parse_fact("RouteMap(" + R + ", " + p.route_map + ", 10, permit, [prefix_list(name=" +
                                            p.prefix_list + ")], [local_preference(value=" +
                                            std::to_string(p.local_preference) + ")])"));
    log.facts.push_back(literal::parse_fact("RouteMap(" + R + ", " + p.route_map + ", 20, permit, [], [])"));
    log.policies.push_back(p);
    used_pairs.insert({src, dst});
    used_sessions.insert({src, via});
    ++made;
  }

  for (std::size_t r = 0; r < n; ++r) {
    const std::string& name = topo.names[r];
    const RouterText& t = rt[r];
    std::string cfg = "hostname " + name + "\n!\n";
    for (const auto& i : t.interfaces) cfg += i + "!\n";
    cfg += "router ospf 1\n";
    for (const auto& net : t.ospf_networks) cfg += net;
    cfg += "!\nrouter bgp 65000\n";
    for (const auto& [ip, rm] : t.neighbors) {
      cfg += " neighbor " + ip.str() + " remote-as 65000\n";
      if (!rm.empty()) cfg += " neighbor " + ip.str() + " route-map " + rm + " out\n";
    }
    cfg += "!\n";
    for (const auto& pl : t.prefix_lists) cfg += pl + "!\n";
    for (const auto& rm : t.route_maps) cfg += rm + "!\n";
    cfg += "end\n";
    out.snapshot.add_document(name, cfg, name + ".cfg");

    log.facts.push_back(Fact{"Router", {Term::symbol(name)}});
    std::vector<Term> ifaces;
    for (const auto& i : t.ospf_ifaces) ifaces.push_back(Term::symbol(i));
    log.facts.push_back(Fact{"OSPFNetwork", {Term::symbol(name), Term::list(ifaces)}});
    for (const auto& [ip, rm] : t.neighbors) {
      Term nb = make_neighbor(ip, 65000);
      if (!rm.empty()) *nb.field("out") = Term::symbol(rm);
      log.facts.push_back(Fact{"BGP", {Term::symbol(name), Term::integer_value(65000), nb}});
    }
    // hostname, interfaces, ospf, bgp, policy definitions and the closing "end"
    log.blocks[name] = 1 + t.interfaces.size() + 2 + t.prefix_lists.size() + t.route_maps.size() + 1;
  }
  std::sort(log.facts.begin(), log.facts.end());
  std::vector<std::pair<std::string, std::string>> links;
  for (const auto& l : log.links) links.emplace_back(l.a, l.b);
  out.snapshot.declared_links = links;
  out.snapshot.name = spec.name.empty() ? "gen-" + std::to_string(n) + "-" + std::to_string(spec.seed) : spec.name;
  out.snapshot.check_invariants();
  return out;
}

}  // namespace detail

inline GeneratedNetwork generate_snapshot(const GeneratorSpec& spec) {
  if (spec.routers < 2) throw Error(ErrorCode::Usage, "a generated network needs at least 2 routers");
  Rng rng(spec.seed);
  auto topo = detail::random_topology(spec.routers, spec.degree, rng);
  int diamonds = spec.diamonds >= 0 ? spec.diamonds : std::max(2, spec.routers / 10);
  auto planted = detail::plant_diamonds(topo, diamonds, rng);
  return detail::render(topo, spec, rng, planted);
}

/// Builds a snapshot over a given edge list ("A B" or "A, B" per line, '#'
/// comments; names with spaces need the comma form), e.g. one exported from Topology Zoo.
inline GeneratedNetwork snapshot_from_edges(std::string_view edge_list, GeneratorSpec spec) {
  detail::Topology topo;
  std::map<std::string, std::size_t> index;
  auto id = [&](std::string name) {
    std::replace(name.begin(), name.end(), ' ', '_');
    auto [it, fresh] = index.emplace(name, topo.names.size());
    if (fresh) topo.names.push_back(name);
    return it->second;
  };
  for (const auto& raw : text::split_lines(edge_list)) {
    std::string line(text::trim(text::strip_cr(raw)));
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> toks;
    if (line.find(',') != std::string::npos) {
      // comma-separated names may contain spaces
      std::size_t comma = line.find(',');
      toks = {std::string(text::trim(line.substr(0, comma))), std::string(text::trim(line.substr(comma + 1)))};
      if (toks[0].empty() || toks[1].empty()) toks.clear();
    } else {
      toks = text::split_ws(line);
    }
    if (toks.size() < 2) throw Error(ErrorCode::InvalidTopology, "edge line needs two routers: " + line);
    std::size_t a = id(toks[0]), b = id(toks[1]);
    if (a != b) topo.connect(a, b);
  }
  if (topo.names.size() < 2) throw Error(ErrorCode::InvalidTopology, "edge list names fewer than 2 routers");
  Rng rng(spec.seed);
  spec.routers = static_cast<int>(topo.names.size());
  int diamonds = spec.diamonds >= 0 ? spec.diamonds : 0;
  auto planted = detail::plant_diamonds(topo, diamonds, rng);
  return detail::render(topo, spec, rng, planted);
}

inline void write_generated(const GeneratedNetwork& g, const std::filesystem::path& dir) {
  write_snapshot(g.snapshot, dir);
  write_file(dir / "emission.json", g.log.to_json().dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// QA generation

struct QaItem {
  std::string question;
  std::vector<Requirement> requirements;
  bool gold = false;
  std::string snapshot_ref;

  const Requirement& requirement() const { return requirements.at(0); }
  std::string kind() const { return requirements.size() == 1 ? to_string(requirements[0].kind) : "Bundle"; }

  Json to_json() const {
    Json j;
    j["question"] = question;
    j["kind"] = kind();
    if (requirements.size() == 1) {
      j["params"] = {{"paths", requirements[0].paths}};
    } else {
      Json rs = Json::array();
      for (const auto& r : requirements) rs.push_back({{"kind", to_string(r.kind)}, {"paths", r.paths}});
      j["params"] = {{"requirements", rs}};
    }
    j["gold"] = gold;
    j["snapshot"] = snapshot_ref;
    return j;
  }

  static QaItem from_json(const Json& j) {
    QaItem item;
    item.question = j.at("question").get<std::string>();
    item.gold = j.at("gold").get<bool>();
    item.snapshot_ref = j.value("snapshot", "");
    std::string kind = j.at("kind").get<std::string>();
    const Json& params = j.at("params");
    if (kind == "Bundle") {
      for (const auto& r : params.at("requirements"))
        item.requirements.push_back({parse_kind(r.at("kind").get<std::string>()), r.at("paths"), item.gold});
    } else {
      item.requirements.push_back({parse_kind(kind), params.at("paths"), item.gold});
    }
    return item;
  }
};

inline std::string qa_jsonl(const std::vector<QaItem>& items) {
  std::string out;
  for (const auto& i : items) out += i.to_json().dump() + "\n";
  return out;
}

inline std::vector<QaItem> parse_qa_jsonl(std::string_view text_block) {
  std::vector<QaItem> out;
  for (const auto& line : text::split_lines(text_block)) {
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(QaItem::from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::Usage, std::string("bad QA line: ") + e.what());
    }
  }
  return out;
}

/// What the engine says about a set of requirements (all must hold).
inline bool engine_verdict(const Network& net, const std::vector<Requirement>& reqs, const ql::Budget& budget = {}) {
  return ql::interpret(compile_bundle(reqs), net, budget).value.truthy();
}

struct QaOptions {
  std::vector<RequirementKind> kinds = all_kinds();
  /// Router pairs tried first: planted policy pairs for OrderedPath and
  /// planted diamonds for LoadBalance.
  std::vector<std::pair<std::string, std::string>> ordered_hints;
  std::vector<std::pair<std::string, std::string>> balance_hints;
};

namespace detail {

class Sampler {
 public:
  Sampler(const Network& net, Rng& rng) : net_(net), rng_(rng), routers_(net.routers().begin(), net.routers().end()) {}

  std::pair<std::string, std::string> pair() {
    std::string a = rng_.pick(routers_), b = rng_.pick(routers_);
    while (b == a) b = rng_.pick(routers_);
    return {a, b};
  }

  std::optional<Hops> walk() {
    Hops p{rng_.pick(routers_)};
    std::size_t len = 2 + rng_.below(std::min<std::size_t>(5, routers_.size() - 1));
    while (p.size() < len) {
      std::vector<std::string> next;
      for (const auto& [v, _] : net_.neighbors(p.back()))
        if (std::find(p.begin(), p.end(), v) == p.end()) next.push_back(v);
      if (next.empty()) break;
      p.push_back(rng_.pick(next));
    }
    if (p.size() < 2) return std::nullopt;
    return p;
  }

  std::optional<Hops> best(const std::string& a, const std::string& b) {
    try {
      return trace_route(net_, a, b).hops;
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  /// A permitted path a -> b that loses to `winner`.
  std::optional<Hops> worse(const std::string& a, const std::string& b, const Hops& winner) {
    auto ranked = ranked_routes(net_, a, b);
    if (ranked.empty()) return std::nullopt;
    std::vector<Hops> losers;
    for (const auto& r : ranked)
      if (r.path.hops != winner && !same_preference(r.attrs, ranked.front().attrs)) losers.push_back(r.path.hops);
    if (losers.empty()) return std::nullopt;
    std::size_t window = std::min<std::size_t>(losers.size(), 4);
    return losers[rng_.below(window)];
  }

  std::optional<Requirement> exist_positive() {
    auto p = walk();
    if (!p) return std::nullopt;
    return Requirement{RequirementKind::ExistPath, {*p}, true};
  }

  std::optional<Requirement> ordered_positive(std::optional<std::pair<std::string, std::string>> hint) {
    auto [a, b] = hint ? *hint : pair();
    auto p1 = best(a, b);
    if (!p1) return std::nullopt;
    auto p2 = worse(a, b, *p1);
    if (!p2) return std::nullopt;
    return Requirement{RequirementKind::OrderedPath, {*p1, *p2}, true};
  }

  std::optional<Requirement> balance_positive(std::optional<std::pair<std::string, std::string>> hint) {
    auto [a, b] = hint ? *hint : pair();
    std::vector<RoutePath> eq;
    try {
      eq = equal_best_paths(net_, a, b);
    } catch (const Error&) {
      return std::nullopt;
    }
    if (eq.size() < 2) return std::nullopt;
    std::size_t i = rng_.below(eq.size()), j = rng_.below(eq.size() - 1);
    if (j >= i) ++j;
    return Requirement{RequirementKind::LoadBalance, {eq[i].hops, eq[j].hops}, true};
  }

  std::optional<Requirement> kconnected_positive() {
    auto [a, b] = pair();
    auto p1 = routing_detail_dijkstra(a, b, {}, {});
    if (!p1) return std::nullopt;
    std::set<std::string> interior(p1->begin() + 1, p1->end() - 1);
    std::set<std::pair<std::string, std::string>> banned_edges;
    if (p1->size() == 2) banned_edges.insert({a, b});
    auto p2 = routing_detail_dijkstra(a, b, interior, banned_edges);
    if (!p2) return std::nullopt;
    return Requirement{RequirementKind::KConnected, {*p1, *p2}, true};
  }

  std::optional<Requirement> negative(const Requirement& pos) {
    Requirement r = pos;
    r.positive = false;
    switch (pos.kind) {
      case RequirementKind::ExistPath: {
        Hops p = pos.paths[0];
        // swap one hop for a router not adjacent to its predecessor
        std::size_t i = 1 + rng_.below(p.size() - 1);
        std::vector<std::string> options;
        for (const auto& v : routers_)
          if (std::find(p.begin(), p.end(), v) == p.end() && !net_.edge_cost(p[i - 1], v)) options.push_back(v);
        if (!options.empty()) {
          p[i] = rng_.pick(options);
        } else {
          p.push_back(p.front());  // broken chain: revisits the source
        }
        r.paths = {p};
        return r;
      }
      case RequirementKind::OrderedPath:
        std::swap(r.paths[0], r.paths[1]);
        return r;
      case RequirementKind::LoadBalance: {
        auto [a, b] = pair();
        auto p1 = best(a, b);
        if (!p1) return std::nullopt;
        auto p2 = worse(a, b, *p1);
        if (!p2) return std::nullopt;
        r.paths = rng_.below(2) ? std::vector<Hops>{*p1, *p2} : std::vector<Hops>{*p2, *p1};
        return r;
      }
      case RequirementKind::KConnected: {
        const Hops& p1 = pos.paths[0];
        if (p1.size() > 2) {
          // route the second path through one of the first path's middle hops
          std::string mid = p1[1 + rng_.below(p1.size() - 2)];
          auto head = routing_detail_dijkstra(p1.front(), mid, {p1.back()}, {});
          if (head) {
            std::set<std::string> avoid(head->begin(), head->end() - 1);
            auto tail = routing_detail_dijkstra(mid, p1.back(), avoid, {});
            if (tail) {
              Hops p2 = *head;
              p2.insert(p2.end(), tail->begin() + 1, tail->end());
              if (p2 != p1) {
                r.paths = {p1, p2};
                return r;
              }
            }
          }
        }
        r.paths = {p1, p1};
        return r;
      }
    }
    return std::nullopt;
  }

 private:
  std::optional<Hops> routing_detail_dijkstra(const std::string& a, const std::string& b,
                                              const std::set<std::string>& banned,
                                              const std::set<std::pair<std::string, std::string>>& banned_edges) {
    auto p = netquery::detail::dijkstra(net_, a, b, banned, banned_edges);
    if (!p) return std::nullopt;
    return p->hops;
  }

  const Network& net_;
  Rng& rng_;
  std::vector<std::string> routers_;
};

}  // namespace detail

/// Engine-verified questions: `per_kind` positives and `per_kind` negatives
/// for each requested kind.
inline std::vector<QaItem> generate_qa(const Network& net, const std::string& snapshot_ref, int per_kind,
                                       std::uint64_t seed, const QaOptions& opts = {}) {
  std::vector<QaItem> items;
  if (per_kind <= 0) return items;
  if (net.routers().size() < 2) throw Error(ErrorCode::InsufficientRequirements, "need at least 2 routers");
  Rng rng(seed);
  detail::Sampler sampler(net, rng);
  std::set<std::pair<int, std::vector<Hops>>> seen;

  for (auto kind : opts.kinds) {
    auto templates = templates_for(kind);
    auto emit = [&](const Requirement& r) {
      QaItem item;
      item.requirements = {r};
      item.gold = r.positive;
      item.snapshot_ref = snapshot_ref;
      item.question = render_question(rng.pick(templates), r);
      items.push_back(std::move(item));
    };
    const auto& hints = kind == RequirementKind::OrderedPath   ? opts.ordered_hints
                        : kind == RequirementKind::LoadBalance ? opts.balance_hints
                                                               : std::vector<std::pair<std::string, std::string>>{};
    std::size_t hint_at = 0;
    int positives = 0, negatives = 0;
    int budget = 200 * per_kind + 50 * static_cast<int>(hints.size());
    std::vector<Requirement> pool;
    for (int attempt = 0; positives < per_kind && attempt < budget; ++attempt) {
      std::optional<std::pair<std::string, std::string>> hint;
      if (hint_at < hints.size()) hint = hints[hint_at++];
      std::optional<Requirement> r;
      switch (kind) {
        case RequirementKind::ExistPath: r = sampler.exist_positive(); break;
        case RequirementKind::OrderedPath: r = sampler.ordered_positive(hint); break;
        case RequirementKind::LoadBalance: r = sampler.balance_positive(hint); break;
        case RequirementKind::KConnected: r = sampler.kconnected_positive(); break;
      }
      if (!r || !seen.insert({static_cast<int>(kind), r->paths}).second) continue;
      if (!engine_verdict(net, {*r})) continue;
      pool.push_back(*r);
      emit(*r);
      ++positives;
    }
    if (positives < per_kind)
      throw Error(ErrorCode::InsufficientRequirements, "found only " + std::to_string(positives) + " of " +
                                                           std::to_string(per_kind) + " " + to_string(kind) +
                                                           " positives");
    for (int attempt = 0; negatives < per_kind && attempt < budget; ++attempt) {
      auto r = sampler.negative(pool[static_cast<std::size_t>(attempt) % pool.size()]);
      if (!r || !seen.insert({static_cast<int>(kind), r->paths}).second) continue;
      if (engine_verdict(net, {*r})) continue;
      emit(*r);
      ++negatives;
    }
    if (negatives < per_kind)
      throw Error(ErrorCode::InsufficientRequirements, "found only " + std::to_string(negatives) + " of " +
                                                           std::to_string(per_kind) + " " + to_string(kind) +
                                                           " negatives");
  }
  return items;
}

/// Groups items into multi-question bundles of `size` (last one may be
/// shorter). A bundle is true only when all its questions are.
inline std::vector<QaItem> bundle(std::vector<QaItem> items, std::size_t size, std::uint64_t seed) {
  if (size <= 1) return items;
  Rng rng(seed);
  rng.shuffle(items);
  std::vector<QaItem> out;
  for (std::size_t i = 0; i < items.size(); i += size) {
    QaItem b;
    b.gold = true;
    b.snapshot_ref = items[i].snapshot_ref;
    for (std::size_t j = i; j < std::min(items.size(), i + size); ++j) {
      b.question += "(" + std::to_string(j - i + 1) + ") " + items[j].question + "\n";
      b.requirements.insert(b.requirements.end(), items[j].requirements.begin(), items[j].requirements.end());
      b.gold = b.gold && items[j].gold;
    }
    out.push_back(std::move(b));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

struct LatencyStats {
  double mean_ms = 0;
  double p50_ms = 0;
  double p95_ms = 0;
};

struct Confusion {
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  long long total() const { return tp + fp + tn + fn; }
};

struct EvalReport {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  LatencyStats latency;
  Confusion confusion;
  std::vector<std::string> diagnostics;

  Json to_json() const {
    return {{"precision", precision},
            {"recall", recall},
            {"f1", f1},
            {"latency_ms", {{"mean", latency.mean_ms}, {"p50", latency.p50_ms}, {"p95", latency.p95_ms}}},
            {"confusion", {{"tp", confusion.tp}, {"fp", confusion.fp}, {"tn", confusion.tn}, {"fn", confusion.fn}}},
            {"diagnostics", diagnostics}};
  }
};

inline double ratio(long long num, long long den) { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

inline double f1_score(double p, double r) { return p + r == 0 ? 0.0 : 2 * p * r / (p + r); }

/// Nearest-rank percentile of an ascending sample.
inline double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0;
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

using Answerer = std::function<bool(const QaItem&)>;

inline EvalReport evaluate(const std::vector<QaItem>& items, const Answerer& answerer, int concurrency = 1) {
  if (items.empty()) throw Error(ErrorCode::Usage, "nothing to evaluate");
  std::vector<int> verdict(items.size(), -1);  // -1: answerer failed
  std::vector<double> latency(items.size(), 0);
  std::vector<std::string> errors(items.size());
  bounded_parallel(items.size(), concurrency, [&](std::size_t i) {
    auto t0 = std::chrono::steady_clock::now();
    try {
      verdict[i] = answerer(items[i]) ? 1 : 0;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
    latency[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });
  EvalReport rep;
  for (std::size_t i = 0; i < items.size(); ++i) {
    bool gold = items[i].gold;
    bool said = verdict[i] < 0 ? !gold : verdict[i] == 1;  // a failure counts as wrong
    if (verdict[i] < 0) rep.diagnostics.push_back("item " + std::to_string(i) + ": " + errors[i]);
    if (said && gold) ++rep.confusion.tp;
    else if (said && !gold) ++rep.confusion.fp;
    else if (!said && !gold) ++rep.confusion.tn;
    else ++rep.confusion.fn;
  }
  rep.precision = ratio(rep.confusion.tp, rep.confusion.tp + rep.confusion.fp);
  rep.recall = ratio(rep.confusion.tp, rep.confusion.tp + rep.confusion.fn);
  rep.f1 = f1_score(rep.precision, rep.recall);
  std::vector<double> sorted = latency;
  std::sort(sorted.begin(), sorted.end());
  rep.latency.mean_ms = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  rep.latency.p50_ms = percentile(sorted, 0.50);
  rep.latency.p95_ms = percentile(sorted, 0.95);
  return rep;
}

// ---------------------------------------------------------------------------
// Baselines wired to an inference endpoint

/// Reads a yes/no verdict from free text: the first of true/yes/false/no.
inline bool parse_verdict(const std::string& completion) {
  static const std::regex word(R"(\b(true|yes|false|no)\b)", std::regex::icase);
  std::smatch m;
  if (!std::regex_search(completion, m, word))
    throw Error(ErrorCode::MalformedResponse, "no yes/no verdict in the completion");
  std::string w = text::lower(m[1].str());
  return w == "true" || w == "yes";
}

inline std::string all_configs(const ConfigSnapshot& snap) {
  std::string out;
  for (const auto& [name, doc] : snap.routers) out += "=== " + name + " ===\n" + doc.raw_text + "\n";
  return out;
}

/// Whole snapshot plus question in one prompt.
inline Answerer direct_prompt_baseline(CompletionClient& client, const ConfigSnapshot& snap) {
  std::string prompt = read_data_file("prompts/baseline_answer.txt");
  std::string configs = all_configs(snap);
  return [&client, prompt, configs](const QaItem& item) {
    return parse_verdict(client.complete(prompt, configs + "\nQuestion:\n" + item.question));
  };
}

/// Fixed-length chunks ranked by how many question tokens they contain.
inline Answerer chunk_retrieval_baseline(CompletionClient& client, const ConfigSnapshot& snap,
                                         std::size_t chunk_chars = 1200, std::size_t top_k = 4) {
  std::string prompt = read_data_file("prompts/baseline_answer.txt");
  std::vector<std::string> chunks;
  std::string all = all_configs(snap);
  for (std::size_t i = 0; i < all.size(); i += chunk_chars) chunks.push_back(all.substr(i, chunk_chars));
  return [&client, prompt, chunks, top_k](const QaItem& item) {
    static const std::regex token(R"([A-Za-z0-9_./-]+)");
    std::set<std::string> words;
    for (auto it = std::sregex_iterator(item.question.begin(), item.question.end(), token); it != std::sregex_iterator();
         ++it)
      if (it->length() > 1) words.insert(it->str());
    std::vector<std::pair<long, std::size_t>> scored;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      long score = 0;
      for (const auto& w : words)
        if (text::contains_token(chunks[i], w)) ++score;
      scored.emplace_back(-score, i);
    }
    std::sort(scored.begin(), scored.end());
    std::string context;
    for (std::size_t k = 0; k < std::min(top_k, scored.size()); ++k) context += chunks[scored[k].second] + "\n";
    return parse_verdict(client.complete(prompt, context + "\nQuestion:\n" + item.question));
  };
}

}  // namespace netquery::bench
