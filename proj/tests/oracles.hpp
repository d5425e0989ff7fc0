#pragma once
// Brute-force reference implementations used by the tests. They work from
// link tables (the generator's emission log or hand-written ones) and never
// call into the engine's routing or deduction code.

#include <algorithm>
#include <cstdio>
#include <functional>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "netquery/bench.hpp"

namespace oracle {

using Hops = std::vector<std::string>;

inline std::filesystem::path source_dir() { return NETQUERY_SOURCE_DIR; }
inline std::filesystem::path corpus_dir() { return source_dir() / "corpus"; }

/// A network described only by directed link costs and local-preference
/// overrides: (from, to, destination) -> value applied on that hop.
struct Net {
  std::set<std::string> routers;
  std::map<std::pair<std::string, std::string>, long long> cost;  // directed
  std::map<std::tuple<std::string, std::string, std::string>, long long> lp;

  void link(const std::string& a, const std::string& b, long long ab, long long ba) {
    routers.insert(a);
    routers.insert(b);
    cost[{a, b}] = ab;
    cost[{b, a}] = ba;
  }

  static Net from_log(const netquery::bench::EmissionLog& log) {
    Net n;
    for (const auto& r : log.routers) n.routers.insert(r);
    for (const auto& l : log.links) n.link(l.a, l.b, l.a_cost, l.b_cost);
    for (const auto& p : log.policies) n.lp[{p.router, p.neighbor, p.destination}] = p.local_preference;
    return n;
  }

  bool adjacent(const std::string& a, const std::string& b) const { return cost.count({a, b}) > 0; }

  bool simple_chain(const Hops& h) const {
    if (h.size() < 2) return false;
    if (std::set<std::string>(h.begin(), h.end()).size() != h.size()) return false;
    for (std::size_t i = 0; i + 1 < h.size(); ++i)
      if (!adjacent(h[i], h[i + 1])) return false;
    return true;
  }

  std::optional<long long> weight(const Hops& h) const {
    long long w = 0;
    for (std::size_t i = 0; i + 1 < h.size(); ++i) {
      auto it = cost.find({h[i], h[i + 1]});
      if (it == cost.end()) return std::nullopt;
      w += it->second;
    }
    return w;
  }

  long long local_pref(const Hops& h) const {
    long long v = 100;
    for (std::size_t i = 0; i + 1 < h.size(); ++i)
      if (auto it = lp.find({h[i], h[i + 1], h.back()}); it != lp.end()) v = it->second;
    return v;
  }

  /// Every simple path a -> b, in lexicographic order.
  std::vector<Hops> all_paths(const std::string& a, const std::string& b) const {
    std::vector<Hops> out;
    Hops cur{a};
    std::set<std::string> on{a};
    std::function<void()> go = [&] {
      if (cur.back() == b) {
        out.push_back(cur);
        return;
      }
      for (const auto& r : routers) {
        if (on.count(r) || !adjacent(cur.back(), r)) continue;
        cur.push_back(r);
        on.insert(r);
        go();
        on.erase(r);
        cur.pop_back();
      }
    };
    if (a != b) go();
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Least total cost, ties broken by hop sequence.
  std::optional<Hops> shortest(const std::string& a, const std::string& b) const {
    std::optional<Hops> best;
    long long best_w = 0;
    for (const auto& p : all_paths(a, b)) {
      long long w = *weight(p);
      if (!best || w < best_w || (w == best_w && p < *best)) {
        best = p;
        best_w = w;
      }
    }
    return best;
  }

  /// Highest local preference, then least cost, then hop sequence.
  std::optional<Hops> trace(const std::string& a, const std::string& b) const {
    std::optional<Hops> best;
    std::tuple<long long, long long> key{};
    for (const auto& p : all_paths(a, b)) {
      std::tuple<long long, long long> k{-local_pref(p), *weight(p)};
      if (!best || k < key || (k == key && p < *best)) {
        best = p;
        key = k;
      }
    }
    return best;
  }

  std::vector<Hops> equal_best(const std::string& a, const std::string& b) const {
    auto t = trace(a, b);
    std::vector<Hops> out;
    if (!t) return out;
    for (const auto& p : all_paths(a, b))
      if (local_pref(p) == local_pref(*t) && *weight(p) == *weight(*t)) out.push_back(p);
    return out;
  }
};

/// "a.b.c.d/len" -> (network bits, len), parsed without the engine's helpers.
inline std::optional<std::pair<unsigned long, int>> subnet(const std::string& text) {
  unsigned a, b, c, d;
  int len;
  if (std::sscanf(text.c_str(), "%u.%u.%u.%u/%d", &a, &b, &c, &d, &len) != 5) return std::nullopt;
  unsigned long ip = (static_cast<unsigned long>(a) << 24) | (b << 16) | (c << 8) | d;
  unsigned long mask = len == 0 ? 0 : (0xffffffffUL << (32 - len)) & 0xffffffffUL;
  return std::make_pair(ip & mask, len);
}

/// Router pairs sharing a subnet, by enumerating every pair of interfaces.
inline std::set<std::pair<std::string, std::string>> route_edges(const std::vector<netquery::Fact>& facts) {
  std::vector<std::pair<std::string, std::string>> ifs;  // router, prefix text
  for (const auto& f : facts)
    if (f.predicate == "Interface") ifs.emplace_back(f.args[0].text, netquery::literal::to_string(f.args[2]));
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [r1, p1] : ifs)
    for (const auto& [r2, p2] : ifs)
      if (r1 != r2 && subnet(p1) == subnet(p2)) out.insert({r1, r2});
  return out;
}

/// BGP sessions: both sides name each other's AS, and each side's neighbor
/// address is an interface address of the other side.
inline std::set<std::pair<std::string, std::string>> bgp_peers(const std::vector<netquery::Fact>& facts) {
  struct Nb {
    std::string router;
    long long asn;
    std::string ip;
    long long remote;
  };
  std::vector<Nb> nbs;
  std::map<std::string, std::set<std::string>> addrs;
  for (const auto& f : facts) {
    if (f.predicate == "Interface") {
      std::string p = netquery::literal::to_string(f.args[2]);
      addrs[f.args[0].text].insert(p.substr(0, p.find('/')));
    }
    if (f.predicate == "BGP") {
      const auto& rec = f.args[2];
      const auto* ip = rec.field("ip");
      const auto* ras = rec.field("remote_as");
      if (!ip || !ras || ras->is_null()) continue;
      nbs.push_back({f.args[0].text, f.args[1].integer, netquery::literal::to_string(*ip), ras->integer});
    }
  }
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& x : nbs)
    for (const auto& y : nbs) {
      if (x.router == y.router || x.remote != y.asn || y.remote != x.asn) continue;
      bool far = addrs[y.router].count(x.ip) || addrs[y.router].count(y.ip);
      bool near = addrs[x.router].count(y.ip) || addrs[x.router].count(x.ip);
      if (far && near) out.insert({x.router, y.router});
    }
  return out;
}

/// BFS over the emission log's links.
inline bool connected(const netquery::bench::EmissionLog& log) {
  if (log.routers.empty()) return true;
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& l : log.links) {
    adj[l.a].push_back(l.b);
    adj[l.b].push_back(l.a);
  }
  std::set<std::string> seen{log.routers.front()};
  std::vector<std::string> queue{log.routers.front()};
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (const auto& n : adj[queue[i]])
      if (seen.insert(n).second) queue.push_back(n);
  return seen.size() == log.routers.size();
}

/// Hand-written link tables of the corpus network fixtures (cost of a's
/// interface first). They restate the fixture configs, not engine output.
inline std::map<std::string, Net> corpus_networks() {
  std::map<std::string, Net> out;
  auto build = [](std::vector<std::tuple<std::string, std::string, long long, long long>> links) {
    Net n;
    for (auto& [a, b, ab, ba] : links) n.link(a, b, ab, ba);
    return n;
  };
  Net ordered = build({{"R1", "R2", 5, 5}, {"R2", "R3", 5, 5}, {"R1", "R4", 1, 1}, {"R4", "R5", 1, 1}, {"R5", "R3", 1, 1}});
  Net flipped = ordered;
  ordered.lp[{"R1", "R2", "R3"}] = 200;
  flipped.lp[{"R1", "R2", "R3"}] = 50;
  out["ordered-path"] = ordered;
  out["ordered-path-question"] = ordered;
  out["ordered-path-flipped"] = flipped;
  out["line3"] = build({{"R1", "R2", 2, 3}, {"R2", "R3", 4, 1}});
  out["exist-path-question"] = out["line3"];
  out["loadbalance-diamond"] = build({{"R1", "R2", 1, 1}, {"R1", "R3", 1, 1}, {"R2", "R4", 1, 1}, {"R3", "R4", 1, 1}});
  out["kconnected-ring"] =
      build({{"R1", "R2", 3, 3}, {"R2", "R3", 3, 3}, {"R3", "R4", 2, 2}, {"R4", "R5", 6, 6}, {"R5", "R1", 1, 1}});
  out["huawei-bgp"] = build({{"H1", "H2", 12, 12}});
  out["fig1-network"] = build({{"R1", "R2", 19, 3}});
  out["exist-path-broken"] = out["line3"];
  out["allpath-program"] = out["loadbalance-diamond"];
  out["ospf-program"] = out["kconnected-ring"];
  return out;
}

}  // namespace oracle
