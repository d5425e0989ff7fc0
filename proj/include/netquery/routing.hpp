#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "netquery/factgraph.hpp"
#include "netquery/ipv4.hpp"

namespace netquery {

struct RoutePath {
  std::vector<std::string> hops;
  long long total_ospf_cost = 0;

  friend bool operator==(const RoutePath&, const RoutePath&) = default;
};

struct BgpRouteAttrs {
  long long local_preference = 100;
  long long as_path_length = 0;
  long long metric = 0;
  long long igp_cost = 0;
  std::vector<std::string> communities;

  friend bool operator==(const BgpRouteAttrs&, const BgpRouteAttrs&) = default;
};

struct RoutingOptions {
  std::size_t max_hops = 0;          // 0: number of routers
  std::size_t candidate_limit = 4096;  // trace_route falls back to k-shortest beyond this
};

/// Outcome of running a route through one route-map.
struct PolicyResult {
  bool permitted = true;
  std::vector<Json> actions;  // actions of the matching permit clause
};

/// Read-only routing view over a fact graph.
class Network {
 public:
  explicit Network(const FactGraph& g, RoutingOptions opts = {}) : g_(g), opts_(opts) {
    namespace L = graph_labels;
    for (const auto& [name, id] : g.router_index()) {
      routers_.insert(name);
      adj_[name];
    }
    for (const auto& [k, e] : g.edges()) {
      if (e.label == L::route_edge) {
        std::string a = router_name(e.src), b = router_name(e.dst);
        adj_[a][b] = e.attrs.value("cost", 1LL);
      } else if (e.label == L::uses_route_map) {
        std::string r = router_name(e.src);
        const FactNode* rm = g.node(e.dst);
        if (!rm || e.attrs["peer"].is_null()) continue;
        std::string peer = e.attrs["peer"].get<std::string>();
        std::string dir = e.attrs.value("direction", "");
        std::string name = rm->attrs.value("name", "");
        if (dir == "out") out_maps_[{r, peer}].push_back(name);
        else if (dir == "in") in_maps_[{r, peer}].push_back(name);
      }
    }
    for (const auto& r : routers_) {
      const FactNode* n = g.node(FactGraph::router_id(r));
      if (n && n->attrs.contains("asn")) bgp_.insert(r);
    }
  }

  const FactGraph& graph() const { return g_; }
  const std::set<std::string>& routers() const { return routers_; }
  bool has_router(const std::string& r) const { return routers_.count(r) > 0; }
  bool runs_bgp(const std::string& r) const { return bgp_.count(r) > 0; }

  void require(const std::string& r) const {
    if (!has_router(r)) throw Error(ErrorCode::UnknownRouter, "unknown router '" + r + "'");
  }

  std::optional<long long> edge_cost(const std::string& a, const std::string& b) const {
    auto it = adj_.find(a);
    if (it == adj_.end()) return std::nullopt;
    auto jt = it->second.find(b);
    if (jt == it->second.end()) return std::nullopt;
    return jt->second;
  }

  const std::map<std::string, long long>& neighbors(const std::string& r) const {
    static const std::map<std::string, long long> none;
    auto it = adj_.find(r);
    return it == adj_.end() ? none : it->second;
  }

  /// Prefix a router originates: its lowest loopback /32, else its lowest
  /// interface subnet.
  std::optional<Ipv4Prefix> destination_prefix(const std::string& r) const {
    std::optional<Ipv4Prefix> loop, any;
    for (const auto* e : g_.edges_from(FactGraph::router_id(r), graph_labels::has_interface)) {
      const FactNode* n = g_.node(e->dst);
      if (!n) continue;
      auto p = Ipv4Prefix::try_parse(n->attrs.value("address", ""));
      if (!p) continue;
      std::string name = text::lower(n->attrs.value("name", ""));
      bool is_loop = p->length == 32 && (text::starts_with(name, "lo") || text::starts_with(name, "loopback"));
      if (is_loop && (!loop || p->address < loop->address)) loop = *p;
      Ipv4Prefix net = p->network();
      if (!any || net < *any) any = net;
    }
    return loop ? loop : any;
  }

  /// Route-maps applied on the hop a -> b: a's export toward b, then b's import from a.
  std::vector<std::pair<std::string, std::string>> hop_policies(const std::string& a, const std::string& b) const {
    std::vector<std::pair<std::string, std::string>> out;
    if (auto it = out_maps_.find({a, b}); it != out_maps_.end())
      for (const auto& n : it->second) out.emplace_back(a, n);
    if (auto it = in_maps_.find({b, a}); it != in_maps_.end())
      for (const auto& n : it->second) out.emplace_back(b, n);
    return out;
  }

  bool prefix_list_permits(const std::string& router, const std::string& name, const Ipv4Prefix& p) const {
    const FactNode* n = g_.node(FactGraph::prefix_list_id(router, name));
    if (!n) return true;  // referencing an undefined list matches everything
    for (const auto& e : n->attrs["entries"]) {
      auto ep = Ipv4Prefix::try_parse(e.value("prefix", ""));
      if (ep && ep->network() == p.network() && ep->length == p.length) return e.value("access", "") == "permit";
    }
    return false;
  }

  bool community_matches(const std::string& router, const std::string& name,
                         const std::vector<std::string>& communities) const {
    const FactNode* n = g_.node(FactGraph::community_list_id(router, name));
    if (!n) return false;
    for (const auto& e : n->attrs["entries"]) {
      bool all = true;
      for (const auto& m : e["members"])
        if (std::find(communities.begin(), communities.end(), m.get<std::string>()) == communities.end()) all = false;
      if (all) return e.value("access", "") == "permit";
    }
    return false;
  }

  /// First clause (by sequence) whose matches all hold decides; no match denies.
  PolicyResult evaluate_route_map(const std::string& router, const std::string& name, const Ipv4Prefix& p,
                                  const std::vector<std::string>& communities) const {
    const FactNode* n = g_.node(FactGraph::route_map_id(router, name));
    if (!n) return {true, {}};
    for (const auto& clause : n->attrs["clauses"]) {
      bool match = true;
      for (const auto& m : clause["match"]) {
        std::string kind = m.value("kind", "");
        if (kind == "prefix_list") match = match && prefix_list_permits(router, m.value("name", ""), p);
        else if (kind == "ip_address") {
          auto ip = Ipv4::parse(m.value("value", ""));
          match = match && ip && p.contains(*ip);
        } else if (kind == "community") {
          match = match && community_matches(router, m.value("name", ""), communities);
        }
        // acl and raw clauses are inert
      }
      if (!match) continue;
      if (clause.value("access", "") == "deny") return {false, {}};
      std::vector<Json> acts(clause["actions"].begin(), clause["actions"].end());
      return {true, acts};
    }
    return {false, {}};
  }

  /// Folds every policy along `hops` for the destination prefix of the last
  /// hop. nullopt when some policy denies the route.
  std::optional<BgpRouteAttrs> fold_attributes(const std::vector<std::string>& hops) const {
    BgpRouteAttrs attrs;
    auto dst = destination_prefix(hops.back());
    for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
      attrs.igp_cost += edge_cost(hops[i], hops[i + 1]).value_or(0);
      if (!dst) continue;
      for (const auto& [router, name] : hop_policies(hops[i], hops[i + 1])) {
        auto res = evaluate_route_map(router, name, *dst, attrs.communities);
        if (!res.permitted) return std::nullopt;
        for (const auto& a : res.actions) {
          std::string kind = a.value("kind", "");
          if (kind == "local_preference") attrs.local_preference = a.value("value", 100LL);
          else if (kind == "as_path_prepend") attrs.as_path_length += static_cast<long long>(a["asns"].size());
          else if (kind == "metric") attrs.metric = a.value("value", 0LL);
          else if (kind == "community")
            for (const auto& v : a["values"]) {
              std::string s = v.get<std::string>();
              if (std::find(attrs.communities.begin(), attrs.communities.end(), s) == attrs.communities.end())
                attrs.communities.push_back(s);
            }
        }
      }
    }
    return attrs;
  }

  std::size_t max_hops() const { return opts_.max_hops ? opts_.max_hops : routers_.size(); }
  const RoutingOptions& options() const { return opts_; }

 private:
  static std::string router_name(const std::string& id) { return id.substr(7, id.size() - 8); }

  const FactGraph& g_;
  RoutingOptions opts_;
  std::set<std::string> routers_;
  std::set<std::string> bgp_;
  std::map<std::string, std::map<std::string, long long>> adj_;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> out_maps_;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> in_maps_;
};

// ---------------------------------------------------------------------------
// Predicates

inline bool reach(const Network& net, const std::string& r1, const std::string& r2) {
  net.require(r1);
  net.require(r2);
  return net.edge_cost(r1, r2).has_value();
}

/// Adjacent simple chain of at least two routers whose policies do not deny
/// the destination's prefix.
inline bool exist_path(const Network& net, const std::vector<std::string>& hops) {
  for (const auto& h : hops) net.require(h);
  if (hops.size() < 2) return false;
  std::set<std::string> seen(hops.begin(), hops.end());
  if (seen.size() != hops.size()) return false;
  for (std::size_t i = 0; i + 1 < hops.size(); ++i)
    if (!net.edge_cost(hops[i], hops[i + 1])) return false;
  return net.fold_attributes(hops).has_value();
}

inline long long ospf_weight(const Network& net, const std::vector<std::string>& hops) {
  for (const auto& h : hops) net.require(h);
  long long total = 0;
  for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
    auto c = net.edge_cost(hops[i], hops[i + 1]);
    if (!c) throw Error(ErrorCode::NotAdjacent, hops[i] + " and " + hops[i + 1] + " are not adjacent");
    total += *c;
  }
  return total;
}

namespace detail {

inline bool path_less(const RoutePath& a, const RoutePath& b) {
  if (a.total_ospf_cost != b.total_ospf_cost) return a.total_ospf_cost < b.total_ospf_cost;
  return a.hops < b.hops;
}

/// Simple paths r1 -> r2 by DFS (neighbors in name order). Stops early and
/// returns false once more than `limit` paths are found or more than
/// `max_steps` partial paths were expanded.
inline bool enumerate_paths(const Network& net, const std::string& r1, const std::string& r2, std::size_t max_nodes,
                            std::size_t limit, std::vector<RoutePath>& out,
                            std::size_t max_steps = static_cast<std::size_t>(-1)) {
  std::vector<std::string> path{r1};
  std::set<std::string> on_path{r1};
  bool complete = true;
  std::size_t steps = 0;
  std::function<void(long long)> dfs = [&](long long cost) {
    if (!complete) return;
    if (++steps > max_steps) {
      complete = false;
      return;
    }
    const std::string& at = path.back();
    if (at == r2) {
      out.push_back({path, cost});
      if (out.size() > limit) complete = false;
      return;
    }
    if (path.size() >= max_nodes) return;
    for (const auto& [next, c] : net.neighbors(at)) {
      if (on_path.count(next)) continue;
      path.push_back(next);
      on_path.insert(next);
      dfs(cost + c);
      on_path.erase(next);
      path.pop_back();
    }
  };
  if (r1 != r2) dfs(0);
  return complete;
}

/// Dijkstra over (cost, hop sequence) labels avoiding `banned` nodes/edges.
inline std::optional<RoutePath> dijkstra(const Network& net, const std::string& r1, const std::string& r2,
                                         const std::set<std::string>& banned_nodes = {},
                                         const std::set<std::pair<std::string, std::string>>& banned_edges = {}) {
  using Label = std::pair<long long, std::vector<std::string>>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> pq;
  std::map<std::string, Label> best;
  pq.push({0, {r1}});
  best[r1] = {0, {r1}};
  while (!pq.empty()) {
    Label cur = pq.top();
    pq.pop();
    const std::string& at = cur.second.back();
    if (best[at] < cur) continue;
    if (at == r2) return RoutePath{cur.second, cur.first};
    for (const auto& [next, c] : net.neighbors(at)) {
      if (banned_nodes.count(next) || banned_edges.count({at, next})) continue;
      if (std::find(cur.second.begin(), cur.second.end(), next) != cur.second.end()) continue;
      Label cand{cur.first + c, cur.second};
      cand.second.push_back(next);
      auto it = best.find(next);
      if (it == best.end() || cand < it->second) {
        best[next] = cand;
        pq.push(std::move(cand));
      }
    }
  }
  return std::nullopt;
}

/// Yen's k shortest simple paths in (cost, hops) order.
inline std::vector<RoutePath> k_shortest(const Network& net, const std::string& r1, const std::string& r2,
                                         std::size_t k, std::size_t max_nodes) {
  std::vector<RoutePath> shortest;
  auto first = dijkstra(net, r1, r2);
  if (!first) return shortest;
  shortest.push_back(*first);
  std::set<std::vector<std::string>> seen{first->hops};
  std::vector<RoutePath> pool;
  while (shortest.size() < k) {
    const RoutePath& last = shortest.back();
    for (std::size_t i = 0; i + 1 < last.hops.size(); ++i) {
      std::vector<std::string> root(last.hops.begin(), last.hops.begin() + static_cast<long>(i) + 1);
      std::set<std::pair<std::string, std::string>> banned_edges;
      for (const auto& p : shortest)
        if (p.hops.size() > i + 1 && std::equal(root.begin(), root.end(), p.hops.begin()))
          banned_edges.insert({p.hops[i], p.hops[i + 1]});
      std::set<std::string> banned_nodes(root.begin(), root.end() - 1);
      auto spur = dijkstra(net, root.back(), r2, banned_nodes, banned_edges);
      if (!spur) continue;
      RoutePath total{root, 0};
      total.hops.insert(total.hops.end(), spur->hops.begin() + 1, spur->hops.end());
      if (total.hops.size() > max_nodes || seen.count(total.hops)) continue;
      for (std::size_t j = 0; j + 1 < total.hops.size(); ++j)
        total.total_ospf_cost += *net.edge_cost(total.hops[j], total.hops[j + 1]);
      seen.insert(total.hops);
      pool.push_back(std::move(total));
    }
    if (pool.empty()) break;
    auto best = std::min_element(pool.begin(), pool.end(), path_less);
    shortest.push_back(*best);
    pool.erase(best);
  }
  return shortest;
}

}  // namespace detail

/// Every simple path r1 -> r2 (at most max_hops routers) that exist_path
/// accepts, ordered by (cost, hops).
inline std::vector<RoutePath> all_paths(const Network& net, const std::string& r1, const std::string& r2) {
  net.require(r1);
  net.require(r2);
  std::vector<RoutePath> raw;
  detail::enumerate_paths(net, r1, r2, net.max_hops(), static_cast<std::size_t>(-1) - 1, raw);
  std::vector<RoutePath> out;
  for (auto& p : raw)
    if (net.fold_attributes(p.hops)) out.push_back(std::move(p));
  std::sort(out.begin(), out.end(), detail::path_less);
  return out;
}

inline RoutePath shortest_ospf_path(const Network& net, const std::string& r1, const std::string& r2) {
  net.require(r1);
  net.require(r2);
  if (r1 == r2) return RoutePath{{r1}, 0};
  auto p = detail::dijkstra(net, r1, r2);
  if (!p) throw Error(ErrorCode::NoPath, "no path from " + r1 + " to " + r2);
  return *p;
}

struct RankedPath {
  RoutePath path;
  BgpRouteAttrs attrs;
};

/// Decision order: local preference (high), AS-path length, metric, IGP cost
/// (low), then hop sequence.
inline bool better_route(const RankedPath& a, const RankedPath& b) {
  if (a.attrs.local_preference != b.attrs.local_preference)
    return a.attrs.local_preference > b.attrs.local_preference;
  if (a.attrs.as_path_length != b.attrs.as_path_length) return a.attrs.as_path_length < b.attrs.as_path_length;
  if (a.attrs.metric != b.attrs.metric) return a.attrs.metric < b.attrs.metric;
  if (a.attrs.igp_cost != b.attrs.igp_cost) return a.attrs.igp_cost < b.attrs.igp_cost;
  return a.path.hops < b.path.hops;
}

inline bool same_preference(const BgpRouteAttrs& a, const BgpRouteAttrs& b) {
  return a.local_preference == b.local_preference && a.as_path_length == b.as_path_length && a.metric == b.metric &&
         a.igp_cost == b.igp_cost;
}

/// Permitted candidate routes ranked best first. Candidates are every simple
/// path when there are at most `candidate_limit`, else the k shortest by cost.
inline std::vector<RankedPath> ranked_routes(const Network& net, const std::string& r1, const std::string& r2) {
  net.require(r1);
  net.require(r2);
  std::vector<RoutePath> candidates;
  std::size_t limit = net.options().candidate_limit;
  if (!detail::enumerate_paths(net, r1, r2, net.max_hops(), limit, candidates, limit * 64))
    candidates = detail::k_shortest(net, r1, r2, std::min<std::size_t>(limit, 256), net.max_hops());
  std::vector<RankedPath> ranked;
  for (auto& p : candidates)
    if (auto attrs = net.fold_attributes(p.hops)) ranked.push_back({std::move(p), *attrs});
  std::sort(ranked.begin(), ranked.end(), better_route);
  return ranked;
}

inline RoutePath trace_route(const Network& net, const std::string& r1, const std::string& r2) {
  auto ranked = ranked_routes(net, r1, r2);
  if (ranked.empty()) throw Error(ErrorCode::NoPath, "no permitted route from " + r1 + " to " + r2);
  return ranked.front().path;
}

/// Routes tied with the best on every decision attribute.
inline std::vector<RoutePath> equal_best_paths(const Network& net, const std::string& r1, const std::string& r2) {
  auto ranked = ranked_routes(net, r1, r2);
  std::vector<RoutePath> out;
  for (const auto& r : ranked)
    if (same_preference(r.attrs, ranked.front().attrs)) out.push_back(r.path);
  return out;
}

}  // namespace netquery
