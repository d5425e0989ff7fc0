#pragma once
// Compares the engine's routing predicates against oracle::Net on every
// ordered router pair. Returns one line per disagreement.

#include <random>
#include <string>
#include <vector>

#include "netquery/routing.hpp"
#include "oracles.hpp"

namespace oracle {

inline std::string show(const Hops& h) {
  std::string s;
  for (const auto& r : h) s += (s.empty() ? "" : ",") + r;
  return "[" + s + "]";
}

inline std::vector<std::string> compare_routing(const netquery::Network& net, const Net& o, std::uint64_t seed = 1) {
  using namespace netquery;
  std::vector<std::string> bad;
  auto note = [&](const std::string& what, const std::string& a, const std::string& b) {
    bad.push_back(what + ": engine " + a + " oracle " + b);
  };
  std::vector<std::string> rs(o.routers.begin(), o.routers.end());
  for (const auto& a : rs) {
    for (const auto& b : rs) {
      std::string pair = a + "->" + b;
      if (a == b) continue;
      if (reach(net, a, b) != o.adjacent(a, b)) note("reach " + pair, std::to_string(reach(net, a, b)), "");

      auto want = o.all_paths(a, b);
      std::vector<Hops> got;
      for (const auto& p : all_paths(net, a, b)) {
        got.push_back(p.hops);
        if (p.total_ospf_cost != *o.weight(p.hops)) note("all_paths cost " + show(p.hops), std::to_string(p.total_ospf_cost), "");
      }
      std::sort(got.begin(), got.end());
      if (got != want) note("all_paths " + pair, std::to_string(got.size()), std::to_string(want.size()));

      for (const auto& p : want) {
        if (!exist_path(net, p)) note("exist_path " + show(p), "false", "true");
        if (ospf_weight(net, p) != *o.weight(p))
          note("ospf_weight " + show(p), std::to_string(ospf_weight(net, p)), std::to_string(*o.weight(p)));
      }

      auto sp = o.shortest(a, b);
      auto tr = o.trace(a, b);
      if (!sp) {
        try {
          shortest_ospf_path(net, a, b);
          note("shortest " + pair, "a path", "none");
        } catch (const Error&) {
        }
        continue;
      }
      auto esp = shortest_ospf_path(net, a, b);
      if (esp.hops != *sp) note("shortest " + pair, show(esp.hops), show(*sp));
      if (esp.total_ospf_cost != *o.weight(*sp)) note("shortest cost " + pair, std::to_string(esp.total_ospf_cost), "");
      auto etr = trace_route(net, a, b);
      if (etr.hops != *tr) note("trace " + pair, show(etr.hops), show(*tr));
      std::vector<Hops> eq;
      for (const auto& p : equal_best_paths(net, a, b)) eq.push_back(p.hops);
      std::sort(eq.begin(), eq.end());
      if (eq != o.equal_best(a, b)) note("equal_best " + pair, std::to_string(eq.size()), std::to_string(o.equal_best(a, b).size()));
    }
  }

  // random hop sequences, most of them invalid
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 200 && !rs.empty(); ++i) {
    Hops h;
    int len = 1 + static_cast<int>(rng() % 5);
    for (int k = 0; k < len; ++k) h.push_back(rs[rng() % rs.size()]);
    if (exist_path(net, h) != o.simple_chain(h)) note("exist_path " + show(h), std::to_string(exist_path(net, h)), "");
    auto w = o.weight(h);
    try {
      long long got = ospf_weight(net, h);
      if (!w || got != *w) note("ospf_weight " + show(h), std::to_string(got), w ? std::to_string(*w) : "none");
    } catch (const Error& e) {
      if (w) note("ospf_weight " + show(h), e.what(), std::to_string(*w));
    }
  }
  return bad;
}

}  // namespace oracle
