#include <gtest/gtest.h>

#include <random>

#include "netquery/bench.hpp"
#include "netquery/corpus.hpp"
#include "netquery/pipeline.hpp"
#include "oracles.hpp"
#include "routing_check.hpp"

using namespace netquery;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Usage;
}

std::string router_cfg(int i, const std::vector<std::pair<std::string, int>>& ifaces, const std::string& bgp,
                       const std::string& tail = "") {
  std::string s = "hostname R" + std::to_string(i) + "\n!\ninterface lo0\n ip address 172.16.0." + std::to_string(i) +
                  " 255.255.255.255\n!\n";
  int k = 0;
  for (const auto& [addr, cost] : ifaces)
    s += "interface GigabitEthernet" + std::to_string(k++) + "\n ip address " + addr + " 255.255.255.0\n ip ospf cost " +
         std::to_string(cost) + "\n!\n";
  s += "router bgp 65000\n" + bgp + "!\n" + tail;
  return s;
}

std::unique_ptr<Engine> engine_from(const std::map<std::string, std::string>& configs) {
  ConfigSnapshot snap;
  for (const auto& [name, text] : configs) snap.add_document(name, text);
  return std::make_unique<Engine>(std::move(snap), EngineOptions{});
}

// R1 - R2 over 10.0.12.0/24; policies are supplied per test.
std::unique_ptr<Engine> pair_network(const std::string& r1_bgp, const std::string& r1_tail, const std::string& r2_bgp,
                                     const std::string& r2_tail) {
  return engine_from({{"R1", router_cfg(1, {{"10.0.12.1", 1}}, r1_bgp, r1_tail)},
                      {"R2", router_cfg(2, {{"10.0.12.2", 1}}, r2_bgp, r2_tail)}});
}

}  // namespace

// [DERIVED] brute-force enumeration over the emission log's link table
TEST(RoutingOracle, GeneratedSnapshotsUpToTenRouters) {
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 45; ++seed) {
    bench::GeneratorSpec spec;
    spec.routers = 2 + static_cast<int>(seed % 9);
    spec.seed = seed;
    spec.policies = static_cast<int>(seed % 3);
    auto g = bench::generate_snapshot(spec);
    Engine e(g.snapshot, {});
    auto bad = oracle::compare_routing(*e.network, oracle::Net::from_log(g.log), seed);
    EXPECT_TRUE(bad.empty()) << "seed " << seed << ": " << bad.size() << " mismatches, first: " << bad.front();
    ++compared;
  }
  EXPECT_EQ(compared, 45);
}

// [DERIVED] hand-written link tables of the corpus network fixtures
TEST(RoutingOracle, CorpusNetworks) {
  auto tables = oracle::corpus_networks();
  for (const auto& c : corpus::discover(oracle::corpus_dir())) {
    auto snap = load_snapshot(c.input_dir());
    if (snap.routers.size() < 2) continue;
    ASSERT_TRUE(tables.count(c.name)) << "no link table for " << c.name;
    Engine e(std::move(snap), {});
    EXPECT_EQ(e.network->routers(), tables.at(c.name).routers) << c.name;
    auto bad = oracle::compare_routing(*e.network, tables.at(c.name));
    EXPECT_TRUE(bad.empty()) << c.name << ": " << bad.front();
  }
}

// [DERIVED] a planted preference steers exactly the planted router pair
TEST(RoutingOracle, PlantedPolicyRaisesPreference) {
  bench::GeneratorSpec spec;
  spec.routers = 10;
  spec.seed = 3;
  spec.policies = 2;
  auto g = bench::generate_snapshot(spec);
  ASSERT_EQ(g.log.policies.size(), 2u);
  Engine e(g.snapshot, {});
  auto o = oracle::Net::from_log(g.log);
  for (const auto& p : g.log.policies) {
    auto best = trace_route(*e.network, p.router, p.destination);
    auto attrs = e.network->fold_attributes(best.hops);
    ASSERT_TRUE(attrs.has_value());
    EXPECT_EQ(attrs->local_preference, o.local_pref(best.hops));
    EXPECT_EQ(e.network->fold_attributes({p.router, p.neighbor})->local_preference,
              p.neighbor == p.destination ? 200 : 100);
  }
}

TEST(Routing, ErrorsAndEdgeCases) {
  auto e = load_engine(oracle::corpus_dir() / "line3" / "input");
  const Network& net = *e->network;
  EXPECT_EQ(code_of([&] { reach(net, "R1", "R9"); }), ErrorCode::UnknownRouter);
  EXPECT_EQ(code_of([&] { exist_path(net, {"R1", "R9"}); }), ErrorCode::UnknownRouter);
  EXPECT_EQ(code_of([&] { ospf_weight(net, {"R1", "R3"}); }), ErrorCode::NotAdjacent);
  EXPECT_FALSE(exist_path(net, {"R1"}));
  EXPECT_FALSE(exist_path(net, {"R1", "R2", "R1"}));
  EXPECT_FALSE(exist_path(net, {"R1", "R3"}));
  EXPECT_EQ(ospf_weight(net, {"R2"}), 0);
  EXPECT_EQ(shortest_ospf_path(net, "R2", "R2").hops, (std::vector<std::string>{"R2"}));
  // asymmetric costs: R1 -> R2 uses R1's interface cost, R2 -> R1 uses R2's
  EXPECT_EQ(ospf_weight(net, {"R1", "R2", "R3"}), 2 + 4);
  EXPECT_EQ(ospf_weight(net, {"R3", "R2", "R1"}), 1 + 3);
}

TEST(Routing, DisconnectedRoutersHaveNoPath) {
  auto e = engine_from({{"R1", router_cfg(1, {{"10.0.1.1", 1}}, "")}, {"R2", router_cfg(2, {{"10.0.2.1", 1}}, "")}});
  const Network& net = *e->network;
  EXPECT_FALSE(reach(net, "R1", "R2"));
  EXPECT_TRUE(all_paths(net, "R1", "R2").empty());
  EXPECT_EQ(code_of([&] { shortest_ospf_path(net, "R1", "R2"); }), ErrorCode::NoPath);
  EXPECT_EQ(code_of([&] { trace_route(net, "R1", "R2"); }), ErrorCode::NoPath);
}

TEST(Policy, OutboundDenyBlocksOnlyMatchingDestination) {
  auto e = pair_network(" neighbor 10.0.12.2 remote-as 65000\n neighbor 10.0.12.2 route-map BLOCK out\n",
                        "ip prefix-list P seq 5 permit 172.16.0.2/32\n!\nroute-map BLOCK deny 10\n"
                        " match ip address prefix-list P\n!\nroute-map BLOCK permit 20\n!\n",
                        " neighbor 10.0.12.1 remote-as 65000\n", "");
  EXPECT_FALSE(exist_path(*e->network, {"R1", "R2"}));
  EXPECT_TRUE(exist_path(*e->network, {"R2", "R1"}));
  EXPECT_TRUE(reach(*e->network, "R1", "R2"));
  EXPECT_TRUE(all_paths(*e->network, "R1", "R2").empty());
}

TEST(Policy, InboundMapAppliesOnFarSide) {
  auto e = pair_network(" neighbor 10.0.12.2 remote-as 65000\n", "",
                        " neighbor 10.0.12.1 remote-as 65000\n neighbor 10.0.12.1 route-map IN in\n",
                        "route-map IN permit 10\n set local-preference 300\n set metric 7\n!\n");
  auto attrs = e->network->fold_attributes({"R1", "R2"});
  ASSERT_TRUE(attrs.has_value());
  EXPECT_EQ(attrs->local_preference, 300);
  EXPECT_EQ(attrs->metric, 7);
  EXPECT_EQ(e->network->fold_attributes({"R2", "R1"})->local_preference, 100);
}

TEST(Policy, MapWithoutMatchingClauseDenies) {
  auto e = pair_network(" neighbor 10.0.12.2 remote-as 65000\n neighbor 10.0.12.2 route-map ONLY out\n",
                        "ip prefix-list Q seq 5 permit 192.168.0.0/16\n!\nroute-map ONLY permit 10\n"
                        " match ip address prefix-list Q\n!\n",
                        " neighbor 10.0.12.1 remote-as 65000\n", "");
  EXPECT_FALSE(exist_path(*e->network, {"R1", "R2"}));
}

// [DERIVED] decision order: preference beats cost, AS-path length beats cost
TEST(Policy, DecisionOrder) {
  // diamond R1-{R2,R3}-R4 where the R2 branch is cheaper
  std::map<std::string, std::string> cfgs = {
      {"R1", router_cfg(1, {{"10.0.12.1", 1}, {"10.0.13.1", 5}},
                        " neighbor 10.0.12.2 remote-as 65000\n neighbor 10.0.13.3 remote-as 65000\n"
                        " neighbor 10.0.13.3 route-map VIA3 out\n",
                        "route-map VIA3 permit 10\n set local-preference 150\n!\n")},
      {"R2", router_cfg(2, {{"10.0.12.2", 1}, {"10.0.24.2", 1}}, "")},
      {"R3", router_cfg(3, {{"10.0.13.3", 1}, {"10.0.34.3", 1}}, "")},
      {"R4", router_cfg(4, {{"10.0.24.4", 1}, {"10.0.34.4", 1}}, "")},
  };
  auto e = engine_from(cfgs);
  EXPECT_EQ(shortest_ospf_path(*e->network, "R1", "R4").hops, (std::vector<std::string>{"R1", "R2", "R4"}));
  EXPECT_EQ(trace_route(*e->network, "R1", "R4").hops, (std::vector<std::string>{"R1", "R3", "R4"}));

  cfgs["R1"] = router_cfg(1, {{"10.0.12.1", 1}, {"10.0.13.1", 5}},
                          " neighbor 10.0.12.2 remote-as 65000\n neighbor 10.0.12.2 route-map LONG out\n"
                          " neighbor 10.0.13.3 remote-as 65000\n",
                          "route-map LONG permit 10\n set as-path prepend 65000 65000\n!\n");
  auto e2 = engine_from(cfgs);
  EXPECT_EQ(trace_route(*e2->network, "R1", "R4").hops, (std::vector<std::string>{"R1", "R3", "R4"}));
  EXPECT_EQ(e2->network->fold_attributes({"R1", "R2", "R4"})->as_path_length, 2);
}

TEST(Routing, DestinationPrefixPrefersLoopback) {
  auto e = load_engine(oracle::corpus_dir() / "ordered-path" / "input");
  EXPECT_EQ(e->network->destination_prefix("R3")->str(), "172.16.0.3/32");
  auto h = load_engine(oracle::corpus_dir() / "huawei-bgp" / "input");
  EXPECT_EQ(h->network->destination_prefix("H1")->str(), "10.70.0.0/30");
}

TEST(Routing, CandidateLimitFallsBackToKShortest) {
  bench::GeneratorSpec spec;
  spec.routers = 9;
  spec.degree = 4.0;
  spec.seed = 5;
  auto g = bench::generate_snapshot(spec);
  EngineOptions small;
  small.routing.candidate_limit = 3;
  Engine full(g.snapshot, {});
  Engine capped(g.snapshot, small);
  auto o = oracle::Net::from_log(g.log);
  for (const auto& a : o.routers)
    for (const auto& b : o.routers) {
      if (a == b) continue;
      // without planted preferences the k-shortest fallback still finds the optimum
      if (o.trace(a, b) == o.shortest(a, b))
        EXPECT_EQ(trace_route(*capped.network, a, b).hops, trace_route(*full.network, a, b).hops) << a << b;
    }
}
