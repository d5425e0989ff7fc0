#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "netquery/bench.hpp"
#include "netquery/corpus.hpp"
#include "netquery/pipeline.hpp"
#include "oracles.hpp"

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

struct TempDir {
  fs::path path;
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path = fs::temp_directory_path() / ("netquery-test-" + std::to_string(rng()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

bench::GeneratedNetwork generated(int routers, std::uint64_t seed) {
  bench::GeneratorSpec spec;
  spec.routers = routers;
  spec.seed = seed;
  return bench::generate_snapshot(spec);
}

std::set<Fact> as_set(const std::vector<Fact>& v) { return {v.begin(), v.end()}; }

std::set<std::pair<std::string, std::string>> pairs_of(const std::vector<Fact>& facts) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& f : facts) out.insert({f.args[0].text, f.args[1].text});
  return out;
}

Fact fact(const std::string& s) { return literal::parse_fact(s); }

}  // namespace

// ---------------------------------------------------------------------------
// Snapshot

TEST(Snapshot, DialectOfEveryCorpusInput) {
  const std::vector<std::pair<std::string, Dialect>> by_name = {{"juniper", Dialect::Juniper},
                                                                {"huawei", Dialect::Huawei},
                                                                {"h3c", Dialect::H3C},
                                                                {"aruba", Dialect::Aruba},
                                                                {"cisco", Dialect::CiscoIOS}};
  int checked = 0;
  for (const auto& c : corpus::discover(oracle::corpus_dir())) {
    for (const auto& [tag, want] : by_name) {
      if (c.name.find(tag) == std::string::npos) continue;
      for (const auto& [_, doc] : load_snapshot(c.input_dir()).routers) {
        EXPECT_EQ(doc.dialect, want) << c.name;
        ++checked;
      }
    }
  }
  EXPECT_GE(checked, 10);
}

TEST(Snapshot, DialectHeuristics) {
  EXPECT_EQ(detect_dialect("system {\n host-name R1;\n}\n"), Dialect::Juniper);
  EXPECT_EQ(detect_dialect("sysname R1\n#\ninterface GE0/0/0\n"), Dialect::Huawei);
  EXPECT_EQ(detect_dialect("hostname R1\n!\n"), Dialect::CiscoIOS);
  EXPECT_EQ(detect_dialect("just some words\n"), Dialect::Unknown);
}

TEST(Snapshot, LoadErrors) {
  TempDir t;
  EXPECT_EQ(code_of([&] { load_snapshot(t.path / "missing"); }), ErrorCode::EmptySnapshot);
  EXPECT_EQ(code_of([&] { load_snapshot(t.path); }), ErrorCode::EmptySnapshot);

  write_file(t.path / "configs" / "a.cfg", "hostname R1\n");
  write_file(t.path / "configs" / "b.cfg", "hostname R1\n");
  EXPECT_EQ(code_of([&] { load_snapshot(t.path); }), ErrorCode::DuplicateRouter);

  fs::remove(t.path / "configs" / "b.cfg");
  write_file(t.path / "topology.json", R"({"links": [["R1", "R9"]]})");
  EXPECT_EQ(code_of([&] { load_snapshot(t.path); }), ErrorCode::InvalidTopology);
  write_file(t.path / "topology.json", "{not json");
  EXPECT_EQ(code_of([&] { load_snapshot(t.path); }), ErrorCode::InvalidTopology);
}

TEST(Snapshot, HostnameWinsOverFileName) {
  TempDir t;
  write_file(t.path / "configs" / "edge.cfg", "hostname core1\n");
  auto s = load_snapshot(t.path);
  ASSERT_EQ(s.routers.count("core1"), 1u);
  EXPECT_EQ(s.warnings.size(), 1u);
}

TEST(Snapshot, DocumentsSerializeByteIdentical) {
  for (std::string raw : {"hostname R1\r\n!\r\ninterface e0\r\n", "a\n\nb", "x\n", ""}) {
    EXPECT_EQ(ConfigDocument::from_text("R", raw).serialize(), raw);
  }
}

// ---------------------------------------------------------------------------
// Chunker

// [DERIVED] every chunk holds every block it depends on, checked two ways:
// through resolved references and by scanning chunk text for Cisco names.
TEST(Chunker, GeneratedChunksAreSelfContained) {
  static const std::regex uses_map(R"(route-map (\S+) (in|out))");
  static const std::regex uses_list(R"(match ip address prefix-list (\S+))");
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    int n = 2 + static_cast<int>(seed * 7 % 39);
    auto g = generated(n, seed);
    for (const auto& [name, doc] : g.snapshot.routers) {
      for (const auto& c : chunk_document(doc)) {
        EXPECT_TRUE(unresolved_references(c).empty()) << c.id();
        for (std::sregex_iterator it(c.text.begin(), c.text.end(), uses_map), end; it != end; ++it)
          EXPECT_NE(c.text.find("route-map " + (*it)[1].str() + " permit"), std::string::npos) << c.id();
        for (std::sregex_iterator it(c.text.begin(), c.text.end(), uses_list), end; it != end; ++it)
          EXPECT_NE(c.text.find("ip prefix-list " + (*it)[1].str() + " "), std::string::npos) << c.id();
      }
    }
  }
}

TEST(Chunker, BlockCountsMatchEmissionLog) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto g = generated(12, seed);
    for (const auto& [name, doc] : g.snapshot.routers) EXPECT_EQ(split_blocks(doc).size(), g.log.blocks.at(name));
  }
}

TEST(Chunker, EveryBlockLandsInSomeChunk) {
  for (const auto& c : corpus::discover(oracle::corpus_dir())) {
    for (const auto& [_, doc] : load_snapshot(c.input_dir()).routers) {
      std::set<std::size_t> seen;
      for (const auto& ch : chunk_document(doc))
        for (const auto& b : ch.path_blocks) seen.insert(b.id);
      EXPECT_EQ(seen.size(), split_blocks(doc).size()) << c.name;
    }
  }
}

// ---------------------------------------------------------------------------
// Extractor

// worked example: facts stated by the two reference router configs
TEST(Extractor, ExampleFigureFacts) {
  auto r1 = extract_snapshot(load_snapshot(oracle::corpus_dir() / "fig1-r1-cisco" / "input"));
  EXPECT_TRUE(r1.contains(fact("Interface(R1, lo0, 1.1.1.11/32)")));
  EXPECT_TRUE(r1.contains(fact("Interface(R1, GigabitEthernet1, 1.0.25.2/24)")));
  EXPECT_TRUE(r1.contains(fact("InterfaceOSPFCost(R1, GigabitEthernet1, 19)")));
  EXPECT_TRUE(r1.contains(fact("OSPFNetwork(R1, [lo0, GigabitEthernet1])")));

  auto r2 = extract_snapshot(load_snapshot(oracle::corpus_dir() / "fig1-r2-cisco" / "input"));
  EXPECT_TRUE(r2.contains(fact("BGP(R2, 1, neighbor(ip=1.1.1.5, remote_as=1, peer=_, in=_, out=rm1, adv_interval=0))")));
  auto maps = r2.with_predicate("RouteMap");
  ASSERT_EQ(maps.size(), 1u);
  EXPECT_EQ(literal::to_string(maps[0].args[5]),
            "[local_preference(value=2), as_path_prepend(asns=[1]), metric(value=1)]");
}

// [DERIVED] the generator's emission log is the oracle for its own configs
TEST(Extractor, GeneratedSnapshotsMatchEmissionLog) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    auto g = generated(3 + static_cast<int>(seed % 9) * 3, seed);
    EXPECT_EQ(as_set(extract_snapshot(g.snapshot).facts()), as_set(g.log.facts)) << "seed " << seed;
  }
}

TEST(Extractor, ProvenanceNamesChunkAndGrammar) {
  auto fb = extract_snapshot(load_snapshot(oracle::corpus_dir() / "fig1-r1-cisco" / "input"));
  for (const auto& [f, prov] : fb.entries()) {
    ASSERT_FALSE(prov.empty());
    for (const auto& p : prov) {
      EXPECT_EQ(p.router, "R1");
      EXPECT_EQ(p.extractor, "grammar:CiscoIOS");
      EXPECT_EQ(p.chunk.rfind("R1#", 0), 0u);
    }
  }
}

TEST(Extractor, DialectPairsExtractIdenticalFacts) {
  auto pairs = corpus::dialect_pairs(oracle::corpus_dir());
  EXPECT_GE(pairs.size(), 5u);
  for (const auto& [a, b] : pairs) {
    auto fa = extract_snapshot(load_snapshot(oracle::corpus_dir() / a / "input")).facts();
    auto fb = extract_snapshot(load_snapshot(oracle::corpus_dir() / b / "input")).facts();
    EXPECT_EQ(fa, fb) << a << " vs " << b;
  }
}

// ---------------------------------------------------------------------------
// FactBase merge policies

TEST(FactBase, SetPolicyUnionsProvenance) {
  FactBase fb;
  fb.insert(fact("Router(R1)"), Provenance{"R1", "R1#0", "x"});
  fb.insert(fact("Router(R1)"), Provenance{"R1", "R1#1", "x"});
  EXPECT_EQ(fb.size(), 1u);
  EXPECT_EQ(fb.provenance(fact("Router(R1)")).size(), 2u);
  EXPECT_TRUE(fb.conflicts().empty());
}

TEST(FactBase, ReplacePolicyKeepsLatestAndLogs) {
  FactBase fb;
  fb.insert(fact("Interface(R1, e0, 10.0.0.1/24)"), Provenance{"R1", "a", "x"});
  fb.insert(fact("Interface(R1, e0, 10.0.0.2/24)"), Provenance{"R1", "b", "x"});
  EXPECT_EQ(fb.size(), 1u);
  EXPECT_TRUE(fb.contains(fact("Interface(R1, e0, 10.0.0.2/24)")));
  EXPECT_EQ(fb.conflicts().size(), 1u);
}

TEST(FactBase, AppendListPolicyConcatenates) {
  FactBase fb;
  fb.insert(fact("OSPFNetwork(R1, [lo0, e0])"), Provenance{"R1", "a", "x"});
  fb.insert(fact("OSPFNetwork(R1, [e0, e1])"), Provenance{"R1", "b", "x"});
  EXPECT_EQ(fb.facts(), std::vector<Fact>{fact("OSPFNetwork(R1, [lo0, e0, e1])")});
  EXPECT_EQ(fb.provenance(fact("OSPFNetwork(R1, [lo0, e0, e1])")).size(), 2u);
}

TEST(FactBase, FieldUnionPolicyMergesNeighborFields) {
  FactBase fb;
  fb.insert(fact("BGP(R1, 1, neighbor(ip=10.0.0.2, remote_as=2, peer=_, in=_, out=_, adv_interval=_))"), Provenance{});
  fb.insert(fact("BGP(R1, 1, neighbor(ip=10.0.0.2, remote_as=_, peer=_, in=_, out=rm1, adv_interval=_))"), Provenance{});
  fb.insert(fact("BGP(R1, 1, neighbor(ip=10.0.0.3, remote_as=3, peer=_, in=_, out=_, adv_interval=_))"), Provenance{});
  EXPECT_EQ(fb.size(), 2u);
  EXPECT_TRUE(fb.contains(fact("BGP(R1, 1, neighbor(ip=10.0.0.2, remote_as=2, peer=_, in=_, out=rm1, adv_interval=_))")));
  EXPECT_TRUE(fb.conflicts().empty());
  fb.insert(fact("BGP(R1, 1, neighbor(ip=10.0.0.2, remote_as=5, peer=_, in=_, out=_, adv_interval=_))"), Provenance{});
  EXPECT_EQ(fb.conflicts().size(), 1u);
}

TEST(FactBase, LiteralRoundTrip) {
  for (const auto& c : corpus::discover(oracle::corpus_dir())) {
    for (const auto& f : extract_snapshot(load_snapshot(c.input_dir())).facts())
      EXPECT_EQ(fact(literal::to_string(f)), f) << literal::to_string(f);
  }
  EXPECT_EQ(code_of([] { fact("Interface(R1, e0"); }), ErrorCode::FactSyntax);
  EXPECT_EQ(code_of([] { validate(fact("Interface(R1, e0)")); }), ErrorCode::SchemaViolation);
}

// ---------------------------------------------------------------------------
// Deducer

// [DERIVED] adjacency and sessions by brute-force pair enumeration over the
// emission log's facts, and adjacency again from the log's link list
TEST(Deducer, MatchesPairEnumerationOnGeneratedSnapshots) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    int n = 2 + static_cast<int>(seed % 9);
    auto g = generated(n, seed);
    auto d = deduce(extract_snapshot(g.snapshot), default_rules());
    auto edges = pairs_of(d.all.with_predicate("RouteEdge"));
    EXPECT_EQ(edges, oracle::route_edges(g.log.facts)) << "seed " << seed;
    std::set<std::pair<std::string, std::string>> links;
    for (const auto& l : g.log.links) links.insert({l.a, l.b}), links.insert({l.b, l.a});
    EXPECT_EQ(edges, links) << "seed " << seed;
    EXPECT_EQ(pairs_of(d.all.with_predicate("BGPPeer")), oracle::bgp_peers(g.log.facts)) << "seed " << seed;
  }
}

TEST(Deducer, MatchesPairEnumerationOnCorpus) {
  for (const auto& c : corpus::discover(oracle::corpus_dir())) {
    auto fb = extract_snapshot(load_snapshot(c.input_dir()));
    auto d = deduce(fb, default_rules());
    EXPECT_EQ(pairs_of(d.all.with_predicate("RouteEdge")), oracle::route_edges(fb.facts())) << c.name;
    EXPECT_EQ(pairs_of(d.all.with_predicate("BGPPeer")), oracle::bgp_peers(fb.facts())) << c.name;
  }
}

TEST(Deducer, PairwiseCostIsNearSideInterfaceCost) {
  auto fb = extract_snapshot(load_snapshot(oracle::corpus_dir() / "line3" / "input"));
  auto d = deduce(fb, default_rules());
  auto o = oracle::corpus_networks().at("line3");
  for (const auto& f : d.all.with_predicate("OSPFCost"))
    EXPECT_EQ(f.args[2].integer, o.cost.at({f.args[0].text, f.args[1].text})) << literal::to_string(f);
  EXPECT_EQ(d.all.with_predicate("OSPFCost").size(), o.cost.size());
}

TEST(Deducer, ImplicitFactsCarryDerivations) {
  auto d = deduce(extract_snapshot(load_snapshot(oracle::corpus_dir() / "fig1-network" / "input")), default_rules());
  ASSERT_FALSE(d.implicit_facts().empty());
  for (const auto& f : d.implicit_facts()) {
    EXPECT_FALSE(d.derivation.at(f).empty());
    for (const auto& support : d.derivation.at(f)) EXPECT_TRUE(d.all.contains(support));
  }
}

TEST(Deducer, RuleErrors) {
  EXPECT_EQ(code_of([] { parse_rules("Foo(X) :- Bar(Y)."); }), ErrorCode::UnsafeRule);
  EXPECT_EQ(code_of([] { parse_rules("Foo(X :- Bar(X)."); }), ErrorCode::RuleSyntax);
  EXPECT_EQ(code_of([] { parse_rules("Foo(X) :- Bar(X)"); }), ErrorCode::RuleSyntax);
  EXPECT_NO_THROW(parse_rules("# only a comment\n"));
}

TEST(Deducer, CustomRuleReachesFixedPoint) {
  FactBase fb;
  for (const char* s : {"RouteEdge(A, B)", "RouteEdge(B, C)", "RouteEdge(C, D)"}) fb.insert(fact(s), Provenance{});
  auto d = apply_rules(fb, parse_rules("Conn(X, Y) :- RouteEdge(X, Y).\nConn(X, Z) :- Conn(X, Y), RouteEdge(Y, Z)."));
  EXPECT_EQ(d.all.with_predicate("Conn").size(), 6u);
  EXPECT_TRUE(d.all.contains(fact("Conn(A, D)")));
}

// ---------------------------------------------------------------------------
// Fact graph and GMR

namespace {

// Five nodes, four edges: a router, two interfaces, a subnet and a route map.
FactGraph five_four() {
  FactGraph g;
  g.add_node("Router(R1)", "Router").attrs = {{"name", "R1"}};
  g.add_node("Interface(R1, e0)", "Interface").attrs = {{"address", "10.0.0.1/24"}};
  g.add_node("Interface(R1, e1)", "Interface").attrs = {{"address", "10.0.1.1/24"}};
  g.add_node("SubNet(10.0.0.0/24)", "SubNet");
  g.add_node("RouteMap(R1, rm1)", "RouteMap");
  g.add_edge("Router(R1)", "has-interface", "Interface(R1, e0)");
  g.add_edge("Router(R1)", "has-interface", "Interface(R1, e1)");
  g.add_edge("Interface(R1, e0)", "in-subnet", "SubNet(10.0.0.0/24)");
  g.add_edge("Router(R1)", "uses-route-map", "RouteMap(R1, rm1)");
  return g;
}

}  // namespace

// [DERIVED] hand-counted matches over a 9-element reference
TEST(Gmr, PerturbationCases) {
  FactGraph ref = five_four();
  ASSERT_EQ(ref.nodes().size() + ref.edges().size(), 9u);
  EXPECT_DOUBLE_EQ(compute_gmr(ref, ref).gmr, 1.0);

  FactGraph missing_leaf = ref;  // drops one node and its only edge
  missing_leaf.remove_node("RouteMap(R1, rm1)");
  auto r = compute_gmr(missing_leaf, ref);
  EXPECT_EQ(r.matched_nodes + r.matched_edges, 7u);
  EXPECT_DOUBLE_EQ(r.gmr, 7.0 / 9.0);

  FactGraph wrong_attr = ref;  // one attribute differs
  wrong_attr.add_node("Interface(R1, e1)", "Interface").attrs = {{"address", "10.0.9.1/24"}};
  r = compute_gmr(wrong_attr, ref);
  EXPECT_DOUBLE_EQ(r.gmr, 8.0 / 9.0);
  ASSERT_EQ(r.unmatched.size(), 1u);
  EXPECT_EQ(r.unmatched[0], "node Interface(R1, e1)");

  FactGraph extra = ref;  // extra candidate elements do not count against it
  extra.add_node("Router(R9)", "Router");
  EXPECT_DOUBLE_EQ(compute_gmr(extra, ref).gmr, 1.0);

  EXPECT_EQ(code_of([&] { compute_gmr(ref, FactGraph{}); }), ErrorCode::EmptyReference);
}

TEST(Gmr, IdentityOnEveryCorpusGraph) {
  for (const auto& c : corpus::discover(oracle::corpus_dir())) {
    auto g = build_graph(deduce(extract_snapshot(load_snapshot(c.input_dir())), default_rules()));
    EXPECT_DOUBLE_EQ(compute_gmr(g, g).gmr, 1.0) << c.name;
  }
}

TEST(Graph, JsonlRoundTrip) {
  for (const auto& c : corpus::discover(oracle::corpus_dir())) {
    auto g = build_graph(deduce(extract_snapshot(load_snapshot(c.input_dir())), default_rules()));
    auto text = export_jsonl(g);
    auto back = import_jsonl(text);
    EXPECT_EQ(export_jsonl(back), text) << c.name;
    EXPECT_DOUBLE_EQ(compute_gmr(back, g).gmr, 1.0) << c.name;
  }
  EXPECT_EQ(code_of([] { import_jsonl("{\"type\": \"blob\"}\n"); }), ErrorCode::GraphFormat);
  EXPECT_EQ(code_of([] { import_jsonl("not json\n"); }), ErrorCode::GraphFormat);
}

TEST(Graph, DotMentionsEveryNode) {
  auto g = build_graph(deduce(extract_snapshot(load_snapshot(oracle::corpus_dir() / "line3" / "input")), default_rules()));
  auto dot = export_dot(g);
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  for (const auto& [id, _] : g.nodes()) EXPECT_NE(dot.find(dot_escape(id)), std::string::npos) << id;
}

// ---------------------------------------------------------------------------
// Golden corpus

TEST(Corpus, EveryCaseMatchesExpected) {
  auto cases = corpus::discover(oracle::corpus_dir());
  EXPECT_GE(cases.size(), 20u);
  for (const auto& c : cases) {
    auto r = corpus::run_golden(c);
    EXPECT_TRUE(r.pass) << c.name << "\n" << r.diff;
  }
}

TEST(Corpus, CorruptedExpectedFileGivesOneLineDiff) {
  TempDir t;
  fs::copy(oracle::corpus_dir() / "fig1-r1-cisco", t.path / "case", fs::copy_options::recursive);
  fs::path facts = t.path / "case" / "expected" / "facts.nq";
  std::string text = read_file(facts);
  auto pos = text.find("19");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 2, "91");
  write_file(facts, text);

  auto r = corpus::run_golden(corpus::load_case(t.path / "case"));
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.mismatched, std::vector<std::string>{"facts.nq"});
  int minus = 0, plus = 0;
  for (const auto& line : text::split_lines(r.diff)) {
    if (line.rfind("---", 0) == 0 || line.rfind("+++", 0) == 0) continue;
    minus += !line.empty() && line[0] == '-';
    plus += !line.empty() && line[0] == '+';
  }
  EXPECT_EQ(minus, 1);
  EXPECT_EQ(plus, 1);
  EXPECT_NE(r.diff.find("-InterfaceOSPFCost(R1, GigabitEthernet1, 91)"), std::string::npos);
  EXPECT_NE(r.diff.find("+InterfaceOSPFCost(R1, GigabitEthernet1, 19)"), std::string::npos);

  corpus::bless(corpus::load_case(t.path / "case"));
  EXPECT_TRUE(corpus::run_golden(corpus::load_case(t.path / "case")).pass);
}

TEST(Corpus, MissingFixtureErrors) {
  TempDir t;
  EXPECT_EQ(code_of([&] { corpus::load_case(t.path); }), ErrorCode::MissingFixture);
  fs::create_directories(t.path / "input" / "configs");
  fs::create_directories(t.path / "expected");
  EXPECT_EQ(code_of([&] { corpus::load_case(t.path); }), ErrorCode::MissingFixture);
  write_file(t.path / "expected" / "mystery.txt", "x\n");
  EXPECT_EQ(code_of([&] { corpus::load_case(t.path); }), ErrorCode::MissingFixture);
  EXPECT_EQ(code_of([&] { corpus::discover(t.path / "nowhere"); }), ErrorCode::MissingFixture);
}

TEST(Corpus, UnifiedDiffShape) {
  EXPECT_EQ(corpus::unified_diff("a\nb\n", "a\nb\n", "x"), "");
  EXPECT_EQ(corpus::unified_diff("a\nb\nc\n", "a\nB\nc\n", "x"),
            "--- expected/x\n+++ actual/x\n@@ -1,3 +1,3 @@\n a\n-b\n+B\n c\n");
}

// ---------------------------------------------------------------------------
// Pipeline

TEST(Pipeline, ErrorsNameTheirStage) {
  TempDir t;
  try {
    load_engine(t.path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySnapshot);
    EXPECT_EQ(e.stage(), "load");
  }
  auto engine = load_engine(oracle::corpus_dir() / "line3" / "input");
  try {
    run_program(*engine, "return (\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.stage(), "parse");
  }
  try {
    run_program(*engine, "return y\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.stage(), "interpret");
  }
}

TEST(Pipeline, EndpointModeNeedsClient) {
  EngineOptions opts;
  opts.mode = Mode::Endpoint;
  try {
    load_engine(oracle::corpus_dir() / "line3" / "input", opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Usage);
    EXPECT_EQ(e.stage(), "extract");
  }
}

TEST(Config, EnvironmentOverridesFile) {
  TempDir t;
  write_file(t.path / "netquery.json", R"({"endpoint_url": "http://file.example/v1", "model": "m1", "concurrency": 2})");
  ::setenv("NETQUERY_MODEL", "m2", 1);
  auto s = load_settings(t.path / "netquery.json");
  ::unsetenv("NETQUERY_MODEL");
  EXPECT_EQ(s.endpoint_url, "http://file.example/v1");
  EXPECT_EQ(s.model, "m2");
  EXPECT_EQ(s.concurrency, 2);
}
