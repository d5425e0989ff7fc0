// netquery command-line front end.
//
// Exit codes: 0 success (a false answer is still success), 2 usage error,
// 3 a pipeline stage failed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "netquery/bench.hpp"
#include "netquery/corpus.hpp"
#include "netquery/pipeline.hpp"

namespace nq = netquery;
using nlohmann::json;

namespace {

constexpr int kUsage = 2;
constexpr int kStage = 3;

struct Common {
  std::string config;
  std::string mode = "deterministic";
};

nq::Settings settings_for(const Common& c) {
  return nq::load_settings(c.config.empty() ? std::nullopt : std::optional<std::filesystem::path>(c.config));
}

std::unique_ptr<nq::CompletionClient> client_for(const nq::Settings& s) {
  if (!s.has_endpoint()) return nullptr;
  return std::make_unique<nq::HttpCompletionClient>(nq::InferenceEndpointConfig::from(s));
}

nq::EngineOptions engine_options(const Common& c, const nq::Settings& s, nq::CompletionClient* client) {
  nq::EngineOptions o;
  if (c.mode == "endpoint") {
    if (!client) throw nq::Error(nq::ErrorCode::Usage, "endpoint mode needs NETQUERY_ENDPOINT or endpoint_url in the config file");
    o.mode = nq::Mode::Endpoint;
    o.client = client;
  } else if (c.mode != "deterministic") {
    throw nq::Error(nq::ErrorCode::Usage, "unknown mode '" + c.mode + "'");
  }
  o.concurrency = s.concurrency;
  o.default_ospf_cost = s.default_ospf_cost;
  o.budget.statements = s.statement_cap;
  o.budget.wall_clock = std::chrono::milliseconds(s.wall_clock_ms);
  return o;
}

void print_answer(const nq::QueryResult& r, bool trace, bool as_json) {
  if (as_json) {
    json j = {{"answer", r.answer.value.to_json()},
              {"type", r.answer.value.type_name()},
              {"origin", r.origin},
              {"repairs", r.repairs},
              {"program", r.source},
              {"statements", r.answer.statements},
              {"lints", r.answer.lints},
              {"trace", json::array()}};
    for (const auto& t : r.answer.trace) j["trace"].push_back(t.to_json());
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << r.answer.value.repr() << "\n";
  if (trace)
    for (const auto& t : r.answer.trace)
      std::cout << "  " << t.call << " " << t.args.dump() << " -> " << t.result.dump() << "  (" << t.micros << " us)\n";
  for (const auto& l : r.answer.lints) std::cerr << "warning: " << l << "\n";
}

std::ostream& output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw nq::Error(nq::ErrorCode::Io, "cannot write " + path);
  return file;
}

// ---------------------------------------------------------------------------
// REPL

void repl(nq::Engine& engine, nq::CompletionClient* client, std::istream& in, std::ostream& out, bool prompt) {
  std::vector<nq::ql::TraceEntry> last_trace;
  std::string pending;
  auto show_prompt = [&] {
    if (prompt) out << (pending.empty() ? "nq> " : "... ") << std::flush;
  };
  auto run = [&](const std::string& input) {
    try {
      auto r = nq::answer_question(engine, input, client);
      out << r.answer.value.repr() << "\n";
      for (const auto& l : r.answer.lints) out << "warning: " << l << "\n";
      last_trace = r.answer.trace;
    } catch (const nq::Error& e) {
      out << "error";
      if (!e.stage().empty()) out << " [" << e.stage() << "]";
      out << " " << e.what() << "\n";
    } catch (const std::exception& e) {
      out << "error: " << e.what() << "\n";
    }
  };

  std::string line;
  show_prompt();
  while (std::getline(in, line)) {
    std::string_view t = nq::text::trim(nq::text::strip_cr(line));
    if (!pending.empty()) {
      // a block statement continues until a blank line
      if (t.empty()) {
        run(pending);
        pending.clear();
      } else {
        pending += line + "\n";
      }
      show_prompt();
      continue;
    }
    if (t.empty()) {
      show_prompt();
      continue;
    }
    if (t.front() == ':') {
      auto words = nq::text::split_ws(t);
      const std::string& cmd = words[0];
      if (cmd == ":quit" || cmd == ":q") break;
      if (cmd == ":facts") {
        auto facts = words.size() > 1 ? engine.deduced.all.with_predicate(words[1]) : engine.deduced.all.facts();
        for (const auto& f : facts) out << nq::literal::to_string(f) << "\n";
        out << facts.size() << " facts\n";
      } else if (cmd == ":graph") {
        if (words.size() > 1 && words[1] == "dot") out << nq::export_dot(engine.graph);
        else if (words.size() > 1 && words[1] == "jsonl") out << nq::export_jsonl(engine.graph);
        else out << engine.graph.nodes().size() << " nodes, " << engine.graph.edges().size() << " edges\n";
      } else if (cmd == ":trace") {
        out << nq::ql::trace_jsonl(last_trace);
      } else if (cmd == ":help") {
        out << ":facts [Predicate]   list facts (explicit and derived)\n"
               ":graph [dot|jsonl]   graph size or full export\n"
               ":trace               predicate calls of the last query\n"
               ":quit                leave (Ctrl-D works too)\n"
               "Anything else is a question or a program; end a multi-line program with a blank line.\n";
      } else {
        out << "error: unknown command " << cmd << " (try :help)\n";
      }
      show_prompt();
      continue;
    }
    if (t.back() == ':') {
      pending = line + "\n";
      show_prompt();
      continue;
    }
    run(std::string(t));
    show_prompt();
  }
  if (!pending.empty()) run(pending);
  if (prompt) out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netquery: question answering over router configurations"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config, "Settings file (JSON); NETQUERY_* environment variables override it");

  std::string dir, router, predicate, format = "jsonl", out_path, question, program_file;
  bool implicit_only = false, trace = false, as_json = false;

  auto* ingest = app.add_subcommand("ingest", "Load a snapshot and summarize it");
  ingest->add_option("dir", dir, "Snapshot directory")->required();

  auto* chunks = app.add_subcommand("chunks", "Print the configuration chunks");
  chunks->add_option("dir", dir)->required();
  chunks->add_option("--router", router, "Only this router");

  auto* facts = app.add_subcommand("facts", "Extract explicit facts");
  facts->add_option("dir", dir)->required();
  facts->add_option("--predicate", predicate, "Only this predicate");
  facts->add_option("--mode", common.mode, "deterministic or endpoint")->check(CLI::IsMember({"deterministic", "endpoint"}));

  auto* deduce_cmd = app.add_subcommand("deduce", "Extract and apply the rule set");
  deduce_cmd->add_option("dir", dir)->required();
  deduce_cmd->add_flag("--implicit-only", implicit_only, "Print derived facts only");

  auto* graph = app.add_subcommand("graph", "Build the fact graph");
  graph->add_option("dir", dir)->required();
  graph->add_option("--format", format, "dot or jsonl")->check(CLI::IsMember({"dot", "jsonl"}));
  graph->add_option("-o,--output", out_path, "Output file (default stdout)");

  std::string candidate, reference;
  auto* gmr = app.add_subcommand("gmr", "Graph match ratio of a candidate graph against a reference");
  gmr->add_option("candidate", candidate, "Graph JSONL file or snapshot directory")->required();
  gmr->add_option("reference", reference, "Graph JSONL file or snapshot directory")->required();

  auto* query = app.add_subcommand("query", "Answer one question or run one program");
  query->add_option("dir", dir)->required();
  query->add_option("question", question, "Question text or program source");
  query->add_option("--program", program_file, "Read a program from this file ('-' for stdin)");
  query->add_option("--mode", common.mode, "deterministic or endpoint")->check(CLI::IsMember({"deterministic", "endpoint"}));
  query->add_flag("--trace", trace, "Print predicate calls");
  query->add_flag("--json", as_json, "Print the full result as JSON");

  auto* repl_cmd = app.add_subcommand("repl", "Interactive session over one snapshot");
  repl_cmd->add_option("dir", dir)->required();
  repl_cmd->add_option("--mode", common.mode, "deterministic or endpoint")->check(CLI::IsMember({"deterministic", "endpoint"}));

  auto* bench = app.add_subcommand("bench", "Synthetic networks and QA benchmarks");
  bench->require_subcommand(1);
  int routers = 32, per_kind = 5, concurrency = 1, bundle_size = 1;
  double degree = 3.0;
  std::uint64_t seed = 1;
  int policies = -1, diamonds = -1;
  std::string edges, answerer = "engine", qa_file;

  auto* gen = bench->add_subcommand("gen", "Generate a snapshot and its emission log");
  gen->add_option("-o,--output", out_path, "Snapshot directory to write")->required();
  gen->add_option("--routers", routers, "Router count")->check(CLI::Range(2, 100000));
  gen->add_option("--degree", degree, "Target mean degree");
  gen->add_option("--seed", seed);
  gen->add_option("--policies", policies, "Planted local-preference policies (default routers/8)");
  gen->add_option("--diamonds", diamonds, "Planted equal-cost diamonds");
  gen->add_option("--edges", edges, "Edge-list file (\"A B\" per line) instead of a random topology");

  auto* qa = bench->add_subcommand("qa", "Generate engine-verified questions for a snapshot");
  qa->add_option("dir", dir)->required();
  qa->add_option("--per-kind", per_kind, "Positives (and negatives) per requirement kind")->check(CLI::NonNegativeNumber);
  qa->add_option("--seed", seed);
  qa->add_option("--bundle", bundle_size, "Questions per bundled item")->check(CLI::PositiveNumber);
  qa->add_option("-o,--output", out_path, "JSONL output (default stdout)");

  auto* eval = bench->add_subcommand("eval", "Score an answerer on a QA file");
  eval->add_option("dir", dir)->required();
  eval->add_option("qa", qa_file, "QA JSONL file")->required();
  eval->add_option("--answerer", answerer, "engine, direct, chunks or always-true")
      ->check(CLI::IsMember({"engine", "direct", "chunks", "always-true"}));
  eval->add_option("--concurrency", concurrency)->check(CLI::PositiveNumber);
  eval->add_option("-o,--output", out_path, "Report JSON (default stdout)");

  auto* corpus_cmd = app.add_subcommand("corpus", "Golden fixture cases");
  corpus_cmd->require_subcommand(1);
  std::string corpus_root = "corpus";
  auto* corpus_run = corpus_cmd->add_subcommand("run", "Check every case");
  corpus_run->add_option("root", corpus_root);
  auto* corpus_bless = corpus_cmd->add_subcommand("bless", "Rewrite expected files from current output");
  corpus_bless->add_option("root", corpus_root);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    nq::Settings settings = settings_for(common);
    if (!settings.data_dir.empty()) ::setenv("NETQUERY_DATA_DIR", settings.data_dir.c_str(), 0);
    std::unique_ptr<nq::CompletionClient> client;
    if (common.mode == "endpoint" || (*eval && (answerer == "direct" || answerer == "chunks")) ||
        (*repl_cmd || *query))
      client = client_for(settings);

    auto load = [&](const std::string& d) { return nq::stage("load", [&] { return nq::load_snapshot(d); }); };
    auto engine = [&](const std::string& d) {
      return std::make_unique<nq::Engine>(load(d), engine_options(common, settings, client.get()));
    };

    if (*ingest) {
      auto snap = load(dir);
      std::cout << "snapshot " << snap.name << ": " << snap.routers.size() << " routers\n";
      for (const auto& [name, doc] : snap.routers)
        std::cout << "  " << name << "  " << nq::to_string(doc.dialect) << "  " << doc.line_count() << " lines\n";
      if (snap.declared_links) std::cout << snap.declared_links->size() << " declared links\n";
      for (const auto& w : snap.warnings) std::cerr << "warning: " << w << "\n";
    } else if (*chunks) {
      auto snap = load(dir);
      if (!router.empty() && !snap.routers.count(router))
        throw nq::Error(nq::ErrorCode::UnknownRouter, "no router " + router).with_stage("chunk");
      for (const auto& [name, doc] : snap.routers) {
        if (!router.empty() && name != router) continue;
        for (const auto& c : nq::stage("chunk", [&] { return nq::chunk_document(doc); }))
          std::cout << "--- " << c.id() << "\n" << c.text << "\n";
      }
    } else if (*facts) {
      auto snap = load(dir);
      nq::FactBase base;
      if (common.mode == "endpoint") {
        auto opts = engine_options(common, settings, client.get());
        base = nq::stage("extract", [&] {
          std::vector<nq::ConfigChunk> all;
          for (const auto& [_, doc] : snap.routers)
            for (auto& c : nq::chunk_document(doc)) all.push_back(std::move(c));
          return nq::extract_chunks_via_endpoint(all, *opts.client, opts.concurrency);
        });
      } else {
        base = nq::stage("extract", [&] { return nq::extract_snapshot(snap); });
      }
      std::cout << nq::render_facts(predicate.empty() ? base.facts() : base.with_predicate(predicate));
      for (const auto& d : base.diagnostics()) std::cerr << "note: " << d << "\n";
    } else if (*deduce_cmd) {
      auto snap = load(dir);
      auto base = nq::stage("extract", [&] { return nq::extract_snapshot(snap); });
      auto d = nq::stage("deduce", [&] { return nq::deduce(base, nq::default_rules(), settings.default_ospf_cost); });
      if (implicit_only) std::cout << nq::render_facts(d.implicit_facts());
      else std::cout << nq::render_deduced(d);
    } else if (*graph) {
      auto e = engine(dir);
      std::ofstream file;
      output(out_path, file) << (format == "dot" ? nq::export_dot(e->graph) : nq::export_jsonl(e->graph));
      for (const auto& d : e->graph.diagnostics) std::cerr << "note: " << d << "\n";
    } else if (*gmr) {
      auto graph_of = [&](const std::string& p) {
        if (std::filesystem::is_directory(p)) return std::move(engine(p)->graph);
        return nq::stage("graph", [&] { return nq::import_jsonl(nq::read_file(p)); });
      };
      auto cand = graph_of(candidate);
      auto ref = graph_of(reference);
      auto rep = nq::compute_gmr(cand, ref);
      json j = {{"gmr", rep.gmr},
                {"matched_nodes", rep.matched_nodes},
                {"matched_edges", rep.matched_edges},
                {"reference_size", rep.reference_size},
                {"unmatched", rep.unmatched}};
      std::cout << j.dump(2) << "\n";
    } else if (*query) {
      std::string input = question;
      if (!program_file.empty()) {
        if (program_file == "-") {
          input.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
        } else {
          input = nq::read_file(program_file);
        }
      }
      if (input.empty()) throw nq::Error(nq::ErrorCode::Usage, "give a question or --program");
      auto e = engine(dir);
      auto r = program_file.empty() ? nq::answer_question(*e, input, client.get()) : nq::run_program(*e, input);
      print_answer(r, trace, as_json);
    } else if (*repl_cmd) {
      auto e = engine(dir);
      std::cerr << e->snapshot.routers.size() << " routers, " << e->deduced.all.facts().size() << " facts, "
                << e->graph.nodes().size() << " graph nodes. :help for commands.\n";
      repl(*e, client.get(), std::cin, std::cout, true);
    } else if (*gen) {
      nq::bench::GeneratorSpec spec;
      spec.routers = routers;
      spec.degree = degree;
      spec.seed = seed;
      spec.policies = policies;
      spec.diamonds = diamonds;
      spec.name = std::filesystem::path(out_path).filename().string();
      auto g = edges.empty() ? nq::bench::generate_snapshot(spec)
                             : nq::bench::snapshot_from_edges(nq::read_file(edges), spec);
      nq::bench::write_generated(g, out_path);
      std::cout << "wrote " << g.snapshot.routers.size() << " routers, " << g.log.links.size() << " links, "
                << g.log.policies.size() << " policies, " << g.log.diamonds.size() << " diamonds to " << out_path
                << "\n";
    } else if (*qa) {
      auto e = engine(dir);
      nq::bench::QaOptions opts;
      auto log_path = std::filesystem::path(dir) / "emission.json";
      if (std::filesystem::exists(log_path)) {
        auto log = nq::bench::EmissionLog::from_json(json::parse(nq::read_file(log_path)));
        opts.ordered_hints = log.policy_pairs();
        opts.balance_hints = log.diamond_pairs();
      }
      auto items = nq::stage("bench", [&] {
        return nq::bench::generate_qa(*e->network, e->snapshot.name, per_kind, seed, opts);
      });
      if (bundle_size > 1) items = nq::bench::bundle(std::move(items), static_cast<std::size_t>(bundle_size), seed);
      std::ofstream file;
      output(out_path, file) << nq::bench::qa_jsonl(items);
    } else if (*eval) {
      auto items = nq::bench::parse_qa_jsonl(nq::read_file(qa_file));
      nq::bench::Answerer fn;
      std::unique_ptr<nq::Engine> e;
      std::optional<nq::ConfigSnapshot> snap;
      if (answerer == "engine") {
        e = engine(dir);
        fn = [&](const nq::bench::QaItem& item) { return nq::answer_question(*e, item.question).answer.value.truthy(); };
      } else if (answerer == "always-true") {
        fn = [](const nq::bench::QaItem&) { return true; };
      } else {
        if (!client) throw nq::Error(nq::ErrorCode::Usage, "the " + answerer + " baseline needs an inference endpoint");
        snap = load(dir);
        fn = answerer == "direct" ? nq::bench::direct_prompt_baseline(*client, *snap)
                                  : nq::bench::chunk_retrieval_baseline(*client, *snap);
      }
      auto rep = nq::bench::evaluate(items, fn, concurrency);
      std::ofstream file;
      output(out_path, file) << rep.to_json().dump(2) << "\n";
    } else if (*corpus_run) {
      int failed = 0;
      auto cases = nq::corpus::discover(corpus_root);
      for (const auto& c : cases) {
        auto r = nq::corpus::run_golden(c);
        std::cout << (r.pass ? "PASS " : "FAIL ") << c.name << " [" << c.stage << "]\n";
        if (!r.pass) {
          std::cout << r.diff;
          ++failed;
        }
      }
      std::cout << cases.size() - static_cast<std::size_t>(failed) << "/" << cases.size() << " cases pass\n";
      if (failed) return kStage;
    } else if (*corpus_bless) {
      for (const auto& c : nq::corpus::discover(corpus_root)) {
        nq::corpus::bless(c);
        std::cout << "blessed " << c.name << "\n";
      }
    }
    return 0;
  } catch (const nq::Error& e) {
    std::cerr << "netquery: ";
    if (!e.stage().empty()) std::cerr << "[" << e.stage() << "] ";
    std::cerr << e.what() << "\n";
    return e.code() == nq::ErrorCode::Usage ? kUsage : kStage;
  } catch (const std::exception& e) {
    std::cerr << "netquery: " << e.what() << "\n";
    return kStage;
  }
}
