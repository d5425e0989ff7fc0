#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "netquery/deducer.hpp"
#include "netquery/endpoint.hpp"
#include "netquery/extractor.hpp"
#include "netquery/factgraph.hpp"
#include "netquery/querylang/compiler.hpp"
#include "netquery/querylang/interpreter.hpp"
#include "netquery/routing.hpp"
#include "netquery/snapshot.hpp"

namespace netquery {

enum class Mode { Deterministic, Endpoint };

struct EngineOptions {
  Mode mode = Mode::Deterministic;
  CompletionClient* client = nullptr;  // required for Mode::Endpoint
  int concurrency = 4;
  long long default_ospf_cost = 1;
  RoutingOptions routing;
  ql::Budget budget;
};

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw e.with_stage(name);
  }
}

/// Everything derived from one snapshot. Not movable: the routing view points
/// into the graph.
class Engine {
 public:
  Engine(ConfigSnapshot snap, const EngineOptions& opts) : options(opts), snapshot(std::move(snap)) {
    facts = stage("extract", [&] {
      if (opts.mode == Mode::Endpoint) {
        if (!opts.client) throw Error(ErrorCode::Usage, "endpoint mode needs a completion client");
        std::vector<ConfigChunk> chunks;
        for (const auto& [_, doc] : snapshot.routers)
          for (auto& c : chunk_document(doc)) chunks.push_back(std::move(c));
        return extract_chunks_via_endpoint(chunks, *opts.client, opts.concurrency);
      }
      return extract_snapshot(snapshot);
    });
    deduced = stage("deduce", [&] { return deduce(facts, default_rules(), opts.default_ospf_cost); });
    graph = stage("graph", [&] { return build_graph(deduced, opts.default_ospf_cost); });
    network = std::make_unique<Network>(graph, opts.routing);
  }

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  EngineOptions options;
  ConfigSnapshot snapshot;
  FactBase facts;
  DeducedBase deduced;
  FactGraph graph;
  std::unique_ptr<Network> network;
};

inline std::unique_ptr<Engine> load_engine(const std::filesystem::path& dir, const EngineOptions& opts = {}) {
  auto snap = stage("load", [&] { return load_snapshot(dir); });
  return std::make_unique<Engine>(std::move(snap), opts);
}

struct QueryResult {
  ql::Answer answer;
  std::string source;
  std::string origin;  // "template", "program" or "endpoint"
  int repairs = 0;
};

inline QueryResult run_program(const Engine& engine, const std::string& source) {
  QueryResult r;
  r.source = source;
  r.origin = "program";
  auto prog = stage("parse", [&] { return ql::parse_program(source); });
  r.answer = stage("interpret", [&] { return ql::interpret(prog, *engine.network, engine.options.budget); });
  return r;
}

/// Answers a natural-language question (or runs a literal program). Template
/// questions are compiled deterministically; anything else goes to the
/// endpoint when one is available.
inline QueryResult answer_question(const Engine& engine, const std::string& question,
                                   CompletionClient* client = nullptr) {
  QueryResult r;
  if (auto reqs = match_questions(question)) {
    r.source = compile_bundle_source(*reqs);
    r.origin = "template";
  } else if (client) {
    auto gen = stage("generate", [&] { return generate_program_via_endpoint(question, *client); });
    r.source = gen.source;
    r.origin = "endpoint";
    r.repairs = gen.repairs;
  } else {
    try {
      ql::parse_program(question);
    } catch (const Error&) {
      throw Error(ErrorCode::Usage, "question matches no template and no inference endpoint is configured")
          .with_stage("compile");
    }
    r.source = question;
    r.origin = "program";
  }
  auto prog = stage("parse", [&] { return ql::parse_program(r.source); });
  r.answer = stage("interpret", [&] { return ql::interpret(prog, *engine.network, engine.options.budget); });
  return r;
}

}  // namespace netquery
