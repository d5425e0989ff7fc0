#pragma once

#include <algorithm>
#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "netquery/chunker.hpp"
#include "netquery/config.hpp"
#include "netquery/factbase.hpp"
#include "netquery/parallel.hpp"
#include "netquery/querylang/syntax.hpp"

namespace netquery {

struct InferenceEndpointConfig {
  std::string base_url;
  std::string auth_token;
  std::string model_name;
  std::chrono::milliseconds timeout{30000};
  int max_concurrency = 4;

  void check() const {
    if (base_url.empty()) throw Error(ErrorCode::Usage, "no inference endpoint configured (NETQUERY_ENDPOINT)");
    if (timeout.count() <= 0) throw Error(ErrorCode::Usage, "endpoint timeout must be positive");
    if (max_concurrency < 1) throw Error(ErrorCode::Usage, "endpoint concurrency must be at least 1");
  }

  static InferenceEndpointConfig from(const Settings& s) {
    return {s.endpoint_url, s.api_key, s.model, std::chrono::milliseconds(s.timeout_ms), s.concurrency};
  }
};

/// Anything that turns (prompt, text) into a completion.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual std::string complete(const std::string& prompt, const std::string& text) = 0;
};

/// POSTs {"prompt", "text", "model"} and reads {"completion"}.
class HttpCompletionClient : public CompletionClient {
 public:
  explicit HttpCompletionClient(InferenceEndpointConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.check();
    auto scheme = cfg_.base_url.find("://");
    auto path_start = cfg_.base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    origin_ = cfg_.base_url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : cfg_.base_url.substr(path_start);
  }

  std::string complete(const std::string& prompt, const std::string& text) override {
    httplib::Client cli(origin_);
    if (!cli.is_valid()) throw Error(ErrorCode::EndpointUnreachable, "unsupported endpoint URL " + cfg_.base_url);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!cfg_.auth_token.empty()) headers.emplace("Authorization", "Bearer " + cfg_.auth_token);
    nlohmann::json body = {{"prompt", prompt}, {"text", text}};
    if (!cfg_.model_name.empty()) body["model"] = cfg_.model_name;
    auto res = cli.Post(path_, headers, body.dump(), "application/json");
    if (!res)
      throw Error(ErrorCode::EndpointUnreachable, cfg_.base_url + ": " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
      throw Error(ErrorCode::EndpointUnreachable, cfg_.base_url + " answered HTTP " + std::to_string(res->status));
    try {
      auto j = nlohmann::json::parse(res->body);
      return j.at("completion").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedResponse, std::string("endpoint body is not {\"completion\": ...}: ") + e.what());
    }
  }

 private:
  InferenceEndpointConfig cfg_;
  std::string origin_;
  std::string path_;
};

/// Replays canned completions in order, repeating the last one when exhausted.
class ReplayClient : public CompletionClient {
 public:
  explicit ReplayClient(std::vector<std::string> completions) : completions_(std::move(completions)) {}

  std::string complete(const std::string& prompt, const std::string& text) override {
    std::lock_guard lock(mu_);
    requests_.emplace_back(prompt, text);
    if (completions_.empty()) return {};
    std::size_t i = std::min(next_++, completions_.size() - 1);
    return completions_[i];
  }

  std::size_t calls() const {
    std::lock_guard lock(mu_);
    return requests_.size();
  }

  std::vector<std::pair<std::string, std::string>> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }

 private:
  mutable std::mutex mu_;
  std::vector<std::string> completions_;
  std::size_t next_ = 0;
  std::vector<std::pair<std::string, std::string>> requests_;
};

/// Body of the first fenced code block, or the whole text when unfenced.
inline std::string strip_code_fence(const std::string& completion) {
  auto open = completion.find("```");
  if (open == std::string::npos) return completion;
  auto body = completion.find('\n', open);
  if (body == std::string::npos) return {};
  auto close = completion.find("```", body + 1);
  return completion.substr(body + 1, close == std::string::npos ? std::string::npos : close - body - 1);
}

// ---------------------------------------------------------------------------
// Fact extraction through an endpoint

struct EndpointExtraction {
  std::vector<Fact> facts;
  std::vector<std::string> diagnostics;
};

/// Parses a completion as fact literals, line by line. Unparseable lines and
/// schema violations are dropped with a diagnostic.
inline EndpointExtraction parse_fact_response(const std::string& completion) {
  EndpointExtraction out;
  auto lines = text::split_lines(strip_code_fence(completion));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view raw = text::trim(text::strip_cr(lines[i]));
    if (raw.empty() || raw.front() == '#') continue;
    std::string where = "response line " + std::to_string(i + 1) + ": ";
    Fact f;
    try {
      auto parsed = literal::parse_document(raw);
      if (parsed.empty()) continue;
      f = parsed.front().fact;
    } catch (const Error& e) {
      out.diagnostics.push_back(where + e.what());
      continue;
    }
    if (!schemas().count(f.predicate)) {
      out.diagnostics.push_back(where + "unknown predicate " + f.predicate);
      continue;
    }
    if (auto problem = schema_problem(f); !problem.empty()) {
      out.diagnostics.push_back(where + problem);
      continue;
    }
    out.facts.push_back(std::move(f));
  }
  std::sort(out.facts.begin(), out.facts.end());
  out.facts.erase(std::unique(out.facts.begin(), out.facts.end()), out.facts.end());
  return out;
}

inline std::string extraction_prompt() { return read_data_file("prompts/extract_facts.txt"); }

inline EndpointExtraction extract_via_endpoint(const ConfigChunk& chunk, CompletionClient& client,
                                               const std::string& prompt = extraction_prompt()) {
  std::string completion = client.complete(prompt, chunk.text);
  auto out = parse_fact_response(completion);
  if (out.facts.empty())
    throw Error(ErrorCode::MalformedResponse, "no parseable facts in the response for chunk " + chunk.id());
  return out;
}

/// Endpoint extraction over many chunks. Results are merged in chunk order,
/// so completion order does not affect the outcome.
inline FactBase extract_chunks_via_endpoint(const std::vector<ConfigChunk>& chunks, CompletionClient& client,
                                            int max_concurrency = 4) {
  std::string prompt = extraction_prompt();
  std::vector<FactBase> bases(chunks.size());
  bounded_parallel(chunks.size(), max_concurrency, [&](std::size_t i) {
    auto ex = extract_via_endpoint(chunks[i], client, prompt);
    Provenance prov{chunks[i].router, chunks[i].id(), "endpoint"};
    for (const auto& f : ex.facts) bases[i].insert(f, prov);
    for (const auto& d : ex.diagnostics) bases[i].note(chunks[i].id() + " " + d);
  });
  return merge_fact_bases(bases);
}

// ---------------------------------------------------------------------------
// Program generation through an endpoint

struct GeneratedProgram {
  ql::Program program;
  std::string source;
  int repairs = 0;
};

inline std::string program_prompt() { return read_data_file("prompts/generate_program.txt"); }

inline GeneratedProgram generate_program_via_endpoint(const std::string& question, CompletionClient& client,
                                                      const std::string& prompt = program_prompt()) {
  std::string source = strip_code_fence(client.complete(prompt, question));
  try {
    return {ql::parse_program(source), source, 0};
  } catch (const Error& first) {
    if (first.code() != ErrorCode::SyntaxError && first.code() != ErrorCode::UnknownPredicate &&
        first.code() != ErrorCode::ArityMismatch)
      throw;
    std::string repair = question + "\n\nYour previous program was rejected:\n" + first.what() +
                         "\n\nPrevious program:\n" + source + "\nReturn a corrected program only.";
    std::string second = strip_code_fence(client.complete(prompt, repair));
    try {
      return {ql::parse_program(second), second, 1};
    } catch (const Error& e) {
      throw Error(ErrorCode::Unparseable, std::string("no valid program after one repair round: ") + e.what());
    }
  }
}

}  // namespace netquery
