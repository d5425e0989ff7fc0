#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "netquery/chunker.hpp"
#include "netquery/deducer.hpp"
#include "netquery/extractor.hpp"
#include "netquery/factgraph.hpp"
#include "netquery/pipeline.hpp"
#include "netquery/snapshot.hpp"

namespace netquery::corpus {

namespace fs = std::filesystem;

/// A fixture directory `<case>/{input/, expected/}`. `input/` is a snapshot
/// directory; each file in `expected/` names the stage that must reproduce it.
struct GoldenCase {
  std::string name;
  fs::path dir;
  std::vector<std::string> inputs;    // relative to input/
  std::vector<std::string> expected;  // file names in expected/
  std::string stage;                  // comma-joined stages pinned by the expected files

  fs::path input_dir() const { return dir / "input"; }
  fs::path expected_dir() const { return dir / "expected"; }
};

/// Expected file name -> stage that produces it.
inline const std::map<std::string, std::string>& stage_files() {
  static const std::map<std::string, std::string> m = {
      {"chunks.txt", "chunk"},   {"facts.nq", "extract"},  {"deduced.nq", "deduce"},
      {"graph.jsonl", "graph"},  {"graph.dot", "graph"},   {"answer.txt", "query"},
  };
  return m;
}

inline std::vector<std::string> list_files(const fs::path& root) {
  std::vector<std::string> out;
  if (!fs::is_directory(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root).generic_string());
  std::sort(out.begin(), out.end());
  return out;
}

inline GoldenCase load_case(const fs::path& dir) {
  GoldenCase c;
  c.name = dir.filename().string();
  c.dir = dir;
  if (!fs::is_directory(c.input_dir()) || !fs::is_directory(c.expected_dir()))
    throw Error(ErrorCode::MissingFixture, dir.string() + " needs input/ and expected/");
  c.inputs = list_files(c.input_dir());
  c.expected = list_files(c.expected_dir());
  if (c.expected.empty()) throw Error(ErrorCode::MissingFixture, c.name + ": expected/ is empty");
  std::vector<std::string> stages;
  for (const auto& e : c.expected) {
    auto it = stage_files().find(e);
    if (it == stage_files().end()) throw Error(ErrorCode::MissingFixture, c.name + ": no stage produces " + e);
    if (std::find(stages.begin(), stages.end(), it->second) == stages.end()) stages.push_back(it->second);
  }
  c.stage = text::join(stages, ",");
  return c;
}

/// Every case directory under `root` (directories without input/ are skipped).
inline std::vector<GoldenCase> discover(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorCode::MissingFixture, "no corpus at " + root.string());
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && fs::is_directory(e.path() / "input")) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<GoldenCase> out;
  for (const auto& d : dirs) out.push_back(load_case(d));
  return out;
}

inline std::string render_chunks(const ConfigSnapshot& snap) {
  std::string out;
  for (const auto& [_, doc] : snap.routers)
    for (const auto& c : chunk_document(doc)) out += "--- " + c.id() + "\n" + c.text + "\n";
  return out;
}

/// Verdict plus the predicate calls that produced it, without timings.
inline std::string render_answer(const ql::Answer& a) {
  std::string out = "answer: " + a.value.repr() + "\n";
  for (const auto& t : a.trace) out += t.call + " " + t.args.dump() + " -> " + t.result.dump() + "\n";
  return out;
}

/// Runs the stage that owns `expected_file` on the case inputs.
inline std::string produce(const GoldenCase& c, const std::string& expected_file) {
  auto snap = load_snapshot(c.input_dir());
  if (expected_file == "chunks.txt") return render_chunks(snap);
  auto facts = extract_snapshot(snap);
  if (expected_file == "facts.nq") return render_facts(facts.facts());
  auto deduced = deduce(facts, default_rules());
  if (expected_file == "deduced.nq") return render_deduced(deduced);
  if (expected_file == "graph.jsonl") return export_jsonl(build_graph(deduced));
  if (expected_file == "graph.dot") return export_dot(build_graph(deduced));
  if (expected_file == "answer.txt") {
    Engine engine(std::move(snap), {});
    if (fs::exists(c.input_dir() / "program.nq"))
      return render_answer(run_program(engine, read_file(c.input_dir() / "program.nq")).answer);
    if (fs::exists(c.input_dir() / "question.txt")) {
      std::string q(text::trim(read_file(c.input_dir() / "question.txt")));
      return render_answer(answer_question(engine, q).answer);
    }
    throw Error(ErrorCode::MissingFixture, c.name + ": answer.txt needs input/program.nq or input/question.txt");
  }
  throw Error(ErrorCode::MissingFixture, c.name + ": no stage produces " + expected_file);
}

/// Line-based unified diff with 3 lines of context ("" when equal).
inline std::string unified_diff(const std::string& expected, const std::string& actual, const std::string& label) {
  if (expected == actual) return {};
  auto a = text::split_lines(expected);
  auto b = text::split_lines(actual);
  std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<std::size_t>> lcs(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);

  struct Op {
    char tag;
    std::size_t ai, bi;  // positions before the op
    std::string line;
  };
  std::vector<Op> ops;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j]) {
      ops.push_back({' ', i, j, a[i]});
      ++i, ++j;
    } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
      ops.push_back({'-', i, j, a[i]});
      ++i;
    } else {
      ops.push_back({'+', i, j, b[j]});
      ++j;
    }
  }
  if (std::none_of(ops.begin(), ops.end(), [](const Op& o) { return o.tag != ' '; })) {
    // only the trailing newline differs
    return "--- expected/" + label + "\n+++ actual/" + label + "\n@@ trailing newline differs @@\n";
  }

  const std::size_t ctx = 3;
  std::string out = "--- expected/" + label + "\n+++ actual/" + label + "\n";
  std::size_t k = 0;
  while (k < ops.size()) {
    while (k < ops.size() && ops[k].tag == ' ') ++k;
    if (k == ops.size()) break;
    std::size_t start = k >= ctx ? k - ctx : 0;
    std::size_t end = k;
    // extend while changes are within 2*ctx of each other
    while (end < ops.size()) {
      if (ops[end].tag != ' ') {
        ++end;
        continue;
      }
      std::size_t run = end;
      while (run < ops.size() && ops[run].tag == ' ') ++run;
      if (run == ops.size() || run - end > 2 * ctx) {
        end = std::min(ops.size(), end + ctx);
        break;
      }
      end = run;
    }
    std::size_t a_len = 0, b_len = 0;
    for (std::size_t x = start; x < end; ++x) {
      if (ops[x].tag != '+') ++a_len;
      if (ops[x].tag != '-') ++b_len;
    }
    auto range = [](std::size_t from, std::size_t len) {
      return std::to_string(len ? from + 1 : from) + "," + std::to_string(len);
    };
    out += "@@ -" + range(ops[start].ai, a_len) + " +" + range(ops[start].bi, b_len) + " @@\n";
    for (std::size_t x = start; x < end; ++x) out += std::string(1, ops[x].tag) + ops[x].line + "\n";
    k = end;
  }
  return out;
}

struct GoldenResult {
  bool pass = true;
  std::vector<std::string> mismatched;
  std::string diff;
};

inline GoldenResult run_golden(const GoldenCase& c) {
  GoldenResult r;
  for (const auto& e : c.expected) {
    fs::path path = c.expected_dir() / e;
    if (!fs::exists(path)) throw Error(ErrorCode::MissingFixture, path.string() + " is missing");
    std::string want = read_file(path);
    std::string got = produce(c, e);
    if (want != got) {
      r.pass = false;
      r.mismatched.push_back(e);
      r.diff += unified_diff(want, got, e);
    }
  }
  return r;
}

/// Rewrites every expected file from the current pipeline output.
inline void bless(const GoldenCase& c) {
  for (const auto& e : c.expected) write_file(c.expected_dir() / e, produce(c, e));
}

/// Pairs of case names whose inputs are rewrites of one another
/// (`dialect_pairs.txt`, one "a b" pair per line).
inline std::vector<std::pair<std::string, std::string>> dialect_pairs(const fs::path& root) {
  fs::path file = root / "dialect_pairs.txt";
  if (!fs::exists(file)) throw Error(ErrorCode::MissingFixture, file.string() + " is missing");
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& line : text::split_lines(read_file(file))) {
    auto t = text::split_ws(line);
    if (t.empty() || t[0].front() == '#') continue;
    if (t.size() != 2) throw Error(ErrorCode::MissingFixture, "bad dialect pair line: " + line);
    out.emplace_back(t[0], t[1]);
  }
  return out;
}

}  // namespace netquery::corpus
