#pragma once

#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "json.hpp"
#include "netquery/config.hpp"
#include "netquery/querylang/syntax.hpp"
#include "netquery/text.hpp"

namespace netquery {

enum class RequirementKind { ExistPath, OrderedPath, LoadBalance, KConnected };

inline const std::vector<RequirementKind>& all_kinds() {
  static const std::vector<RequirementKind> kinds = {RequirementKind::ExistPath, RequirementKind::OrderedPath,
                                                     RequirementKind::LoadBalance, RequirementKind::KConnected};
  return kinds;
}

inline std::string to_string(RequirementKind k) {
  switch (k) {
    case RequirementKind::ExistPath: return "ExistPath";
    case RequirementKind::OrderedPath: return "OrderedPath";
    case RequirementKind::LoadBalance: return "LoadBalance";
    case RequirementKind::KConnected: return "KConnected";
  }
  return "?";
}

inline RequirementKind parse_kind(std::string_view s) {
  for (auto k : all_kinds())
    if (to_string(k) == s) return k;
  throw Error(ErrorCode::UnknownKind, "unknown requirement kind '" + std::string(s) + "'");
}

using Hops = std::vector<std::string>;

/// One checkable statement about the network. ExistPath carries one path,
/// the other kinds two paths with the same endpoints.
struct Requirement {
  RequirementKind kind = RequirementKind::ExistPath;
  std::vector<Hops> paths;
  bool positive = true;

  const std::string& src() const { return paths.at(0).front(); }
  const std::string& dst() const { return paths.at(0).back(); }

  // `positive` records how a sampler produced the requirement; the question text does not carry it
  friend bool operator==(const Requirement& a, const Requirement& b) { return a.kind == b.kind && a.paths == b.paths; }
};

inline void check_requirement(const Requirement& r) {
  std::size_t want = r.kind == RequirementKind::ExistPath ? 1 : 2;
  if (r.paths.size() != want)
    throw Error(ErrorCode::Usage, to_string(r.kind) + " needs " + std::to_string(want) + " path(s)");
  for (const auto& p : r.paths)
    if (p.empty()) throw Error(ErrorCode::Usage, "empty path in " + to_string(r.kind) + " requirement");
  if (want == 2 && (r.paths[0].front() != r.paths[1].front() || r.paths[0].back() != r.paths[1].back()))
    throw Error(ErrorCode::Usage, to_string(r.kind) + " paths must share both endpoints");
}

/// Python list literal, as used in questions and programs.
inline std::string path_literal(const Hops& hops) {
  std::string out = "[";
  for (std::size_t i = 0; i < hops.size(); ++i) out += (i ? ", " : "") + ql::quote(hops[i]);
  return out + "]";
}

// ---------------------------------------------------------------------------
// Deterministic compiler

namespace compiler {

inline std::string checks(const Requirement& r, const std::string& sfx) {
  std::string p1 = "p1" + sfx, p2 = "p2" + sfx;
  std::string out;
  switch (r.kind) {
    case RequirementKind::ExistPath:
      out += p1 + " = " + path_literal(r.paths[0]) + "\n";
      out += "if ExistPath(" + p1 + ") is None:\n    answer = False\n";
      break;
    case RequirementKind::OrderedPath: {
      std::string e1 = "exist_" + p1, e2 = "exist_" + p2, res = "res" + sfx;
      out += p1 + " = " + path_literal(r.paths[0]) + "\n";
      out += p2 + " = " + path_literal(r.paths[1]) + "\n";
      out += e1 + " = ExistPath(" + p1 + ")\n";
      out += e2 + " = ExistPath(" + p2 + ")\n";
      out += "if " + e1 + " is None or " + e2 + " is None:\n    answer = False\n";
      out += res + " = TraceRoute(" + ql::quote(r.src()) + ", " + ql::quote(r.dst()) + ")\n";
      out += "if " + res + " != " + p1 + ":\n    answer = False\n";
      break;
    }
    case RequirementKind::LoadBalance: {
      std::string best = "best" + sfx;
      out += p1 + " = " + path_literal(r.paths[0]) + "\n";
      out += p2 + " = " + path_literal(r.paths[1]) + "\n";
      out += best + " = EqualBestPaths(" + ql::quote(r.src()) + ", " + ql::quote(r.dst()) + ")\n";
      out += "if " + p1 + " == " + p2 + " or " + p1 + " not in " + best + " or " + p2 + " not in " + best +
             ":\n    answer = False\n";
      out += "if len(" + best + ") < 2:\n    answer = False\n";
      break;
    }
    case RequirementKind::KConnected: {
      std::string hop = "hop" + sfx;
      out += p1 + " = " + path_literal(r.paths[0]) + "\n";
      out += p2 + " = " + path_literal(r.paths[1]) + "\n";
      out += "if ExistPath(" + p1 + ") is None or ExistPath(" + p2 + ") is None:\n    answer = False\n";
      out += "if " + p1 + " == " + p2 + " or " + p1 + "[0] != " + p2 + "[0] or " + p1 + "[-1] != " + p2 +
             "[-1]:\n    answer = False\n";
      out += "for " + hop + " in " + p1 + ":\n";
      out += "    if " + hop + " != " + p1 + "[0] and " + hop + " != " + p1 + "[-1] and " + hop + " in " + p2 +
             ":\n        answer = False\n";
      break;
    }
  }
  return out;
}

}  // namespace compiler

/// Canonical program text for one requirement.
inline std::string compile_source(const Requirement& r) {
  check_requirement(r);
  if (r.kind == RequirementKind::ExistPath)
    return "answer = ExistPath(" + path_literal(r.paths[0]) + ") is not None\n";
  return "answer = True\n" + compiler::checks(r, "") + "return answer\n";
}

/// Several requirements answered together: true only if all hold.
inline std::string compile_bundle_source(const std::vector<Requirement>& rs) {
  if (rs.size() == 1) return compile_source(rs[0]);
  std::string out = "answer = True\n";
  for (std::size_t i = 0; i < rs.size(); ++i) {
    check_requirement(rs[i]);
    out += compiler::checks(rs[i], "_" + std::to_string(i + 1));
  }
  return out + "return answer\n";
}

inline ql::Program compile_bundle(const std::vector<Requirement>& rs) {
  return ql::parse_program(compile_bundle_source(rs));
}

// ---------------------------------------------------------------------------
// Question templates

struct QuestionTemplate {
  RequirementKind kind;
  std::string text;
};

inline std::vector<QuestionTemplate> load_templates(const std::string& json_text) {
  std::vector<QuestionTemplate> out;
  auto j = nlohmann::json::parse(json_text);
  for (auto k : all_kinds())
    for (const auto& t : j.at(to_string(k))) out.push_back({k, t.get<std::string>()});
  return out;
}

inline const std::vector<QuestionTemplate>& question_templates() {
  static const std::vector<QuestionTemplate> t = load_templates(read_data_file("templates/questions.json"));
  return t;
}

inline std::vector<QuestionTemplate> templates_for(RequirementKind k) {
  std::vector<QuestionTemplate> out;
  for (const auto& t : question_templates())
    if (t.kind == k) out.push_back(t);
  return out;
}

inline std::string render_question(const QuestionTemplate& t, const Requirement& r) {
  check_requirement(r);
  std::string s = t.text;
  auto put = [&](const std::string& key, const std::string& value) {
    for (std::size_t pos; (pos = s.find(key)) != std::string::npos;) s.replace(pos, key.size(), value);
  };
  put("{path1}", path_literal(r.paths[0]));
  put("{path2}", path_literal(r.paths.size() > 1 ? r.paths[1] : r.paths[0]));
  put("{path}", path_literal(r.paths[0]));
  put("{src}", r.src());
  put("{dst}", r.dst());
  put("{start}", r.src());
  put("{end}", r.dst());
  return s;
}

namespace compiler {

inline std::optional<Hops> parse_path_literal(std::string_view s) {
  s = text::trim(s);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') return std::nullopt;
  Hops hops;
  for (auto part : text::split(s.substr(1, s.size() - 2), ',')) {
    std::string item(text::trim(part));
    if (item.size() >= 2 && (item.front() == '\'' || item.front() == '"') && item.back() == item.front())
      item = item.substr(1, item.size() - 2);
    if (item.empty()) return std::nullopt;
    hops.push_back(item);
  }
  if (hops.empty()) return std::nullopt;
  return hops;
}

struct CompiledTemplate {
  RequirementKind kind;
  std::regex pattern;
  std::vector<std::string> slots;
};

inline CompiledTemplate compile_template(const QuestionTemplate& t) {
  static const std::regex placeholder(R"(\{(path1|path2|path|src|dst|start|end)\})");
  CompiledTemplate c{t.kind, {}, {}};
  std::string re = "^\\s*";
  std::size_t last = 0;
  auto escape = [](std::string_view lit) {
    std::string out;
    for (char ch : lit) {
      if (std::string_view(".^$|()[]{}*+?\\").find(ch) != std::string_view::npos) out += '\\';
      if (ch == ' ') {
        out += "\\s+";
        continue;
      }
      out += ch;
    }
    return out;
  };
  for (auto it = std::sregex_iterator(t.text.begin(), t.text.end(), placeholder); it != std::sregex_iterator();
       ++it) {
    re += escape(std::string_view(t.text).substr(last, static_cast<std::size_t>(it->position()) - last));
    std::string slot = (*it)[1];
    re += slot.rfind("path", 0) == 0 ? R"((\[[^\]]*\]))" : R"((\S+?))";
    c.slots.push_back(slot);
    last = static_cast<std::size_t>(it->position() + it->length());
  }
  re += escape(std::string_view(t.text).substr(last)) + "\\s*$";
  c.pattern = std::regex(re, std::regex::icase);
  return c;
}

inline const std::vector<CompiledTemplate>& compiled_templates() {
  static const std::vector<CompiledTemplate> all = [] {
    std::vector<CompiledTemplate> out;
    for (const auto& t : question_templates()) out.push_back(compile_template(t));
    return out;
  }();
  return all;
}

}  // namespace compiler

/// Recognizes a single templated question.
inline std::optional<Requirement> match_question(std::string_view question) {
  std::string q(text::trim(question));
  for (const auto& t : compiler::compiled_templates()) {
    std::smatch m;
    if (!std::regex_match(q, m, t.pattern)) continue;
    Requirement r;
    r.kind = t.kind;
    std::map<std::string, std::string> names;
    Hops p1, p2;
    bool ok = true;
    for (std::size_t i = 0; i < t.slots.size(); ++i) {
      const std::string& slot = t.slots[i];
      std::string value = m[static_cast<int>(i) + 1];
      if (slot.rfind("path", 0) == 0) {
        auto hops = compiler::parse_path_literal(value);
        if (!hops) ok = false;
        else (slot == "path2" ? p2 : p1) = *hops;
      } else {
        names[slot] = value;
      }
    }
    if (!ok) continue;
    r.paths.push_back(p1);
    if (t.kind != RequirementKind::ExistPath) r.paths.push_back(p2);
    std::string src = names.count("src") ? names["src"] : names["start"];
    std::string dst = names.count("dst") ? names["dst"] : names["end"];
    if (!src.empty() && (src != r.src() || dst != r.dst())) continue;
    try {
      check_requirement(r);
    } catch (const Error&) {
      continue;
    }
    return r;
  }
  return std::nullopt;
}

/// Recognizes one question, or several given one per line (optionally
/// numbered "(1) ...").
inline std::optional<std::vector<Requirement>> match_questions(std::string_view text_block) {
  static const std::regex numbered(R"(^\s*\(?\d+[).]\s*)");
  std::vector<Requirement> out;
  for (const auto& raw : text::split_lines(text_block)) {
    std::string line(text::trim(raw));
    if (line.empty()) continue;
    line = std::regex_replace(line, numbered, "", std::regex_constants::format_first_only);
    auto r = match_question(line);
    if (!r) return std::nullopt;
    out.push_back(*r);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

/// Deterministic program for a templated question. `params` may be left
/// empty, in which case the parameters are read from the question text.
inline ql::Program compile_question(const std::string& question, RequirementKind kind,
                                    const std::optional<Requirement>& params = std::nullopt) {
  Requirement r;
  if (params) {
    r = *params;
  } else {
    auto m = match_question(question);
    if (!m || m->kind != kind)
      throw Error(ErrorCode::Usage, "question does not match a " + to_string(kind) + " template");
    r = *m;
  }
  r.kind = kind;
  return ql::parse_program(compile_source(r));
}

/// Overload taking the kind by name; unknown names raise UnknownKind.
inline ql::Program compile_question(const std::string& question, std::string_view kind,
                                    const std::optional<Requirement>& params = std::nullopt) {
  return compile_question(question, parse_kind(kind), params);
}

}  // namespace netquery
