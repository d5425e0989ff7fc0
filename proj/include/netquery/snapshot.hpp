#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "netquery/error.hpp"
#include "netquery/text.hpp"

namespace netquery {

enum class Dialect { CiscoIOS, Huawei, Juniper, H3C, Aruba, Unknown };

inline std::string_view to_string(Dialect d) {
  switch (d) {
    case Dialect::CiscoIOS: return "CiscoIOS";
    case Dialect::Huawei: return "Huawei";
    case Dialect::Juniper: return "Juniper";
    case Dialect::H3C: return "H3C";
    case Dialect::Aruba: return "Aruba";
    case Dialect::Unknown: return "Unknown";
  }
  return "Unknown";
}

namespace detail {

inline bool any_line(std::string_view doc, auto&& pred) {
  for (const auto& raw : text::split_lines(doc)) {
    if (pred(text::strip_cr(raw))) return true;
  }
  return false;
}

inline bool starts_word(std::string_view line, std::string_view word) {
  line = text::trim(line);
  return text::starts_with(line, word) && (line.size() == word.size() || line[word.size()] == ' ' ||
                                           line[word.size()] == '\t' || line[word.size()] == '{');
}

}  // namespace detail

/// Ordered first-match keyword signatures. More specific vendors are tried
/// before the Cisco-like catch-all because Aruba and Cisco share keywords.
inline Dialect detect_dialect(std::string_view doc) {
  using detail::any_line;
  using detail::starts_word;

  bool juniper = any_line(doc, [](std::string_view l) {
    auto t = text::trim(l);
    for (std::string_view top : {"protocols", "interfaces", "policy-options", "system", "routing-options"}) {
      if (text::starts_with(t, top)) {
        auto rest = text::trim(t.substr(top.size()));
        if (rest == "{") return true;
      }
    }
    return false;
  });
  if (juniper) return Dialect::Juniper;

  bool sysname = any_line(doc, [](std::string_view l) { return starts_word(l, "sysname"); });
  if (sysname) {
    bool comware = any_line(doc, [](std::string_view l) {
      auto t = text::trim(l);
      return (text::starts_with(t, "version ") && t.find(", Release") != std::string_view::npos) ||
             t.find("display current-configuration") != std::string_view::npos;
    });
    if (comware) return Dialect::H3C;
    bool hash_delims = any_line(doc, [](std::string_view l) { return text::trim(l) == "#"; });
    if (hash_delims) return Dialect::Huawei;
  }

  bool hostname = any_line(doc, [](std::string_view l) { return starts_word(l, "hostname"); });
  if (hostname) {
    bool aruba = doc.find("ArubaOS") != std::string_view::npos || any_line(doc, [](std::string_view l) {
                   auto toks = text::split_ws(l);
                   if (toks.size() < 2 || toks[0] != "interface" || l.empty() || l[0] == ' ') return false;
                   int slashes = static_cast<int>(std::count(toks[1].begin(), toks[1].end(), '/'));
                   return slashes == 2 && std::isdigit(static_cast<unsigned char>(toks[1][0]));
                 });
    if (aruba) return Dialect::Aruba;
  }

  bool cisco = hostname || any_line(doc, [](std::string_view l) {
                 return starts_word(l, "router") || starts_word(l, "route-map") || text::trim(l) == "!" ||
                        text::starts_with(text::trim(l), "ip prefix-list");
               });
  return cisco ? Dialect::CiscoIOS : Dialect::Unknown;
}

/// One router's configuration text with a line index.
struct ConfigDocument {
  std::string router;
  Dialect dialect = Dialect::Unknown;
  std::string raw_text;
  std::vector<std::pair<std::size_t, std::string>> line_index;  // 1-based, verbatim incl. any '\r'
  std::string source_path;

  static ConfigDocument from_text(std::string router, std::string raw, std::string source = {}) {
    ConfigDocument d;
    d.router = std::move(router);
    d.raw_text = std::move(raw);
    d.source_path = std::move(source);
    d.dialect = text::trim(d.raw_text).empty() ? Dialect::Unknown : detect_dialect(d.raw_text);
    auto lines = text::split_lines(d.raw_text);
    for (std::size_t i = 0; i < lines.size(); ++i) d.line_index.emplace_back(i + 1, std::move(lines[i]));
    return d;
  }

  /// Rebuilds the text from the line index (byte-identical up to a trailing newline).
  std::string serialize() const {
    std::string out;
    for (std::size_t i = 0; i < line_index.size(); ++i) {
      if (i) out += '\n';
      out += line_index[i].second;
    }
    if (!raw_text.empty() && raw_text.back() == '\n') out += '\n';
    return out;
  }

  /// Line text with any trailing '\r' removed.
  std::string_view line(std::size_t number) const { return text::strip_cr(line_index.at(number - 1).second); }
  std::size_t line_count() const { return line_index.size(); }
};

/// Hostname declared inside the document, if any.
inline std::optional<std::string> declared_hostname(std::string_view doc, Dialect dialect) {
  for (const auto& raw : text::split_lines(doc)) {
    auto toks = text::split_ws(text::strip_cr(raw));
    if (toks.size() < 2) continue;
    if ((dialect == Dialect::Huawei || dialect == Dialect::H3C) && toks[0] == "sysname") return toks[1];
    if (dialect == Dialect::Juniper && toks[0] == "host-name") {
      std::string name = toks[1];
      if (!name.empty() && name.back() == ';') name.pop_back();
      return name;
    }
    if (toks[0] == "hostname" && dialect != Dialect::Juniper) return toks[1];
  }
  return std::nullopt;
}

struct ConfigSnapshot {
  std::string name;
  std::map<std::string, ConfigDocument> routers;
  std::optional<std::vector<std::pair<std::string, std::string>>> declared_links;
  std::vector<std::string> warnings;

  void check_invariants() const {
    for (const auto& [name, doc] : routers) {
      if (name.empty()) throw Error(ErrorCode::InvalidTopology, "empty router name");
      if (doc.router != name) throw Error(ErrorCode::InvalidTopology, "router key mismatch for " + name);
    }
    if (declared_links) {
      for (const auto& [a, b] : *declared_links) {
        if (!routers.count(a) || !routers.count(b))
          throw Error(ErrorCode::InvalidTopology, "link " + a + "-" + b + " names an unknown router");
      }
    }
  }

  /// Adds a document, resolving the router name from the hostname statement
  /// when present and falling back to `fallback_name`.
  void add_document(const std::string& fallback_name, std::string raw, std::string source = {}) {
    Dialect dialect = text::trim(raw).empty() ? Dialect::Unknown : detect_dialect(raw);
    std::string router = fallback_name;
    if (auto host = declared_hostname(raw, dialect)) {
      if (*host != fallback_name)
        warnings.push_back("hostname '" + *host + "' overrides file name '" + fallback_name + "'");
      router = *host;
    }
    if (routers.count(router))
      throw Error(ErrorCode::DuplicateRouter, "two configurations resolve to router '" + router + "'");
    routers.emplace(router, ConfigDocument::from_text(router, std::move(raw), std::move(source)));
  }
};

inline bool has_config_extension(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  return ext == ".cfg" || ext == ".conf" || ext == ".txt";
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, std::string_view content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
  out << content;
}

/// Loads `<dir>/configs/*.{cfg,conf,txt}` (or the files directly inside `dir`
/// when there is no configs/ subdirectory) plus optional `<dir>/topology.json`.
inline ConfigSnapshot load_snapshot(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::EmptySnapshot, "no snapshot directory at " + dir.string());
  fs::path config_dir = fs::is_directory(dir / "configs") ? dir / "configs" : dir;

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(config_dir)) {
    if (entry.is_regular_file() && has_config_extension(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorCode::EmptySnapshot, "no configuration files in " + config_dir.string());

  ConfigSnapshot snap;
  snap.name = fs::absolute(dir).lexically_normal().filename().string();
  if (snap.name.empty()) snap.name = fs::absolute(dir).lexically_normal().parent_path().filename().string();
  for (const auto& f : files) snap.add_document(f.stem().string(), read_file(f), f.string());

  fs::path topo = dir / "topology.json";
  if (fs::exists(topo)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(topo));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidTopology, std::string("topology.json: ") + e.what());
    }
    std::vector<std::pair<std::string, std::string>> links;
    for (const auto& link : j.value("links", nlohmann::json::array())) {
      if (!link.is_array() || link.size() != 2)
        throw Error(ErrorCode::InvalidTopology, "topology.json: each link must be a two-element array");
      links.emplace_back(link[0].get<std::string>(), link[1].get<std::string>());
    }
    snap.declared_links = std::move(links);
  }
  snap.check_invariants();
  return snap;
}

/// Writes a snapshot in the on-disk layout `load_snapshot` accepts.
inline void write_snapshot(const ConfigSnapshot& snap, const std::filesystem::path& dir) {
  for (const auto& [name, doc] : snap.routers) write_file(dir / "configs" / (name + ".cfg"), doc.raw_text);
  if (snap.declared_links) {
    nlohmann::json links = nlohmann::json::array();
    for (const auto& [a, b] : *snap.declared_links) links.push_back({a, b});
    write_file(dir / "topology.json", nlohmann::json{{"links", links}}.dump(2) + "\n");
  }
}

}  // namespace netquery
