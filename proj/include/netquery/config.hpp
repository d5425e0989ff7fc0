#pragma once

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "netquery/error.hpp"
#include "netquery/snapshot.hpp"

namespace netquery {

/// Runtime settings. Read from a JSON file, then overridden by NETQUERY_*
/// environment variables. Credentials never come from anywhere else.
struct Settings {
  std::string endpoint_url;  // e.g. http://127.0.0.1:8080/v1/complete
  std::string model;
  std::string api_key;
  int concurrency = 4;
  int timeout_ms = 30000;
  std::string data_dir;
  long long statement_cap = 100000;
  int wall_clock_ms = 10000;
  int default_ospf_cost = 1;

  bool has_endpoint() const { return !endpoint_url.empty(); }
};

inline std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

inline Settings load_settings(const std::optional<std::filesystem::path>& file = std::nullopt) {
  Settings s;
  std::optional<std::filesystem::path> path = file;
  if (!path) {
    if (auto p = env("NETQUERY_CONFIG")) path = *p;
    else if (std::filesystem::exists("netquery.json")) path = "netquery.json";
  }
  if (path) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(*path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Usage, path->string() + ": " + e.what());
    }
    s.endpoint_url = j.value("endpoint_url", s.endpoint_url);
    s.model = j.value("model", s.model);
    s.api_key = j.value("api_key", s.api_key);
    s.concurrency = j.value("concurrency", s.concurrency);
    s.timeout_ms = j.value("timeout_ms", s.timeout_ms);
    s.data_dir = j.value("data_dir", s.data_dir);
    s.statement_cap = j.value("statement_cap", s.statement_cap);
    s.wall_clock_ms = j.value("wall_clock_ms", s.wall_clock_ms);
    s.default_ospf_cost = j.value("default_ospf_cost", s.default_ospf_cost);
  }
  if (auto v = env("NETQUERY_ENDPOINT")) s.endpoint_url = *v;
  if (auto v = env("NETQUERY_MODEL")) s.model = *v;
  if (auto v = env("NETQUERY_API_KEY")) s.api_key = *v;
  if (auto v = env("NETQUERY_CONCURRENCY")) s.concurrency = std::max(1, std::atoi(v->c_str()));
  if (auto v = env("NETQUERY_DATA_DIR")) s.data_dir = *v;
  return s;
}

/// Directory holding rules/, prompts/ and templates/.
inline std::filesystem::path data_dir() {
  if (auto v = env("NETQUERY_DATA_DIR")) return *v;
#ifdef NETQUERY_DATA_DIR
  return NETQUERY_DATA_DIR;
#else
  return "data";
#endif
}

inline std::string read_data_file(const std::string& relative) {
  return read_file(data_dir() / relative);
}

}  // namespace netquery
