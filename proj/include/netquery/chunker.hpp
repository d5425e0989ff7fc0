#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "netquery/error.hpp"
#include "netquery/ipv4.hpp"
#include "netquery/snapshot.hpp"
#include "netquery/text.hpp"

namespace netquery {

enum class BlockKind { Interface, RouteMap, IPPrefixList, CommunityList, RouterProcess, Hostname, Other };

inline std::string_view to_string(BlockKind k) {
  switch (k) {
    case BlockKind::Interface: return "Interface";
    case BlockKind::RouteMap: return "RouteMap";
    case BlockKind::IPPrefixList: return "IPPrefixList";
    case BlockKind::CommunityList: return "CommunityList";
    case BlockKind::RouterProcess: return "RouterProcess";
    case BlockKind::Hostname: return "Hostname";
    case BlockKind::Other: return "Other";
  }
  return "Other";
}

/// A reference from one statement of a block to a definition elsewhere.
/// Named references match a block identifier of `target` kind; range
/// references (OSPF network statements) match interfaces by address.
struct BlockReference {
  BlockKind target = BlockKind::Other;
  std::string name;
  std::optional<WildcardRange> range;
  std::size_t line = 0;        // document line of the statement
  std::size_t extent_end = 0;  // last document line the statement spans
  std::vector<std::size_t> targets;  // resolved block ids (filled by link_dependencies)
};

struct ConfigBlock {
  std::size_t id = 0;
  BlockKind kind = BlockKind::Other;
  std::optional<std::string> identifier;
  std::pair<std::size_t, std::size_t> span{0, 0};
  std::string text;
  Dialect dialect = Dialect::Unknown;
  std::vector<std::size_t> lines;  // document line numbers, ascending
  std::vector<std::string> line_text;  // verbatim text of `lines`
  std::string container;           // enclosing Junos stanza ("protocols"), empty otherwise
  std::vector<Ipv4> addresses;     // interface addresses declared in the block
  std::vector<BlockReference> references;
};

struct DependencyTree {
  std::vector<ConfigBlock> nodes;                          // indexed by block id
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (from, to): from references to
  std::vector<std::size_t> roots;

  std::vector<std::size_t> children(std::size_t id) const {
    std::vector<std::size_t> out;
    for (const auto& [a, b] : edges)
      if (a == id) out.push_back(b);
    std::sort(out.begin(), out.end(), [&](std::size_t x, std::size_t y) {
      return nodes[x].span.first < nodes[y].span.first;
    });
    return out;
  }
};

struct ConfigChunk {
  std::string router;
  Dialect dialect = Dialect::Unknown;
  std::size_t index = 0;
  std::vector<ConfigBlock> path_blocks;  // root-to-leaf path, then closure blocks
  std::size_t path_length = 0;           // leading entries of path_blocks that form the path
  std::string text;

  std::string id() const { return router + "#" + std::to_string(index); }
};

namespace chunking {

/// Block text; Junos children are re-wrapped in their container stanza so a
/// chunk stays parseable on its own.
inline std::string render(const ConfigBlock& b) {
  std::string out;
  if (!b.container.empty()) out += b.container + " {\n";
  for (std::size_t i = 0; i < b.line_text.size(); ++i) {
    if (i) out += '\n';
    out += b.line_text[i];
  }
  if (!b.container.empty()) out += "\n}";
  return out;
}

inline std::string strip_semicolon(std::string s) {
  while (!s.empty() && (s.back() == ';' || s.back() == '{' || s.back() == '}')) s.pop_back();
  return s;
}

/// Juniper logical interface "ge-0/0/0.0" names the physical interface when unit is 0.
inline std::string juniper_interface_name(std::string name) {
  name = strip_semicolon(std::move(name));
  if (text::ends_with(name, ".0")) name.resize(name.size() - 2);
  return name;
}

struct Builder {
  const ConfigDocument& doc;
  std::vector<ConfigBlock> blocks;

  ConfigBlock& open(BlockKind kind, std::optional<std::string> ident) {
    if (ident && (kind == BlockKind::RouteMap || kind == BlockKind::IPPrefixList ||
                  kind == BlockKind::CommunityList)) {
      for (auto& b : blocks)
        if (b.kind == kind && b.identifier == ident) return b;
    }
    ConfigBlock b;
    b.id = blocks.size();
    b.kind = kind;
    b.identifier = std::move(ident);
    b.dialect = doc.dialect;
    blocks.push_back(std::move(b));
    return blocks.back();
  }

  std::vector<ConfigBlock> finish() {
    for (auto& b : blocks) {
      std::sort(b.lines.begin(), b.lines.end());
      b.span = {b.lines.front(), b.lines.back()};
      for (auto ln : b.lines) b.line_text.emplace_back(doc.line(ln));
      b.text = render(b);
    }
    std::stable_sort(blocks.begin(), blocks.end(),
                     [](const ConfigBlock& a, const ConfigBlock& b) { return a.span.first < b.span.first; });
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].id = i;
    return std::move(blocks);
  }
};

// ---- Cisco IOS / Aruba (indentation + '!') --------------------------------

inline std::pair<BlockKind, std::optional<std::string>> classify_cisco(const std::vector<std::string>& t) {
  if (t.empty()) return {BlockKind::Other, std::nullopt};
  if (t[0] == "hostname" && t.size() >= 2) return {BlockKind::Hostname, t[1]};
  if (t[0] == "interface" && t.size() >= 2) {
    std::string name;
    for (std::size_t i = 1; i < t.size(); ++i) name += t[i];
    return {BlockKind::Interface, name};
  }
  if (t[0] == "route-map" && t.size() >= 2) return {BlockKind::RouteMap, t[1]};
  if (t[0] == "ip" && t.size() >= 3 && t[1] == "prefix-list") return {BlockKind::IPPrefixList, t[2]};
  if (t[0] == "ip" && t.size() >= 3 && t[1] == "community-list") {
    std::size_t i = (t.size() >= 4 && (t[2] == "standard" || t[2] == "expanded")) ? 3 : 2;
    return {BlockKind::CommunityList, t[i]};
  }
  if (t[0] == "router" && t.size() >= 2) {
    std::string id = t[1];
    if (t.size() >= 3) id += " " + t[2];
    return {BlockKind::RouterProcess, id};
  }
  return {BlockKind::Other, std::nullopt};
}

inline void cisco_references(ConfigBlock& b, const ConfigDocument& doc) {
  for (std::size_t ln : b.lines) {
    auto t = text::split_ws(doc.line(ln));
    if (t.empty()) continue;
    auto add = [&](BlockKind kind, const std::string& name) {
      b.references.push_back({kind, name, std::nullopt, ln, ln, {}});
    };
    switch (b.kind) {
      case BlockKind::RouterProcess:
        if (t[0] == "neighbor" && t.size() >= 4 && t[2] == "route-map") add(BlockKind::RouteMap, t[3]);
        if (t[0] == "neighbor" && t.size() >= 4 && t[2] == "prefix-list") add(BlockKind::IPPrefixList, t[3]);
        if (t[0] == "network" && t.size() >= 3 && b.identifier && text::starts_with(*b.identifier, "ospf")) {
          auto base = Ipv4::parse(t[1]);
          auto wc = Ipv4::parse(t[2]);
          if (base && wc) b.references.push_back({BlockKind::Interface, t[1], WildcardRange{*base, *wc}, ln, ln, {}});
        }
        if (t[0] == "redistribute") {
          for (std::size_t i = 0; i + 1 < t.size(); ++i)
            if (t[i] == "route-map") add(BlockKind::RouteMap, t[i + 1]);
        }
        break;
      case BlockKind::RouteMap:
        if (t[0] == "match" && t.size() >= 5 && t[1] == "ip" && t[2] == "address" && t[3] == "prefix-list") {
          for (std::size_t i = 4; i < t.size(); ++i) add(BlockKind::IPPrefixList, t[i]);
        }
        if (t[0] == "match" && t.size() >= 3 && t[1] == "community") {
          for (std::size_t i = 2; i < t.size(); ++i)
            if (t[i] != "exact-match") add(BlockKind::CommunityList, t[i]);
        }
        break;
      case BlockKind::Interface:
        if (t.size() >= 4 && t[0] == "ip" && t[1] == "policy" && t[2] == "route-map") add(BlockKind::RouteMap, t[3]);
        if (t.size() >= 3 && t[0] == "ip" && t[1] == "address") {
          if (auto p = Ipv4Prefix::try_parse(t[2])) b.addresses.push_back(p->address);
          else if (auto a = Ipv4::parse(t[2])) b.addresses.push_back(*a);
        }
        break;
      default: break;
    }
  }
}

inline std::vector<ConfigBlock> split_cisco(const ConfigDocument& doc) {
  Builder bld{doc, {}};
  std::optional<std::size_t> current;
  for (std::size_t ln = 1; ln <= doc.line_count(); ++ln) {
    std::string_view l = doc.line(ln);
    auto t = text::trim(l);
    if (t.empty()) continue;
    if (t.front() == '!') {
      current.reset();
      continue;
    }
    if (text::indent_of(l) == 0) {
      auto toks = text::split_ws(t);
      auto [kind, ident] = classify_cisco(toks);
      ConfigBlock& b = bld.open(kind, ident);
      b.lines.push_back(ln);
      current = b.id;
    } else if (current) {
      bld.blocks[*current].lines.push_back(ln);
    } else {
      ConfigBlock& b = bld.open(BlockKind::Other, std::nullopt);
      b.lines.push_back(ln);
      current = b.id;
    }
  }
  auto blocks = bld.finish();
  for (auto& b : blocks) cisco_references(b, doc);
  return blocks;
}

// ---- Huawei VRP / H3C Comware ('#' delimited) ------------------------------

inline std::pair<BlockKind, std::optional<std::string>> classify_vrp(const std::vector<std::string>& t) {
  if (t.empty()) return {BlockKind::Other, std::nullopt};
  if (t[0] == "sysname" && t.size() >= 2) return {BlockKind::Hostname, t[1]};
  if (t[0] == "interface" && t.size() >= 2) {
    std::string name;
    for (std::size_t i = 1; i < t.size(); ++i) name += t[i];
    return {BlockKind::Interface, name};
  }
  if (t[0] == "route-policy" && t.size() >= 2) return {BlockKind::RouteMap, t[1]};
  if (t[0] == "ip" && t.size() >= 3 && (t[1] == "ip-prefix" || t[1] == "prefix-list"))
    return {BlockKind::IPPrefixList, t[2]};
  if (t[0] == "ip" && t.size() >= 3 && (t[1] == "community-filter" || t[1] == "community-list")) {
    std::size_t i = (t.size() >= 4 && (t[2] == "basic" || t[2] == "advanced")) ? 3 : 2;
    return {BlockKind::CommunityList, t[i]};
  }
  if ((t[0] == "ospf" || t[0] == "bgp") && t.size() >= 2) return {BlockKind::RouterProcess, t[0] + " " + t[1]};
  return {BlockKind::Other, std::nullopt};
}

inline void vrp_references(ConfigBlock& b, const ConfigDocument& doc) {
  for (std::size_t ln : b.lines) {
    auto t = text::split_ws(doc.line(ln));
    if (t.empty()) continue;
    auto add = [&](BlockKind kind, const std::string& name) {
      b.references.push_back({kind, name, std::nullopt, ln, ln, {}});
    };
    switch (b.kind) {
      case BlockKind::RouterProcess:
        if (t[0] == "peer" && t.size() >= 4 && t[2] == "route-policy") add(BlockKind::RouteMap, t[3]);
        if (t[0] == "peer" && t.size() >= 4 && (t[2] == "ip-prefix" || t[2] == "prefix-list"))
          add(BlockKind::IPPrefixList, t[3]);
        if (t[0] == "network" && t.size() >= 3 && b.identifier && text::starts_with(*b.identifier, "ospf")) {
          auto base = Ipv4::parse(t[1]);
          auto wc = Ipv4::parse(t[2]);
          if (base && wc) b.references.push_back({BlockKind::Interface, t[1], WildcardRange{*base, *wc}, ln, ln, {}});
        }
        break;
      case BlockKind::RouteMap:
        if (t[0] == "if-match" && t.size() >= 3 && (t[1] == "ip-prefix" || t[1] == "prefix-list"))
          add(BlockKind::IPPrefixList, t[2]);
        if (t[0] == "if-match" && t.size() >= 5 && t[1] == "ip" && t[2] == "address" && t[3] == "prefix-list")
          add(BlockKind::IPPrefixList, t[4]);
        if (t[0] == "if-match" && t.size() >= 3 && (t[1] == "community-filter" || t[1] == "community-list"))
          add(BlockKind::CommunityList, t[2]);
        break;
      case BlockKind::Interface:
        if (t.size() >= 3 && t[0] == "ip" && t[1] == "address") {
          if (auto p = Ipv4Prefix::try_parse(t[2])) b.addresses.push_back(p->address);
          else if (auto a = Ipv4::parse(t[2])) b.addresses.push_back(*a);
        }
        break;
      default: break;
    }
  }
}

inline std::vector<ConfigBlock> split_vrp(const ConfigDocument& doc) {
  Builder bld{doc, {}};
  std::optional<std::size_t> current;
  for (std::size_t ln = 1; ln <= doc.line_count(); ++ln) {
    std::string_view l = doc.line(ln);
    auto t = text::trim(l);
    if (t.empty()) continue;
    if (t.front() == '#') {
      current.reset();
      continue;
    }
    if (text::indent_of(l) == 0) {
      auto [kind, ident] = classify_vrp(text::split_ws(t));
      ConfigBlock& b = bld.open(kind, ident);
      b.lines.push_back(ln);
      current = b.id;
    } else if (current) {
      bld.blocks[*current].lines.push_back(ln);
    } else {
      // Comware's leading " version ..." banner and similar stray lines.
      ConfigBlock& b = bld.open(BlockKind::Other, std::nullopt);
      b.lines.push_back(ln);
      current = b.id;
    }
  }
  auto blocks = bld.finish();
  for (auto& b : blocks) vrp_references(b, doc);
  return blocks;
}

// ---- Juniper (brace depth) ------------------------------------------------

inline int brace_delta(std::string_view line) {
  int d = 0;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    if (quoted) continue;
    if (c == '#') break;
    if (c == '{') ++d;
    if (c == '}') --d;
  }
  return d;
}

inline void juniper_references(ConfigBlock& b, const ConfigDocument& doc) {
  // Stanza extents so a reference on a "name {" header covers its body.
  auto extent_of = [&](std::size_t idx) {
    int depth = brace_delta(doc.line(b.lines[idx]));
    if (depth <= 0) return b.lines[idx];
    for (std::size_t k = idx + 1; k < b.lines.size(); ++k) {
      depth += brace_delta(doc.line(b.lines[k]));
      if (depth <= 0) return b.lines[k];
    }
    return b.lines.back();
  };
  bool has_local_as = std::any_of(b.lines.begin(), b.lines.end(), [&](std::size_t ln) {
    auto t = text::split_ws(doc.line(ln));
    return !t.empty() && t[0] == "local-as";
  });
  for (std::size_t idx = 0; idx < b.lines.size(); ++idx) {
    std::size_t ln = b.lines[idx];
    std::string_view line = doc.line(ln);
    std::vector<std::string> t;
    for (auto& tok : text::split_ws(line)) {
      std::string s = strip_semicolon(tok);
      if (!s.empty() && s != "[" && s != "]") t.push_back(s);
    }
    if (t.empty()) continue;
    auto add = [&](BlockKind kind, const std::string& name) {
      b.references.push_back({kind, name, std::nullopt, ln, extent_of(idx), {}});
    };
    if (b.kind == BlockKind::RouterProcess) {
      // BGP without its own local-as takes the AS number from routing-options
      if (idx == 0 && t[0] == "bgp" && b.identifier == "bgp" && !has_local_as)
        add(BlockKind::RouterProcess, "routing-options");
      if (t[0] == "interface" && t.size() >= 2 && b.identifier == "ospf")
        add(BlockKind::Interface, juniper_interface_name(t[1]));
      if ((t[0] == "import" || t[0] == "export") && t.size() >= 2) {
        for (std::size_t i = 1; i < t.size(); ++i) add(BlockKind::RouteMap, t[i]);
      }
    } else if (b.kind == BlockKind::RouteMap) {
      for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (t[i] == "prefix-list" || t[i] == "prefix-list-filter") add(BlockKind::IPPrefixList, t[i + 1]);
        if (t[i] == "policy") add(BlockKind::RouteMap, t[i + 1]);
        if (t[i] == "community") {
          std::size_t j = i + 1;
          if ((t[j] == "add" || t[j] == "set" || t[j] == "delete") && j + 1 < t.size()) ++j;
          add(BlockKind::CommunityList, t[j]);
        }
      }
    } else if (b.kind == BlockKind::Interface) {
      if (t[0] == "address" && t.size() >= 2) {
        if (auto p = Ipv4Prefix::try_parse(t[1])) b.addresses.push_back(p->address);
      }
    }
  }
}

inline std::vector<ConfigBlock> split_juniper(const ConfigDocument& doc) {
  Builder bld{doc, {}};
  int depth = 0;
  std::string top;                      // current top-level stanza name
  std::optional<std::size_t> current;   // block collecting lines
  int block_depth = 0;                  // depth at which the current block started
  for (std::size_t ln = 1; ln <= doc.line_count(); ++ln) {
    std::string_view l = doc.line(ln);
    auto t = text::trim(l);
    int delta = brace_delta(l);
    if (t.empty() || t.front() == '#' || text::starts_with(t, "/*")) {
      depth += delta;
      continue;
    }
    auto toks = text::split_ws(t);
    for (auto& s : toks) s = strip_semicolon(s);

    if (current) {
      bld.blocks[*current].lines.push_back(ln);
      depth += delta;
      if (depth <= block_depth) current.reset();
      continue;
    }

    if (depth == 0) {
      top = toks.empty() ? "" : toks[0];
      bool container = top == "interfaces" || top == "protocols" || top == "policy-options";
      if (container && delta > 0) {
        depth += delta;
        continue;  // container line is a delimiter like Cisco's '!'
      }
      BlockKind kind = BlockKind::Other;
      std::optional<std::string> ident;
      if (top == "routing-options") {
        kind = BlockKind::RouterProcess;
        ident = top;
      } else if (top == "system") {
        if (auto h = declared_hostname(doc.raw_text, Dialect::Juniper)) {
          kind = BlockKind::Hostname;
          ident = *h;
        }
      }
      ConfigBlock& b = bld.open(kind, ident);
      b.lines.push_back(ln);
      block_depth = depth;
      depth += delta;
      if (depth > block_depth) current = b.id;
      continue;
    }

    if (depth == 1 && t == "}") {  // end of a container
      depth += delta;
      continue;
    }

    // depth 1 inside a container: each child stanza or statement is a block
    BlockKind kind = BlockKind::Other;
    std::optional<std::string> ident;
    if (top == "interfaces" && !toks.empty()) {
      kind = BlockKind::Interface;
      ident = toks[0];
    } else if (top == "protocols" && !toks.empty() && (toks[0] == "ospf" || toks[0] == "bgp")) {
      kind = BlockKind::RouterProcess;
      ident = toks[0];
    } else if (top == "policy-options" && toks.size() >= 2) {
      if (toks[0] == "policy-statement") {
        kind = BlockKind::RouteMap;
        ident = toks[1];
      } else if (toks[0] == "prefix-list") {
        kind = BlockKind::IPPrefixList;
        ident = toks[1];
      } else if (toks[0] == "community") {
        kind = BlockKind::CommunityList;
        ident = toks[1];
      }
    }
    ConfigBlock& b = bld.open(kind, ident);
    b.container = top;
    b.lines.push_back(ln);
    block_depth = depth;
    depth += delta;
    if (depth > block_depth) current = b.id;
  }
  auto blocks = bld.finish();
  for (auto& b : blocks) juniper_references(b, doc);
  return blocks;
}

// ---- Unknown dialect: blank-line paragraphs ---------------------------------

inline std::vector<ConfigBlock> split_paragraphs(const ConfigDocument& doc) {
  Builder bld{doc, {}};
  std::optional<std::size_t> current;
  for (std::size_t ln = 1; ln <= doc.line_count(); ++ln) {
    if (text::trim(doc.line(ln)).empty()) {
      current.reset();
      continue;
    }
    if (!current) current = bld.open(BlockKind::Other, std::nullopt).id;
    bld.blocks[*current].lines.push_back(ln);
  }
  return bld.finish();
}

}  // namespace chunking

/// Splits a document into blocks at the dialect's syntactic boundaries and
/// records each block's identifier and outgoing references.
inline std::vector<ConfigBlock> split_blocks(const ConfigDocument& doc) {
  switch (doc.dialect) {
    case Dialect::CiscoIOS:
    case Dialect::Aruba: return chunking::split_cisco(doc);
    case Dialect::Huawei:
    case Dialect::H3C: return chunking::split_vrp(doc);
    case Dialect::Juniper: return chunking::split_juniper(doc);
    case Dialect::Unknown: return chunking::split_paragraphs(doc);
  }
  return {};
}

/// Resolves every block reference to defining blocks (whole identifiers only)
/// and builds the reference graph. Throws CyclicReference on cycles.
inline DependencyTree link_dependencies(std::vector<ConfigBlock> blocks) {
  DependencyTree tree;
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].id = i;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (auto& b : blocks) {
    for (auto& ref : b.references) {
      ref.targets.clear();
      for (const auto& other : blocks) {
        if (other.id == b.id || other.kind != ref.target) continue;
        bool hit = false;
        if (ref.range) {
          hit = std::any_of(other.addresses.begin(), other.addresses.end(),
                            [&](Ipv4 a) { return ref.range->covers(a); });
        } else {
          hit = other.identifier && *other.identifier == ref.name;
        }
        if (hit) {
          ref.targets.push_back(other.id);
          edges.emplace(b.id, other.id);
        }
      }
    }
  }
  tree.nodes = std::move(blocks);
  tree.edges.assign(edges.begin(), edges.end());

  // Cycle check (iterative colouring DFS).
  std::vector<int> colour(tree.nodes.size(), 0);
  std::vector<std::vector<std::size_t>> adj(tree.nodes.size());
  for (const auto& [a, b] : tree.edges) adj[a].push_back(b);
  std::vector<std::size_t> stack;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    colour[v] = 1;
    stack.push_back(v);
    for (auto w : adj[v]) {
      if (colour[w] == 1) {
        std::string cycle;
        auto it = std::find(stack.begin(), stack.end(), w);
        for (; it != stack.end(); ++it) cycle += tree.nodes[*it].identifier.value_or("?") + " -> ";
        cycle += tree.nodes[w].identifier.value_or("?");
        throw Error(ErrorCode::CyclicReference, "reference cycle " + cycle);
      }
      if (colour[w] == 0) visit(w);
    }
    stack.pop_back();
    colour[v] = 2;
  };
  for (std::size_t v = 0; v < tree.nodes.size(); ++v)
    if (colour[v] == 0) visit(v);

  std::vector<bool> has_incoming(tree.nodes.size(), false);
  for (const auto& [a, b] : tree.edges) has_incoming[b] = true;
  for (std::size_t v = 0; v < tree.nodes.size(); ++v)
    if (!has_incoming[v]) tree.roots.push_back(v);
  return tree;
}

namespace chunking {

/// Process and interface blocks consist of independent statements, so on a
/// path they keep only statements whose references include the next block.
inline bool separable(BlockKind k) { return k == BlockKind::RouterProcess || k == BlockKind::Interface; }

inline ConfigBlock project(const ConfigBlock& b, std::size_t next) {
  std::set<std::size_t> drop;
  for (const auto& ref : b.references) {
    if (ref.targets.empty()) continue;
    if (ref.line == b.lines.front()) continue;  // header references apply to the whole block
    if (std::find(ref.targets.begin(), ref.targets.end(), next) != ref.targets.end()) continue;
    // keep the statement if another reference on the same line points at next
    bool line_hits_next = std::any_of(b.references.begin(), b.references.end(), [&](const BlockReference& r) {
      return r.line == ref.line && std::find(r.targets.begin(), r.targets.end(), next) != r.targets.end();
    });
    if (line_hits_next) continue;
    for (std::size_t ln = ref.line; ln <= ref.extent_end; ++ln) drop.insert(ln);
  }
  if (drop.empty()) return b;
  ConfigBlock out = b;
  out.lines.clear();
  out.line_text.clear();
  out.references.clear();
  for (std::size_t i = 0; i < b.lines.size(); ++i) {
    if (drop.count(b.lines[i])) continue;
    out.lines.push_back(b.lines[i]);
    out.line_text.push_back(b.line_text[i]);
  }
  out.text = render(out);
  for (const auto& ref : b.references)
    if (!drop.count(ref.line)) out.references.push_back(ref);
  return out;
}

}  // namespace chunking

/// One chunk per root-to-leaf path (roots in document order, children by
/// span). Blocks shared by several paths are duplicated into each; any
/// definition a path block still references but the path does not contain is
/// appended after the path so every chunk is self-contained.
inline std::vector<ConfigChunk> extract_chunks(const DependencyTree& tree, const std::string& router) {
  std::vector<ConfigChunk> out;
  std::vector<std::size_t> path;

  auto emit = [&]() {
    ConfigChunk chunk;
    chunk.router = router;
    chunk.dialect = tree.nodes[path.front()].dialect;
    chunk.index = out.size();
    std::set<std::size_t> present;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const ConfigBlock& b = tree.nodes[path[i]];
      if (i + 1 < path.size() && chunking::separable(b.kind))
        chunk.path_blocks.push_back(chunking::project(b, path[i + 1]));
      else
        chunk.path_blocks.push_back(b);
      present.insert(path[i]);
    }
    chunk.path_length = chunk.path_blocks.size();
    // closure of references not satisfied by the path (breadth-first, by span)
    std::vector<std::size_t> frontier;
    auto want = [&](const ConfigBlock& b) {
      for (const auto& ref : b.references)
        for (auto t : ref.targets)
          if (!present.count(t)) {
            present.insert(t);
            frontier.push_back(t);
          }
    };
    for (const auto& b : chunk.path_blocks) want(b);
    while (!frontier.empty()) {
      std::sort(frontier.begin(), frontier.end(),
                [&](std::size_t x, std::size_t y) { return tree.nodes[x].span.first < tree.nodes[y].span.first; });
      auto batch = std::move(frontier);
      frontier.clear();
      for (auto id : batch) {
        chunk.path_blocks.push_back(tree.nodes[id]);
        want(tree.nodes[id]);
      }
    }
    for (std::size_t i = 0; i < chunk.path_blocks.size(); ++i) {
      if (i) chunk.text += '\n';
      chunk.text += chunk.path_blocks[i].text;
    }
    out.push_back(std::move(chunk));
  };

  std::function<void(std::size_t)> dfs = [&](std::size_t v) {
    path.push_back(v);
    auto kids = tree.children(v);
    if (kids.empty()) {
      emit();
    } else {
      for (auto k : kids) dfs(k);
    }
    path.pop_back();
  };
  std::vector<std::size_t> roots = tree.roots;
  std::sort(roots.begin(), roots.end(),
            [&](std::size_t x, std::size_t y) { return tree.nodes[x].span.first < tree.nodes[y].span.first; });
  for (auto r : roots) dfs(r);
  return out;
}

/// split -> link -> extract for one document.
inline std::vector<ConfigChunk> chunk_document(const ConfigDocument& doc) {
  return extract_chunks(link_dependencies(split_blocks(doc)), doc.router);
}

/// References inside a chunk whose definitions are missing from the chunk.
/// Empty for every chunk `extract_chunks` emits.
inline std::vector<std::string> unresolved_references(const ConfigChunk& chunk) {
  std::vector<std::string> missing;
  std::set<std::size_t> ids;
  for (const auto& b : chunk.path_blocks) ids.insert(b.id);
  for (const auto& b : chunk.path_blocks) {
    for (const auto& ref : b.references) {
      for (auto t : ref.targets)
        if (!ids.count(t)) missing.push_back(std::string(to_string(ref.target)) + " " + ref.name);
    }
  }
  return missing;
}

}  // namespace netquery
