#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "netquery/fact.hpp"

namespace netquery {

struct Provenance {
  std::string router;
  std::string chunk;
  std::string extractor;

  auto operator<=>(const Provenance&) const = default;
};

/// Set of facts with provenance. Inserting a fact whose conflict key is
/// already present applies the predicate's merge policy.
class FactBase {
 public:
  void insert(const Fact& f, const Provenance& p) { insert(f, std::set<Provenance>{p}); }

  void insert(const Fact& f, const std::set<Provenance>& prov) {
    const auto& table = schemas();
    auto it = table.find(f.predicate);
    auto policy = it == table.end() ? PredicateSchema::Merge::Set : it->second.merge;
    if (policy == PredicateSchema::Merge::Set) {
      facts_[f].insert(prov.begin(), prov.end());
      return;
    }
    Fact key = key_of(f);
    auto existing = keyed_.find(key);
    if (existing == keyed_.end()) {
      keyed_.emplace(key, f);
      facts_[f].insert(prov.begin(), prov.end());
      return;
    }
    Fact old = existing->second;
    if (old == f) {
      facts_[f].insert(prov.begin(), prov.end());
      return;
    }
    Fact merged = f;
    std::set<Provenance> carried = prov;
    switch (policy) {
      case PredicateSchema::Merge::Replace:
        conflict(literal::to_string(old) + " replaced by " + literal::to_string(f));
        break;
      case PredicateSchema::Merge::AppendList: {
        merged = old;
        auto& items = merged.args.back().items;
        for (const auto& item : f.args.back().items)
          if (std::find(items.begin(), items.end(), item) == items.end()) items.push_back(item);
        carried.insert(facts_[old].begin(), facts_[old].end());
        break;
      }
      case PredicateSchema::Merge::FieldUnion: {
        merged = old;
        if (merged.args[1] != f.args[1]) {
          conflict(literal::to_string(old) + " AS number replaced by " + literal::to_string(f.args[1]));
          merged.args[1] = f.args[1];
        }
        Term& rec = merged.args[2];
        const Term& add = f.args[2];
        for (std::size_t i = 0; i < add.keys.size(); ++i) {
          Term* slot = rec.field(add.keys[i]);
          if (!slot || add.items[i].is_null()) continue;
          if (!slot->is_null() && *slot != add.items[i])
            conflict(literal::to_string(old) + " field " + add.keys[i] + " replaced by " +
                     literal::to_string(add.items[i]));
          *slot = add.items[i];
        }
        carried.insert(facts_[old].begin(), facts_[old].end());
        break;
      }
      case PredicateSchema::Merge::Set: break;
    }
    facts_.erase(old);
    keyed_[key] = merged;
    facts_[merged].insert(carried.begin(), carried.end());
  }

  bool contains(const Fact& f) const { return facts_.count(f) > 0; }
  std::size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }

  const std::map<Fact, std::set<Provenance>>& entries() const { return facts_; }

  std::vector<Fact> facts() const {
    std::vector<Fact> out;
    for (const auto& [f, _] : facts_) out.push_back(f);
    return out;
  }

  std::vector<Fact> with_predicate(std::string_view pred) const {
    std::vector<Fact> out;
    for (const auto& [f, _] : facts_)
      if (f.predicate == pred) out.push_back(f);
    return out;
  }

  const std::set<Provenance>& provenance(const Fact& f) const { return facts_.at(f); }

  const std::vector<std::string>& conflicts() const { return conflicts_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  void note(std::string msg) {
    if (std::find(diagnostics_.begin(), diagnostics_.end(), msg) == diagnostics_.end())
      diagnostics_.push_back(std::move(msg));
  }

  /// Absorbs another base: facts in `other` win conflicts against ours.
  void absorb(const FactBase& other) {
    for (const auto& [f, prov] : other.facts_) insert(f, prov);
    for (const auto& c : other.conflicts_) conflict(c);
    for (const auto& d : other.diagnostics_) note(d);
  }

 private:
  void conflict(std::string msg) {
    if (std::find(conflicts_.begin(), conflicts_.end(), msg) == conflicts_.end())
      conflicts_.push_back(std::move(msg));
  }

  std::map<Fact, std::set<Provenance>> facts_;
  std::map<Fact, Fact> keyed_;
  std::vector<std::string> conflicts_;
  std::vector<std::string> diagnostics_;
};

/// Union in list order; later bases win keyed conflicts.
inline FactBase merge_fact_bases(const std::vector<FactBase>& bases) {
  FactBase out;
  for (const auto& b : bases) out.absorb(b);
  return out;
}

/// Fact-literal rendering, one fact per line in sorted order.
inline std::string render_facts(const std::vector<Fact>& facts) {
  std::string out;
  for (const auto& f : facts) out += literal::to_string(f) + "\n";
  return out;
}

}  // namespace netquery
