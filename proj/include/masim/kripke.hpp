#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>
#include <nlohmann/json.hpp>

#include "masim/error.hpp"
#include "masim/random.hpp"
#include "masim/syntax.hpp"

namespace masim {

/// Set of worlds of one structure, indexed by world position.
using WorldSet = boost::dynamic_bitset<>;

inline constexpr std::size_t rel_slot(Rel r) noexcept { return static_cast<std::size_t>(r); }

/// Finite structure for the correspondence vocabulary: worlds, R, R□, R◇ and a
/// valuation of the unary predicates. No frame conditions are imposed.
///
/// Worlds are addressed by position (0-based, declaration order); names are
/// kept for I/O only.
class KripkeStructure {
 public:
  explicit KripkeStructure(std::vector<std::string> world_names) : names_(std::move(world_names)) {
    if (names_.empty()) throw ModelError("a model needs at least one world");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!index_.emplace(names_[i], i).second) throw ModelError("duplicate world '" + names_[i] + "'");
    }
    const std::size_t n = names_.size();
    for (auto& adj : adj_) adj.assign(n, WorldSet(n));
    for (auto& adj : pre_) adj.assign(n, WorldSet(n));
    succ_lists_.fill(std::vector<std::vector<std::size_t>>(n));
    pred_lists_.fill(std::vector<std::vector<std::size_t>>(n));
  }

  /// Worlds named w0 … w(n-1).
  static KripkeStructure with_worlds(std::size_t n, std::string_view prefix = "w") {
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(prefix) + std::to_string(i));
    return KripkeStructure(std::move(names));
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t w) const { return names_.at(w); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t at(std::string_view name) const {
    if (auto w = find(name)) return *w;
    throw ModelError("unknown world '" + std::string(name) + "'");
  }

  void add_edge(Rel r, std::size_t a, std::size_t b) {
    check_world(a);
    check_world(b);
    const std::size_t s = rel_slot(r);
    if (adj_[s][a][b]) return;
    adj_[s][a].set(b);
    pre_[s][b].set(a);
    insert_sorted(succ_lists_[s][a], b);
    insert_sorted(pred_lists_[s][b], a);
  }

  void add_edge(Rel r, std::string_view a, std::string_view b) { add_edge(r, at(a), at(b)); }

  void set_true(unsigned letter, std::size_t w) {
    if (letter == 0) throw ModelError("proposition letters are numbered from 1");
    check_world(w);
    auto [it, _] = val_.try_emplace(letter, WorldSet(size()));
    it->second.set(w);
  }

  bool has_edge(Rel r, std::size_t a, std::size_t b) const { return adj_[rel_slot(r)].at(a)[b]; }

  /// Successor set of a as a bitset.
  const WorldSet& image(Rel r, std::size_t a) const { return adj_[rel_slot(r)].at(a); }
  /// Predecessor set of b as a bitset.
  const WorldSet& preimage(Rel r, std::size_t b) const { return pre_[rel_slot(r)].at(b); }
  const std::vector<std::size_t>& successors(Rel r, std::size_t a) const { return succ_lists_[rel_slot(r)].at(a); }
  const std::vector<std::size_t>& predecessors(Rel r, std::size_t b) const { return pred_lists_[rel_slot(r)].at(b); }

  std::size_t edge_count(Rel r) const {
    std::size_t n = 0;
    for (const auto& row : adj_[rel_slot(r)]) n += row.count();
    return n;
  }

  bool holds(unsigned letter, std::size_t w) const {
    auto it = val_.find(letter);
    return it != val_.end() && it->second.test(w);
  }

  /// Extension of a letter; empty set when the letter is nowhere true.
  WorldSet extension(unsigned letter) const {
    auto it = val_.find(letter);
    return it == val_.end() ? WorldSet(size()) : it->second;
  }

  /// Letters true at some world.
  std::set<unsigned> letters() const {
    std::set<unsigned> out;
    for (const auto& [p, ext] : val_)
      if (ext.any()) out.insert(p);
    return out;
  }

  friend bool operator==(const KripkeStructure& a, const KripkeStructure& b) {
    if (a.names_ != b.names_ || a.adj_ != b.adj_) return false;
    for (unsigned p : a.letters())
      if (a.extension(p) != b.extension(p)) return false;
    return a.letters() == b.letters();
  }

 private:
  void check_world(std::size_t w) const {
    if (w >= size()) throw ModelError("world index " + std::to_string(w) + " out of range");
  }

  static void insert_sorted(std::vector<std::size_t>& v, std::size_t x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::array<std::vector<WorldSet>, 3> adj_;
  std::array<std::vector<WorldSet>, 3> pre_;
  std::array<std::vector<std::vector<std::size_t>>, 3> succ_lists_;
  std::array<std::vector<std::vector<std::size_t>>, 3> pred_lists_;
  std::map<unsigned, WorldSet> val_;
};

/// A structure together with a designated world.
struct PointedModel {
  const KripkeStructure* structure;
  std::size_t point;

  PointedModel(const KripkeStructure& m, std::size_t w) : structure(&m), point(w) {
    if (w >= m.size()) throw ModelError("point " + std::to_string(w) + " is not a world of the model");
  }
};

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline unsigned letter_key(const std::string& key) {
  const unsigned idx = letter_index(key, 'p');
  if (idx == 0) throw ModelError("valuation key '" + key + "' is not of the form p<digits>");
  return idx;
}

inline std::string world_name(const nlohmann::json& j, const char* where) {
  if (!j.is_string()) throw ModelError(std::string("world identifiers in ") + where + " must be strings");
  return j.get<std::string>();
}

}  // namespace detail

inline KripkeStructure model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ModelError("model document must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "worlds" && key != "R" && key != "Rb" && key != "Rd" && key != "val")
      throw ModelError("unknown field '" + key + "' in model document");
  }
  if (!doc.contains("worlds") || !doc["worlds"].is_array()) throw ModelError("model document needs a \"worlds\" array");
  std::vector<std::string> names;
  for (const auto& w : doc["worlds"]) names.push_back(detail::world_name(w, "\"worlds\""));
  KripkeStructure m(std::move(names));

  for (Rel r : kAllRelations) {
    const std::string field(rel_name(r));
    if (!doc.contains(field)) continue;
    const auto& edges = doc[field];
    if (!edges.is_array()) throw ModelError("\"" + field + "\" must be an array of pairs");
    for (const auto& e : edges) {
      if (!e.is_array() || e.size() != 2) throw ModelError("\"" + field + "\" entries must be [from, to] pairs");
      const std::string a = detail::world_name(e[0], field.c_str());
      const std::string b = detail::world_name(e[1], field.c_str());
      if (!m.find(a)) throw ModelError("edge in \"" + field + "\" references undeclared world '" + a + "'");
      if (!m.find(b)) throw ModelError("edge in \"" + field + "\" references undeclared world '" + b + "'");
      m.add_edge(r, a, b);
    }
  }

  if (doc.contains("val")) {
    const auto& val = doc["val"];
    if (!val.is_object()) throw ModelError("\"val\" must be an object");
    for (const auto& [key, worlds] : val.items()) {
      const unsigned p = detail::letter_key(key);
      if (!worlds.is_array()) throw ModelError("valuation of '" + key + "' must be an array");
      for (const auto& w : worlds) {
        const std::string name = detail::world_name(w, "\"val\"");
        if (!m.find(name)) throw ModelError("valuation of '" + key + "' references undeclared world '" + name + "'");
        m.set_true(p, m.at(name));
      }
    }
  }
  return m;
}

/// Parses a model document. Any defect rejects the whole document.
inline KripkeStructure load_model(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(std::string("malformed model document: ") + e.what());
  }
  return model_from_json(doc);
}

inline nlohmann::json model_to_json(const KripkeStructure& m) {
  nlohmann::json doc;
  doc["worlds"] = m.names();
  for (Rel r : kAllRelations) {
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t a = 0; a < m.size(); ++a)
      for (std::size_t b : m.successors(r, a)) edges.push_back({m.name(a), m.name(b)});
    doc[std::string(rel_name(r))] = std::move(edges);
  }
  nlohmann::json val = nlohmann::json::object();
  for (unsigned p : m.letters()) {
    nlohmann::json ws = nlohmann::json::array();
    const WorldSet ext = m.extension(p);
    for (std::size_t w = 0; w < m.size(); ++w)
      if (ext[w]) ws.push_back(m.name(w));
    val["p" + std::to_string(p)] = std::move(ws);
  }
  doc["val"] = std::move(val);
  return doc;
}

inline std::string print_model(const KripkeStructure& m) { return model_to_json(m).dump(); }

// ---------------------------------------------------------------------------
// Random structures

struct RandomModelParams {
  std::size_t worlds = 1;
  double density_r = 0.0;
  double density_box = 0.0;
  double density_dia = 0.0;
  std::size_t letters = 0;
  double density_val = 0.5;
};

/// Samples every directed edge of R, then R□, then R◇ (row-major), then every
/// (letter, world) membership, each independently.
inline KripkeStructure random_model(const RandomModelParams& params, std::uint64_t seed) {
  if (params.worlds == 0) throw InputError("random_model needs at least one world");
  Rng rng(seed);
  KripkeStructure m = KripkeStructure::with_worlds(params.worlds);
  const double density[3] = {params.density_r, params.density_box, params.density_dia};
  for (Rel r : kAllRelations)
    for (std::size_t a = 0; a < m.size(); ++a)
      for (std::size_t b = 0; b < m.size(); ++b)
        if (rng.chance(density[rel_slot(r)])) m.add_edge(r, a, b);
  for (unsigned p = 1; p <= params.letters; ++p)
    for (std::size_t w = 0; w < m.size(); ++w)
      if (rng.chance(params.density_val)) m.set_true(p, w);
  return m;
}

/// One density for every relation and for the valuation.
inline KripkeStructure random_model(std::size_t worlds, double density, std::size_t letters, std::uint64_t seed) {
  return random_model(RandomModelParams{worlds, density, density, density, letters, density}, seed);
}

/// Disjoint union; worlds of the i-th part are renamed "<i>:<name>" and
/// occupy consecutive positions starting at offsets[i].
struct DisjointUnion {
  KripkeStructure model;
  std::vector<std::size_t> offsets;
};

inline DisjointUnion disjoint_union(const std::vector<const KripkeStructure*>& parts) {
  if (parts.empty()) throw InputError("disjoint union of no models");
  std::vector<std::string> names;
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    offsets.push_back(names.size());
    for (const auto& n : parts[i]->names()) names.push_back(std::to_string(i) + ":" + n);
  }
  KripkeStructure u(std::move(names));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const KripkeStructure& m = *parts[i];
    const std::size_t off = offsets[i];
    for (Rel r : kAllRelations)
      for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b : m.successors(r, a)) u.add_edge(r, off + a, off + b);
    for (unsigned p : m.letters())
      for (std::size_t w = 0; w < m.size(); ++w)
        if (m.holds(p, w)) u.set_true(p, off + w);
  }
  return {std::move(u), std::move(offsets)};
}

}  // namespace masim
