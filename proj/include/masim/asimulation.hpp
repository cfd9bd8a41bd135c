#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "masim/error.hpp"
#include "masim/kripke.hpp"
#include "masim/semantics.hpp"
#include "masim/syntax.hpp"

namespace masim {

/// forward: source in the first model, target in the second ("12");
/// backward: the reverse ("21").
enum class Direction : std::uint8_t { forward, backward };

inline constexpr Direction flip(Direction d) noexcept {
  return d == Direction::forward ? Direction::backward : Direction::forward;
}

inline std::string_view direction_code(Direction d) { return d == Direction::forward ? "12" : "21"; }

inline Direction parse_direction(std::string_view code) {
  if (code == "12") return Direction::forward;
  if (code == "21") return Direction::backward;
  throw InputError("unknown direction '" + std::string(code) + "' (expected 12 or 21)");
}

/// Cross-model pair (source, target). `from` indexes the source model of the
/// direction and `to` the other one.
struct DirectedPair {
  Direction dir = Direction::forward;
  std::size_t from = 0;
  std::size_t to = 0;

  friend auto operator<=>(const DirectedPair&, const DirectedPair&) = default;
};

/// Relation A and, for the variants with diamond clause 2, relation B.
struct Asimulation {
  std::set<DirectedPair> relA;
  std::optional<std::set<DirectedPair>> relB;

  friend bool operator==(const Asimulation&, const Asimulation&) = default;
};

/// Pair of equal-length world sequences carrying one direction.
struct SeqPair {
  Direction dir = Direction::forward;
  std::vector<std::size_t> from;
  std::vector<std::size_t> to;

  friend auto operator<=>(const SeqPair&, const SeqPair&) = default;
};

struct SeqAsimulation {
  std::set<SeqPair> relA;
  std::optional<std::set<SeqPair>> relB;

  friend bool operator==(const SeqAsimulation&, const SeqAsimulation&) = default;
};

// ---------------------------------------------------------------------------
// Condition sets

enum class Condition : std::uint16_t {
  type = 1 << 0,
  elem = 1 << 1,
  base = 1 << 2,
  step = 1 << 3,
  box1 = 1 << 4,
  box2 = 1 << 5,
  diam1 = 1 << 6,
  diam2_1 = 1 << 7,
  diam2_2 = 1 << 8,
  b_type = 1 << 9,
};

inline constexpr Condition kAllConditions[] = {Condition::type,  Condition::elem,    Condition::base,
                                               Condition::step,  Condition::box1,    Condition::box2,
                                               Condition::diam1, Condition::diam2_1, Condition::diam2_2,
                                               Condition::b_type};

/// Name as used in verdicts; `sequence` selects the k-indexed spelling.
inline std::string condition_name(Condition c, bool sequence = false) {
  const std::string p = sequence ? "p-" : "";
  switch (c) {
    case Condition::type: return p + "type";
    case Condition::elem: return "elem";
    case Condition::base: return p + "base";
    case Condition::step: return p + "step";
    case Condition::box1: return p + "box-1";
    case Condition::box2: return p + "box-2";
    case Condition::diam1: return p + "diam-1";
    case Condition::diam2_1: return p + "diam-2(1)";
    case Condition::diam2_2: return p + "diam-2(2)";
    case Condition::b_type: return p + "B-type";
  }
  return "?";
}

class Conditions {
 public:
  constexpr Conditions() = default;

  /// (type), (elem), (base), (step).
  static constexpr Conditions basic() {
    return Conditions{}.with(Condition::type).with(Condition::elem).with(Condition::base).with(Condition::step);
  }

  static constexpr Conditions of(Variant v) {
    Conditions c = basic().with(v.box() == 1 ? Condition::box1 : Condition::box2);
    if (v.dia() == 1) return c.with(Condition::diam1);
    return c.with(Condition::b_type).with(Condition::diam2_1).with(Condition::diam2_2);
  }

  /// "basic" or a variant code.
  static Conditions parse(std::string_view text) {
    if (text == "basic") return basic();
    return of(Variant::parse(text));
  }

  constexpr bool has(Condition c) const noexcept { return (bits_ & static_cast<std::uint16_t>(c)) != 0; }
  constexpr Conditions with(Condition c) const noexcept { return Conditions(bits_ | static_cast<std::uint16_t>(c)); }
  constexpr Conditions without(Condition c) const noexcept {
    return Conditions(bits_ & static_cast<std::uint16_t>(~static_cast<std::uint16_t>(c)));
  }
  /// True when the set involves the second relation B.
  constexpr bool needs_b() const noexcept {
    return has(Condition::b_type) || has(Condition::diam2_1) || has(Condition::diam2_2);
  }

  friend constexpr bool operator==(Conditions, Conditions) = default;

 private:
  constexpr explicit Conditions(std::uint32_t bits) : bits_(static_cast<std::uint16_t>(bits)) {}
  std::uint16_t bits_ = 0;
};

struct Violation {
  std::string condition;
  std::string witness;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct Verdict {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }

  std::size_t count(std::string_view condition) const {
    std::size_t n = 0;
    for (const auto& v : violations) n += v.condition == condition;
    return n;
  }

  /// Distinct condition names, sorted.
  std::set<std::string> conditions() const {
    std::set<std::string> out;
    for (const auto& v : violations) out.insert(v.condition);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Shared machinery

namespace detail {

inline constexpr std::size_t kNone = static_cast<std::size_t>(-1);

/// The two structures with the derived R∘R□ successor lists and predecessor sets.
class ModelPair {
 public:
  ModelPair(const KripkeStructure& m1, const KripkeStructure& m2) : models_{&m1, &m2} {
    for (std::size_t s = 0; s < 2; ++s) {
      const KripkeStructure& m = *models_[s];
      rbox_[s].assign(m.size(), {});
      rbox_pre_[s].assign(m.size(), {});
      for (std::size_t a = 0; a < m.size(); ++a) {
        WorldSet reach(m.size());
        for (std::size_t c : m.successors(Rel::R, a)) reach |= m.image(Rel::Box, c);
        for (std::size_t e = reach.find_first(); e != WorldSet::npos; e = reach.find_next(e)) {
          rbox_[s][a].push_back(e);
          rbox_pre_[s][e].push_back(a);
        }
      }
    }
  }

  const KripkeStructure& model(std::size_t side) const { return *models_[side]; }
  const KripkeStructure& source(Direction d) const { return *models_[d == Direction::forward ? 0 : 1]; }
  const KripkeStructure& target(Direction d) const { return *models_[d == Direction::forward ? 1 : 0]; }
  std::size_t source_side(Direction d) const { return d == Direction::forward ? 0 : 1; }
  std::size_t target_side(Direction d) const { return d == Direction::forward ? 1 : 0; }

  /// Worlds reachable by an R-step followed by an R□-step.
  const std::vector<std::size_t>& rbox(std::size_t side, std::size_t a) const { return rbox_[side][a]; }
  const std::vector<std::size_t>& rbox_predecessors(std::size_t side, std::size_t e) const { return rbox_pre_[side][e]; }

  bool in_range(const DirectedPair& p) const { return p.from < source(p.dir).size() && p.to < target(p.dir).size(); }

  std::string pair_text(Direction d, std::size_t a, std::size_t b) const {
    return "(" + std::string(direction_code(d)) + ":" + source(d).name(a) + "," + target(d).name(b) + ")";
  }

 private:
  std::array<const KripkeStructure*, 2> models_;
  std::array<std::vector<std::vector<std::size_t>>, 2> rbox_;
  std::array<std::vector<std::vector<std::size_t>>, 2> rbox_pre_;
};

/// Membership matrix of a plain relation: rows[dir][source] is a set of targets.
class Membership {
 public:
  explicit Membership(const ModelPair& mp) {
    for (Direction d : {Direction::forward, Direction::backward}) {
      auto& rows = rows_[static_cast<std::size_t>(d)];
      rows.assign(mp.source(d).size(), WorldSet(mp.target(d).size()));
    }
  }

  bool contains(Direction d, std::size_t a, std::size_t b) const { return rows_[static_cast<std::size_t>(d)][a][b]; }
  void insert(Direction d, std::size_t a, std::size_t b) { rows_[static_cast<std::size_t>(d)][a].set(b); }
  void erase(Direction d, std::size_t a, std::size_t b) { rows_[static_cast<std::size_t>(d)][a].reset(b); }

  std::set<DirectedPair> pairs() const {
    std::set<DirectedPair> out;
    for (Direction d : {Direction::forward, Direction::backward}) {
      const auto& rows = rows_[static_cast<std::size_t>(d)];
      for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = rows[a].find_first(); b != WorldSet::npos; b = rows[a].find_next(b))
          out.insert({d, a, b});
    }
    return out;
  }

 private:
  std::array<std::vector<WorldSet>, 2> rows_;
};

/// Calls sink(condition, x, y) for every failed premise instance of the A-pair
/// (d, a, b); x and y identify the premise worlds (a letter index for base).
/// Stops early when the sink returns false.
template <class Sink>
void a_failures(const ModelPair& mp, const Membership& A, const Membership* B, Conditions conds, Direction d,
                std::size_t a, std::size_t b, Sink&& sink) {
  const KripkeStructure& src = mp.source(d);
  const KripkeStructure& tgt = mp.target(d);
  if (conds.has(Condition::base)) {
    for (unsigned p : src.letters())
      if (src.holds(p, a) && !tgt.holds(p, b) && !sink(Condition::base, p, kNone)) return;
  }
  if (conds.has(Condition::step)) {
    for (std::size_t dd : tgt.successors(Rel::R, b)) {
      bool found = false;
      for (std::size_t c : src.successors(Rel::R, a))
        if (A.contains(d, c, dd) && A.contains(flip(d), dd, c)) {
          found = true;
          break;
        }
      if (!found && !sink(Condition::step, dd, kNone)) return;
    }
  }
  if (conds.has(Condition::box1)) {
    for (std::size_t dd : tgt.successors(Rel::Box, b)) {
      bool found = false;
      for (std::size_t c : src.successors(Rel::Box, a))
        if (A.contains(d, c, dd)) {
          found = true;
          break;
        }
      if (!found && !sink(Condition::box1, dd, kNone)) return;
    }
  }
  if (conds.has(Condition::box2)) {
    const auto& reach = mp.rbox(mp.source_side(d), a);
    for (std::size_t dd : tgt.successors(Rel::R, b)) {
      for (std::size_t f : tgt.successors(Rel::Box, dd)) {
        bool found = false;
        for (std::size_t e : reach)
          if (A.contains(d, e, f)) {
            found = true;
            break;
          }
        if (!found && !sink(Condition::box2, dd, f)) return;
      }
    }
  }
  if (conds.has(Condition::diam1)) {
    for (std::size_t c : src.successors(Rel::Dia, a)) {
      bool found = false;
      for (std::size_t dd : tgt.successors(Rel::Dia, b))
        if (A.contains(d, c, dd)) {
          found = true;
          break;
        }
      if (!found && !sink(Condition::diam1, c, kNone)) return;
    }
  }
  if (conds.has(Condition::diam2_1) && B != nullptr) {
    for (std::size_t dd : tgt.successors(Rel::R, b)) {
      bool found = false;
      for (std::size_t c : src.successors(Rel::R, a))
        if (B->contains(d, c, dd)) {
          found = true;
          break;
        }
      if (!found && !sink(Condition::diam2_1, dd, kNone)) return;
    }
  }
}

/// As a_failures, for a B-pair.
template <class Sink>
void b_failures(const ModelPair& mp, const Membership& A, Conditions conds, Direction d, std::size_t a, std::size_t b,
                Sink&& sink) {
  if (!conds.has(Condition::diam2_2)) return;
  const KripkeStructure& src = mp.source(d);
  const KripkeStructure& tgt = mp.target(d);
  for (std::size_t c : src.successors(Rel::Dia, a)) {
    bool found = false;
    for (std::size_t dd : tgt.successors(Rel::Dia, b))
      if (A.contains(d, c, dd)) {
        found = true;
        break;
      }
    if (!found && !sink(Condition::diam2_2, c, kNone)) return;
  }
}

inline std::string failure_text(const ModelPair& mp, Condition c, Direction d, std::size_t a, std::size_t b,
                                std::size_t x, std::size_t y) {
  std::string out = mp.pair_text(d, a, b);
  const KripkeStructure& src = mp.source(d);
  const KripkeStructure& tgt = mp.target(d);
  switch (c) {
    case Condition::base: out += " P" + std::to_string(x); break;
    case Condition::step:
    case Condition::box1:
    case Condition::diam2_1: out += " d=" + tgt.name(x); break;
    case Condition::box2: out += " d=" + tgt.name(x) + " f=" + tgt.name(y); break;
    case Condition::diam1:
    case Condition::diam2_2: out += " c=" + src.name(x); break;
    default: break;
  }
  return out;
}

inline void require_b_shape(Conditions conds, bool has_b) {
  if (conds.needs_b() && !has_b) throw InputError("relation B is required for variants with diamond clause 2");
  if (!conds.needs_b() && has_b) throw InputError("relation B is only allowed for variants with diamond clause 2");
}

}  // namespace detail

/// Verdict of the conditions in `conds` for the relation(s) in `rel` between
/// (M1, t) and (M2, u). Every failed premise instance is reported once.
inline Verdict check_asimulation(const KripkeStructure& m1, std::size_t t, const KripkeStructure& m2, std::size_t u,
                                 Conditions conds, const Asimulation& rel) {
  if (t >= m1.size() || u >= m2.size()) throw ModelError("point outside its model");
  detail::require_b_shape(conds, rel.relB.has_value());
  const detail::ModelPair mp(m1, m2);
  Verdict verdict;
  auto fill = [&](const std::set<DirectedPair>& pairs, detail::Membership& mem, Condition type_cond) {
    for (const auto& p : pairs) {
      if (mp.in_range(p)) {
        mem.insert(p.dir, p.from, p.to);
      } else if (conds.has(type_cond)) {
        verdict.violations.push_back({condition_name(type_cond),
                                      "(" + std::string(direction_code(p.dir)) + ":" + std::to_string(p.from) + "," +
                                          std::to_string(p.to) + ") outside the models"});
      }
    }
  };
  detail::Membership A(mp);
  fill(rel.relA, A, Condition::type);
  std::optional<detail::Membership> B;
  if (rel.relB) {
    B.emplace(mp);
    fill(*rel.relB, *B, Condition::b_type);
  }
  if (conds.has(Condition::elem) && !A.contains(Direction::forward, t, u))
    verdict.violations.push_back({"elem", mp.pair_text(Direction::forward, t, u) + " missing"});

  for (const auto& p : rel.relA) {
    if (!mp.in_range(p)) continue;
    detail::a_failures(mp, A, B ? &*B : nullptr, conds, p.dir, p.from, p.to,
                       [&](Condition c, std::size_t x, std::size_t y) {
                         verdict.violations.push_back(
                             {condition_name(c), detail::failure_text(mp, c, p.dir, p.from, p.to, x, y)});
                         return true;
                       });
  }
  if (rel.relB) {
    for (const auto& p : *rel.relB) {
      if (!mp.in_range(p)) continue;
      detail::b_failures(mp, A, conds, p.dir, p.from, p.to, [&](Condition c, std::size_t x, std::size_t y) {
        verdict.violations.push_back({condition_name(c), detail::failure_text(mp, c, p.dir, p.from, p.to, x, y)});
        return true;
      });
    }
  }
  return verdict;
}

inline Verdict check_asimulation(const KripkeStructure& m1, std::size_t t, const KripkeStructure& m2, std::size_t u,
                                 Variant v, const Asimulation& rel) {
  return check_asimulation(m1, t, m2, u, Conditions::of(v), rel);
}

// ---------------------------------------------------------------------------
// Greatest fixpoint

struct MaximalAsimulation {
  Asimulation relation;
  bool contains_root = false;
  /// Pairs deleted during refinement.
  std::size_t deletions = 0;
};

/// Largest relation (pair) satisfying every condition in `conds` except (elem).
/// Starts from all base-satisfying A-pairs and all B-pairs and deletes
/// failing pairs until stable, rechecking only pairs whose witnesses changed.
inline MaximalAsimulation maximal_asimulation(const KripkeStructure& m1, std::size_t t, const KripkeStructure& m2,
                                              std::size_t u, Conditions conds) {
  if (t >= m1.size() || u >= m2.size()) throw ModelError("point outside its model");
  const detail::ModelPair mp(m1, m2);
  const bool with_b = conds.needs_b();
  const std::size_t n1 = m1.size();
  const std::size_t n2 = m2.size();
  const std::size_t per_rel = 2 * n1 * n2;

  auto encode = [&](bool is_b, Direction d, std::size_t a, std::size_t b) {
    const std::size_t base = is_b ? per_rel : 0;
    return d == Direction::forward ? base + a * n2 + b : base + n1 * n2 + a * n1 + b;
  };
  struct Item {
    bool is_b;
    Direction dir;
    std::size_t a;
    std::size_t b;
  };
  auto decode = [&](std::size_t id) {
    Item it{id >= per_rel, Direction::forward, 0, 0};
    std::size_t r = id % per_rel;
    if (r < n1 * n2) {
      it.a = r / n2;
      it.b = r % n2;
    } else {
      r -= n1 * n2;
      it.dir = Direction::backward;
      it.a = r / n1;
      it.b = r % n1;
    }
    return it;
  };

  detail::Membership A(mp);
  detail::Membership B(mp);
  std::vector<char> queued(2 * per_rel, 0);
  std::deque<std::size_t> work;
  auto enqueue = [&](bool is_b, Direction d, std::size_t a, std::size_t b) {
    if (is_b && !with_b) return;
    const std::size_t id = encode(is_b, d, a, b);
    if (queued[id]) return;
    if (!(is_b ? B : A).contains(d, a, b)) return;
    queued[id] = 1;
    work.push_back(id);
  };

  const Conditions base_only = Conditions{}.with(Condition::base);
  for (Direction d : {Direction::forward, Direction::backward}) {
    for (std::size_t a = 0; a < mp.source(d).size(); ++a) {
      for (std::size_t b = 0; b < mp.target(d).size(); ++b) {
        bool base_ok = true;
        if (conds.has(Condition::base))
          detail::a_failures(mp, A, nullptr, base_only, d, a, b, [&](Condition, std::size_t, std::size_t) {
            base_ok = false;
            return false;
          });
        if (base_ok) A.insert(d, a, b);
        if (with_b) B.insert(d, a, b);
      }
    }
  }
  for (Direction d : {Direction::forward, Direction::backward})
    for (std::size_t a = 0; a < mp.source(d).size(); ++a)
      for (std::size_t b = 0; b < mp.target(d).size(); ++b) {
        enqueue(false, d, a, b);
        enqueue(true, d, a, b);
      }

  const Conditions refine = conds.without(Condition::base).without(Condition::elem).without(Condition::type);
  std::size_t deletions = 0;
  while (!work.empty()) {
    const std::size_t id = work.front();
    work.pop_front();
    queued[id] = 0;
    const Item it = decode(id);
    bool fails = false;
    auto stop = [&](Condition, std::size_t, std::size_t) {
      fails = true;
      return false;
    };
    if (it.is_b)
      detail::b_failures(mp, A, refine, it.dir, it.a, it.b, stop);
    else
      detail::a_failures(mp, A, with_b ? &B : nullptr, refine, it.dir, it.a, it.b, stop);
    if (!fails) continue;

    (it.is_b ? B : A).erase(it.dir, it.a, it.b);
    ++deletions;
    const std::size_t ss = mp.source_side(it.dir);
    const std::size_t ts = mp.target_side(it.dir);
    const KripkeStructure& src = mp.source(it.dir);
    const KripkeStructure& tgt = mp.target(it.dir);
    for (Rel r : kAllRelations)
      for (std::size_t a : src.predecessors(r, it.a))
        for (std::size_t b : tgt.predecessors(r, it.b)) {
          enqueue(false, it.dir, a, b);
          enqueue(true, it.dir, a, b);
        }
    for (std::size_t a : mp.rbox_predecessors(ss, it.a))
      for (std::size_t b : mp.rbox_predecessors(ts, it.b)) enqueue(false, it.dir, a, b);
    // (step) of the reversed pairs reads this pair as its back edge.
    for (std::size_t a : tgt.predecessors(Rel::R, it.b))
      for (std::size_t b : src.predecessors(Rel::R, it.a)) enqueue(false, flip(it.dir), a, b);
  }

  MaximalAsimulation out;
  out.relation.relA = A.pairs();
  if (with_b) out.relation.relB = B.pairs();
  out.contains_root = A.contains(Direction::forward, t, u);
  out.deletions = deletions;
  return out;
}

inline MaximalAsimulation maximal_asimulation(const KripkeStructure& m1, std::size_t t, const KripkeStructure& m2,
                                              std::size_t u, Variant v) {
  return maximal_asimulation(m1, t, m2, u, Conditions::of(v));
}

// ---------------------------------------------------------------------------
// k-asimulations

namespace detail {

class SeqChecker {
 public:
  SeqChecker(const ModelPair& mp, const SeqAsimulation& rel, Conditions conds, std::size_t k)
      : mp_(mp), rel_(rel), conds_(conds), k_(k) {}

  bool in_A(const SeqPair& p) const { return rel_.relA.contains(p); }
  bool in_B(const SeqPair& p) const { return rel_.relB && rel_.relB->contains(p); }

  bool well_formed(const SeqPair& p) const {
    if (p.from.empty() || p.from.size() != p.to.size()) return false;
    for (std::size_t w : p.from)
      if (w >= mp_.source(p.dir).size()) return false;
    for (std::size_t w : p.to)
      if (w >= mp_.target(p.dir).size()) return false;
    return true;
  }

  template <class Sink>
  void a_failures(const SeqPair& p, Sink&& sink) const {
    const KripkeStructure& src = mp_.source(p.dir);
    const KripkeStructure& tgt = mp_.target(p.dir);
    const std::size_t a = p.from.back();
    const std::size_t b = p.to.back();
    const std::size_t m = p.from.size() - 1;
    SeqPair ext = p;
    SeqPair rev{flip(p.dir), p.to, p.from};

    if (conds_.has(Condition::base))
      for (unsigned q : src.letters())
        if (src.holds(q, a) && !tgt.holds(q, b) && !sink(Condition::base, q, kNone)) return;

    if (conds_.has(Condition::step) && m < k_) {
      ext.from.push_back(0);
      ext.to.push_back(0);
      rev.from.push_back(0);
      rev.to.push_back(0);
      for (std::size_t d : tgt.successors(Rel::R, b)) {
        bool found = false;
        for (std::size_t c : src.successors(Rel::R, a)) {
          ext.from.back() = c;
          ext.to.back() = d;
          rev.from.back() = d;
          rev.to.back() = c;
          if (in_A(ext) && in_A(rev)) {
            found = true;
            break;
          }
        }
        if (!found && !sink(Condition::step, d, kNone)) return;
      }
      ext.from.pop_back();
      ext.to.pop_back();
    }
    if (conds_.has(Condition::box2) && m + 1 < k_) {
      ext.from.push_back(0);
      ext.from.push_back(0);
      ext.to.push_back(0);
      ext.to.push_back(0);
      for (std::size_t d : tgt.successors(Rel::R, b))
        for (std::size_t f : tgt.successors(Rel::Box, d)) {
          ext.to[m + 1] = d;
          ext.to[m + 2] = f;
          bool found = false;
          for (std::size_t c : src.successors(Rel::R, a)) {
            for (std::size_t e : src.successors(Rel::Box, c)) {
              ext.from[m + 1] = c;
              ext.from[m + 2] = e;
              if (in_A(ext)) {
                found = true;
                break;
              }
            }
            if (found) break;
          }
          if (!found && !sink(Condition::box2, d, f)) return;
        }
      ext.from.resize(m + 1);
      ext.to.resize(m + 1);
    }
    auto one_step = [&](Condition cond, Rel premise_rel, bool premise_on_target, bool witness_in_b) {
      ext.from.push_back(0);
      ext.to.push_back(0);
      const KripkeStructure& pm = premise_on_target ? tgt : src;
      const KripkeStructure& wm = premise_on_target ? src : tgt;
      const std::size_t pw = premise_on_target ? b : a;
      const std::size_t ww = premise_on_target ? a : b;
      bool keep_going = true;
      for (std::size_t x : pm.successors(premise_rel, pw)) {
        (premise_on_target ? ext.to : ext.from).back() = x;
        bool found = false;
        for (std::size_t y : wm.successors(premise_rel, ww)) {
          (premise_on_target ? ext.from : ext.to).back() = y;
          if (witness_in_b ? in_B(ext) : in_A(ext)) {
            found = true;
            break;
          }
        }
        if (!found && !sink(cond, x, kNone)) {
          keep_going = false;
          break;
        }
      }
      ext.from.pop_back();
      ext.to.pop_back();
      return keep_going;
    };
    if (conds_.has(Condition::box1) && m + 1 < k_ && !one_step(Condition::box1, Rel::Box, true, false)) return;
    if (conds_.has(Condition::diam1) && m < k_ && !one_step(Condition::diam1, Rel::Dia, false, false)) return;
    if (conds_.has(Condition::diam2_1) && m + 1 < k_ && !one_step(Condition::diam2_1, Rel::R, true, true)) return;
  }

  template <class Sink>
  void b_failures(const SeqPair& p, Sink&& sink) const {
    if (!conds_.has(Condition::diam2_2)) return;
    const std::size_t m = p.from.size() - 1;
    if (!(m < k_)) return;
    const KripkeStructure& src = mp_.source(p.dir);
    const KripkeStructure& tgt = mp_.target(p.dir);
    SeqPair ext = p;
    ext.from.push_back(0);
    ext.to.push_back(0);
    for (std::size_t c : src.successors(Rel::Dia, p.from.back())) {
      ext.from.back() = c;
      bool found = false;
      for (std::size_t d : tgt.successors(Rel::Dia, p.to.back())) {
        ext.to.back() = d;
        if (in_A(ext)) {
          found = true;
          break;
        }
      }
      if (!found && !sink(Condition::diam2_2, c, kNone)) return;
    }
  }

  std::string pair_text(const SeqPair& p) const {
    auto seq = [](const KripkeStructure& m, const std::vector<std::size_t>& ws) {
      std::string s = "[";
      for (std::size_t i = 0; i < ws.size(); ++i) s += (i ? "," : "") + m.name(ws[i]);
      return s + "]";
    };
    return "(" + std::string(direction_code(p.dir)) + ":" + seq(mp_.source(p.dir), p.from) + "," +
           seq(mp_.target(p.dir), p.to) + ")";
  }

 private:
  const ModelPair& mp_;
  const SeqAsimulation& rel_;
  Conditions conds_;
  std::size_t k_;
};

}  // namespace detail

/// Verdict of the k-indexed conditions. A condition is only examined at
/// sequence pairs of index m (length m+1) that satisfy its guard on m and k.
inline Verdict check_k_asimulation(const KripkeStructure& m1, std::size_t t, const KripkeStructure& m2, std::size_t u,
                                   std::size_t k, Conditions conds, const SeqAsimulation& rel) {
  if (t >= m1.size() || u >= m2.size()) throw ModelError("point outside its model");
  detail::require_b_shape(conds, rel.relB.has_value());
  const detail::ModelPair mp(m1, m2);
  const detail::SeqChecker checker(mp, rel, conds, k);
  Verdict verdict;
  auto record = [&](const SeqPair& p) {
    return [&verdict, &checker, &p, &mp](Condition c, std::size_t x, std::size_t y) {
      const KripkeStructure& src = mp.source(p.dir);
      const KripkeStructure& tgt = mp.target(p.dir);
      std::string w = checker.pair_text(p);
      switch (c) {
        case Condition::base: w += " P" + std::to_string(x); break;
        case Condition::box2: w += " d=" + tgt.name(x) + " f=" + tgt.name(y); break;
        case Condition::diam1:
        case Condition::diam2_2: w += " c=" + src.name(x); break;
        default: w += " d=" + tgt.name(x); break;
      }
      verdict.violations.push_back({condition_name(c, true), std::move(w)});
      return true;
    };
  };
  auto type_check = [&](const std::set<SeqPair>& pairs, Condition cond) {
    for (const auto& p : pairs)
      if (!checker.well_formed(p) && conds.has(cond))
        verdict.violations.push_back({condition_name(cond, true), "malformed sequence pair of lengths " +
                                                                      std::to_string(p.from.size()) + "/" +
                                                                      std::to_string(p.to.size())});
  };
  type_check(rel.relA, Condition::type);
  if (rel.relB) type_check(*rel.relB, Condition::b_type);
  if (conds.has(Condition::elem) && !rel.relA.contains(SeqPair{Direction::forward, {t}, {u}}))
    verdict.violations.push_back({"elem", "(12:[" + m1.name(t) + "],[" + m2.name(u) + "]) missing"});
  for (const auto& p : rel.relA)
    if (checker.well_formed(p)) checker.a_failures(p, record(p));
  if (rel.relB)
    for (const auto& p : *rel.relB)
      if (checker.well_formed(p)) checker.b_failures(p, record(p));
  return verdict;
}

inline Verdict check_k_asimulation(const KripkeStructure& m1, std::size_t t, const KripkeStructure& m2, std::size_t u,
                                   std::size_t k, Variant v, const SeqAsimulation& rel) {
  return check_k_asimulation(m1, t, m2, u, k, Conditions::of(v), rel);
}

// ---------------------------------------------------------------------------
// Distinguishing formulas

/// A formula true at (M1, t) and false at (M2, u) of connective depth at most
/// max_depth, or nothing if none exists. Candidates are enumerated level by
/// level over the disjoint union of the two models, keeping one formula per
/// truth set, so the answer is exact for the given depth.
inline std::optional<ModalFormula> distinguishing_formula(const KripkeStructure& m1, std::size_t t,
                                                          const KripkeStructure& m2, std::size_t u, Variant v,
                                                          std::size_t max_depth) {
  if (t >= m1.size() || u >= m2.size()) throw ModelError("point outside its model");
  const DisjointUnion du = disjoint_union({&m1, &m2});
  const KripkeStructure& m = du.model;
  const std::size_t tt = du.offsets[0] + t;
  const std::size_t uu = du.offsets[1] + u;

  struct Item {
    ModalFormula formula;
    WorldSet truth;
    std::size_t depth;
  };
  std::vector<Item> items;
  std::map<WorldSet, std::size_t> seen;
  std::optional<ModalFormula> found;
  auto offer = [&](const ModalFormula& f, WorldSet s, std::size_t depth) {
    if (found || seen.contains(s)) return;
    if (s.test(tt) && !s.test(uu)) found = f;
    seen.emplace(s, items.size());
    items.push_back({f, std::move(s), depth});
  };

  offer(ModalFormula::bottom(), WorldSet(m.size()), 0);
  for (unsigned p : m.letters()) offer(ModalFormula::prop(p), m.extension(p), 0);

  for (std::size_t depth = 1; depth <= max_depth && !found; ++depth) {
    const std::size_t before = items.size();
    for (std::size_t i = 0; i < before && !found; ++i) {
      if (items[i].depth != depth - 1) continue;
      offer(ModalFormula::box(items[i].formula), ops::box(m, v.box(), items[i].truth), depth);
      offer(ModalFormula::dia(items[i].formula), ops::dia(m, v.dia(), items[i].truth), depth);
    }
    for (std::size_t i = 0; i < before && !found; ++i) {
      for (std::size_t j = 0; j < before && !found; ++j) {
        if (items[i].depth != depth - 1 && items[j].depth != depth - 1) continue;
        const Item x = items[i];
        const Item y = items[j];
        offer(ModalFormula::impl(x.formula, y.formula), ops::implication(m, x.truth, y.truth), depth);
        if (i < j) {
          offer(ModalFormula::conj(x.formula, y.formula), x.truth & y.truth, depth);
          offer(ModalFormula::disj(x.formula, y.formula), x.truth | y.truth, depth);
        }
      }
    }
    if (items.size() == before) break;
  }
  return found;
}

// ---------------------------------------------------------------------------
// Interchange format

namespace detail {

inline const KripkeStructure& side(const KripkeStructure& m1, const KripkeStructure& m2, Direction d, bool source) {
  return (d == Direction::forward) == source ? m1 : m2;
}

inline std::size_t pair_world(const nlohmann::json& j, const KripkeStructure& m, const char* field) {
  if (!j.is_string()) throw InputError(std::string("\"") + field + "\" must name a world");
  return m.at(j.get<std::string>());
}

inline Direction pair_direction(const nlohmann::json& p) {
  if (!p.is_object() || !p.contains("dir") || !p["dir"].is_string())
    throw InputError("relation entries need \"dir\", \"from\" and \"to\"");
  return parse_direction(p["dir"].get<std::string>());
}

inline void require_array(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
}

}  // namespace detail

/// Pairs as [{"dir": "12"|"21", "from": name, "to": name}, …].
inline std::set<DirectedPair> pairs_from_json(const nlohmann::json& arr, const KripkeStructure& m1,
                                              const KripkeStructure& m2) {
  detail::require_array(arr, "relation");
  std::set<DirectedPair> out;
  for (const auto& p : arr) {
    const Direction d = detail::pair_direction(p);
    if (!p.contains("from") || !p.contains("to")) throw InputError("relation entries need \"dir\", \"from\" and \"to\"");
    out.insert({d, detail::pair_world(p["from"], detail::side(m1, m2, d, true), "from"),
                detail::pair_world(p["to"], detail::side(m1, m2, d, false), "to")});
  }
  return out;
}

inline nlohmann::json pairs_to_json(const std::set<DirectedPair>& pairs, const KripkeStructure& m1,
                                    const KripkeStructure& m2) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : pairs)
    out.push_back({{"dir", direction_code(p.dir)},
                   {"from", detail::side(m1, m2, p.dir, true).name(p.from)},
                   {"to", detail::side(m1, m2, p.dir, false).name(p.to)}});
  return out;
}

/// {"relA": [...], "relB": [...]}; relB is optional.
inline Asimulation relation_from_json(const nlohmann::json& doc, const KripkeStructure& m1, const KripkeStructure& m2) {
  if (!doc.is_object() || !doc.contains("relA")) throw InputError("relation document needs \"relA\"");
  Asimulation rel{pairs_from_json(doc["relA"], m1, m2), std::nullopt};
  if (doc.contains("relB")) rel.relB = pairs_from_json(doc["relB"], m1, m2);
  return rel;
}

inline nlohmann::json relation_to_json(const Asimulation& rel, const KripkeStructure& m1, const KripkeStructure& m2) {
  nlohmann::json out{{"relA", pairs_to_json(rel.relA, m1, m2)}};
  if (rel.relB) out["relB"] = pairs_to_json(*rel.relB, m1, m2);
  return out;
}

namespace detail {

inline std::set<SeqPair> seq_pairs_from_json(const nlohmann::json& arr, const KripkeStructure& m1,
                                             const KripkeStructure& m2) {
  require_array(arr, "relation");
  std::set<SeqPair> out;
  for (const auto& p : arr) {
    const Direction d = pair_direction(p);
    if (!p.contains("from") || !p.contains("to")) throw InputError("relation entries need \"dir\", \"from\" and \"to\"");
    SeqPair sp{d, {}, {}};
    require_array(p["from"], "\"from\"");
    require_array(p["to"], "\"to\"");
    for (const auto& w : p["from"]) sp.from.push_back(pair_world(w, side(m1, m2, d, true), "from"));
    for (const auto& w : p["to"]) sp.to.push_back(pair_world(w, side(m1, m2, d, false), "to"));
    out.insert(std::move(sp));
  }
  return out;
}

inline nlohmann::json seq_pairs_to_json(const std::set<SeqPair>& pairs, const KripkeStructure& m1,
                                        const KripkeStructure& m2) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : pairs) {
    nlohmann::json from = nlohmann::json::array();
    nlohmann::json to = nlohmann::json::array();
    for (std::size_t w : p.from) from.push_back(side(m1, m2, p.dir, true).name(w));
    for (std::size_t w : p.to) to.push_back(side(m1, m2, p.dir, false).name(w));
    out.push_back({{"dir", direction_code(p.dir)}, {"from", from}, {"to", to}});
  }
  return out;
}

}  // namespace detail

/// As relation_from_json with "from"/"to" holding arrays of world names.
inline SeqAsimulation seq_relation_from_json(const nlohmann::json& doc, const KripkeStructure& m1,
                                             const KripkeStructure& m2) {
  if (!doc.is_object() || !doc.contains("relA")) throw InputError("relation document needs \"relA\"");
  SeqAsimulation rel{detail::seq_pairs_from_json(doc["relA"], m1, m2), std::nullopt};
  if (doc.contains("relB")) rel.relB = detail::seq_pairs_from_json(doc["relB"], m1, m2);
  return rel;
}

inline nlohmann::json seq_relation_to_json(const SeqAsimulation& rel, const KripkeStructure& m1,
                                           const KripkeStructure& m2) {
  nlohmann::json out{{"relA", detail::seq_pairs_to_json(rel.relA, m1, m2)}};
  if (rel.relB) out["relB"] = detail::seq_pairs_to_json(*rel.relB, m1, m2);
  return out;
}

}  // namespace masim
