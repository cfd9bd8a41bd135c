#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "masim/asimulation.hpp"
#include "masim/error.hpp"
#include "masim/kripke.hpp"
#include "masim/semantics.hpp"
#include "masim/syntax.hpp"
#include "masim/translate.hpp"

namespace masim {

inline constexpr std::size_t kNoSizeCap = std::numeric_limits<std::size_t>::max();

/// One minimum-size representative per truth set over the corpus, among the
/// formulas over the signature with translation degree at most degree_bound
/// and size at most size_cap.
struct FormulaPool {
  Signature signature;
  Variant variant{2, 2};
  std::size_t degree_bound = 0;
  std::size_t size_cap = kNoSizeCap;
  std::vector<ModalFormula> members;
  /// translation_degree of each member.
  std::vector<std::size_t> degrees;
  /// Truth set of each member over the corpus union.
  std::vector<WorldSet> truth;
  /// Disjoint union of the corpus; part i starts at corpus_offsets[i].
  std::shared_ptr<const KripkeStructure> corpus;
  std::vector<std::size_t> corpus_offsets;

  std::size_t size() const noexcept { return members.size(); }

  /// Index of the member with this truth set, if any.
  std::optional<std::size_t> find(const WorldSet& s) const {
    for (std::size_t i = 0; i < truth.size(); ++i)
      if (truth[i] == s) return i;
    return std::nullopt;
  }
};

namespace detail {

struct PoolItem {
  ModalFormula formula;
  WorldSet truth;
  std::size_t degree;
  std::size_t seq;
};

}  // namespace detail

/// Pools for every bound 0..max_bound from one search.
///
/// The search pops candidates in order of (size, discovery) and keeps an item
/// only if no kept item with the same truth set has smaller or equal degree,
/// so the kept items are exactly the size-minimal representatives per
/// (truth set, degree) frontier. ⊥ represents the empty truth set and, from
/// bound 1 on, ⊥→⊥ represents the full one.
inline std::vector<FormulaPool> enumerate_pools(const Signature& sig, Variant v, std::size_t max_bound,
                                                const std::vector<const KripkeStructure*>& corpus,
                                                std::size_t size_cap = kNoSizeCap) {
  if (corpus.empty()) throw InputError("formula pools need a non-empty corpus");
  auto du = std::make_shared<DisjointUnion>(disjoint_union(corpus));
  const KripkeStructure& m = du->model;
  const std::size_t n = m.size();

  struct Candidate {
    std::size_t size;
    std::size_t seq;
    std::size_t degree;
    ModalFormula formula;
    WorldSet truth;
  };
  auto later = [](const Candidate& a, const Candidate& b) {
    return a.size != b.size ? a.size > b.size : a.seq > b.seq;
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(later)> heap(later);
  std::size_t seq = 0;

  // Kept items per truth set, each with its degree (strictly decreasing in
  // discovery order) and position in `kept`.
  std::map<WorldSet, std::vector<std::pair<std::size_t, std::size_t>>> frontier;
  std::vector<detail::PoolItem> kept;
  std::map<std::pair<WorldSet, std::size_t>, std::size_t> best_pending;

  auto dominated = [&](const WorldSet& s, std::size_t degree) {
    auto it = frontier.find(s);
    if (it == frontier.end()) return false;
    for (const auto& [d, _] : it->second)
      if (d <= degree) return true;
    return false;
  };
  auto push = [&](ModalFormula f, WorldSet s, std::size_t degree) {
    if (degree > max_bound || f.size() > size_cap) return;
    if (dominated(s, degree)) return;
    auto key = std::make_pair(s, degree);
    auto it = best_pending.find(key);
    if (it != best_pending.end() && it->second <= f.size()) return;
    best_pending[key] = f.size();
    const std::size_t sz = f.size();
    heap.push({sz, seq++, degree, std::move(f), std::move(s)});
  };

  push(ModalFormula::bottom(), WorldSet(n), 0);
  for (unsigned p : sig.letters) push(ModalFormula::prop(p), m.extension(p), 0);

  while (!heap.empty()) {
    Candidate c = heap.top();
    heap.pop();
    if (dominated(c.truth, c.degree)) continue;
    frontier[c.truth].emplace_back(c.degree, kept.size());
    kept.push_back({c.formula, c.truth, c.degree, c.seq});
    const detail::PoolItem x = kept.back();

    push(ModalFormula::box(x.formula), ops::box(m, v.box(), x.truth), x.degree + static_cast<std::size_t>(v.box()));
    push(ModalFormula::dia(x.formula), ops::dia(m, v.dia(), x.truth), x.degree + static_cast<std::size_t>(v.dia()));
    const std::size_t count = kept.size();
    for (std::size_t j = 0; j < count; ++j) {
      const detail::PoolItem y = kept[j];
      const std::size_t top = std::max(x.degree, y.degree);
      push(ModalFormula::conj(y.formula, x.formula), y.truth & x.truth, top);
      push(ModalFormula::disj(y.formula, x.formula), y.truth | x.truth, top);
      push(ModalFormula::impl(y.formula, x.formula), ops::implication(m, y.truth, x.truth), top + 1);
      if (j + 1 != count) push(ModalFormula::impl(x.formula, y.formula), ops::implication(m, x.truth, y.truth), top + 1);
    }
  }

  const ModalFormula top_formula = ModalFormula::impl(ModalFormula::bottom(), ModalFormula::bottom());
  WorldSet full(n);
  full.set();
  std::shared_ptr<const KripkeStructure> union_model(du, &du->model);

  std::vector<FormulaPool> pools;
  for (std::size_t bound = 0; bound <= max_bound; ++bound) {
    FormulaPool pool;
    pool.signature = sig;
    pool.variant = v;
    pool.degree_bound = bound;
    pool.size_cap = size_cap;
    pool.corpus = union_model;
    pool.corpus_offsets = du->offsets;
    // For each truth set: the earliest kept item within the bound.
    std::set<std::size_t> chosen;
    for (const auto& [s, entries] : frontier) {
      for (const auto& [d, idx] : entries) {
        if (d <= bound) {
          chosen.insert(idx);
          break;
        }
      }
    }
    for (std::size_t idx : chosen) {
      const auto& item = kept[idx];
      ModalFormula f = item.formula;
      if (item.truth.none())
        f = ModalFormula::bottom();
      else if (bound >= 1 && item.truth == full)
        f = top_formula;
      pool.members.push_back(f);
      pool.degrees.push_back(translation_degree(f, v));
      pool.truth.push_back(item.truth);
    }
    pools.push_back(std::move(pool));
  }
  return pools;
}

/// Pool for a single bound.
inline FormulaPool enumerate_pool(const Signature& sig, Variant v, std::size_t degree_bound,
                                  const std::vector<const KripkeStructure*>& corpus, std::size_t size_cap = kNoSizeCap) {
  return std::move(enumerate_pools(sig, v, degree_bound, corpus, size_cap).back());
}

/// Letters true somewhere in the given models.
inline Signature signature_of(const std::vector<const KripkeStructure*>& models) {
  Signature sig;
  for (const auto* m : models) {
    const auto ls = m->letters();
    sig.letters.insert(ls.begin(), ls.end());
  }
  return sig;
}

// ---------------------------------------------------------------------------
// Type sets

enum class TypeKind : std::uint8_t { tp, tpbar, imp };

/// Subset of a pool, as a bitset over member positions.
struct TypeSet {
  TypeKind kind = TypeKind::tp;
  boost::dynamic_bitset<> members;

  bool subset_of(const TypeSet& other) const { return members.is_subset_of(other.members); }

  std::vector<ModalFormula> formulas(const FormulaPool& pool) const {
    std::vector<ModalFormula> out;
    for (std::size_t i = members.find_first(); i != boost::dynamic_bitset<>::npos; i = members.find_next(i))
      out.push_back(pool.members[i]);
    return out;
  }
};

namespace detail {

/// tp of every world of m: row w is the set of members true at w.
inline std::vector<boost::dynamic_bitset<>> tp_rows(const KripkeStructure& m, const FormulaPool& pool) {
  std::vector<boost::dynamic_bitset<>> rows(m.size(), boost::dynamic_bitset<>(pool.size()));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const WorldSet s = truth_set(m, pool.members[i], pool.variant);
    for (std::size_t w = s.find_first(); w != WorldSet::npos; w = s.find_next(w)) rows[w].set(i);
  }
  return rows;
}

/// imp rows from tp rows: members false at every R◇-successor.
inline std::vector<boost::dynamic_bitset<>> imp_rows(const KripkeStructure& m,
                                                     const std::vector<boost::dynamic_bitset<>>& tp) {
  const std::size_t width = tp.empty() ? 0 : tp[0].size();
  std::vector<boost::dynamic_bitset<>> rows(m.size(), boost::dynamic_bitset<>(width));
  for (std::size_t a = 0; a < m.size(); ++a) {
    rows[a].set();
    for (std::size_t b : m.successors(Rel::Dia, a)) rows[a] -= tp[b];
  }
  return rows;
}

}  // namespace detail

/// tp, tpbar or imp of (M, a) relative to the pool, evaluated on M directly.
inline TypeSet type_set(const KripkeStructure& m, std::size_t a, const FormulaPool& pool, TypeKind kind) {
  if (a >= m.size()) throw ModelError("unknown world index " + std::to_string(a));
  const auto tp = detail::tp_rows(m, pool);
  TypeSet out{kind, {}};
  switch (kind) {
    case TypeKind::tp: out.members = tp[a]; break;
    case TypeKind::tpbar: out.members = ~tp[a]; break;
    case TypeKind::imp: out.members = detail::imp_rows(m, tp)[a]; break;
  }
  return out;
}

/// Conjunction of tp(a) in pool order; entails every pool member true at a
/// over the corpus.
inline ModalFormula complete_conjunction(const KripkeStructure& m, std::size_t a, const FormulaPool& pool) {
  const auto formulas = type_set(m, a, pool, TypeKind::tp).formulas(pool);
  if (formulas.empty()) throw InputError("no pool member is true at the point; the complete conjunction is undefined");
  ModalFormula out = formulas.front();
  for (std::size_t i = 1; i < formulas.size(); ++i) out = ModalFormula::conj(out, formulas[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Canonical constructions

/// Sequence relation built from type inclusion:
///   A holds at index m (sequence length m+1) iff m <= k and
///     tp at bound k-m+2 of the last source world ⊆ that of the last target world;
///   B holds iff m <= k and imp at bound k-m+1 of the target ⊆ that of the source.
/// Materialized from every singleton pair and closed under the extensions
/// the conditions in `conds` inspect (within their guards).
/// pools[l] must have degree_bound l for l in 1..k+2.
inline SeqAsimulation canonical_k_asimulation(const KripkeStructure& m1, std::size_t t, const KripkeStructure& m2,
                                              std::size_t u, std::size_t k, Conditions conds,
                                              const std::vector<FormulaPool>& pools) {
  if (t >= m1.size() || u >= m2.size()) throw ModelError("point outside its model");
  for (std::size_t l = 1; l <= k + 2; ++l)
    if (pools.size() <= l || pools[l].degree_bound != l)
      throw InputError("missing pool for degree bound " + std::to_string(l));

  const detail::ModelPair mp(m1, m2);
  // tp[l][side][w], imp[l][side][w]
  std::vector<std::array<std::vector<boost::dynamic_bitset<>>, 2>> tp(k + 3), imp(k + 3);
  for (std::size_t l = 1; l <= k + 2; ++l)
    for (std::size_t s = 0; s < 2; ++s) {
      tp[l][s] = detail::tp_rows(mp.model(s), pools[l]);
      imp[l][s] = detail::imp_rows(mp.model(s), tp[l][s]);
    }

  auto in_a = [&](const SeqPair& p) {
    const std::size_t m = p.from.size() - 1;
    if (m > k) return false;
    const std::size_t l = k - m + 2;
    return tp[l][mp.source_side(p.dir)][p.from.back()].is_subset_of(tp[l][mp.target_side(p.dir)][p.to.back()]);
  };
  auto in_b = [&](const SeqPair& p) {
    const std::size_t m = p.from.size() - 1;
    if (m > k) return false;
    const std::size_t l = k - m + 1;
    return imp[l][mp.target_side(p.dir)][p.to.back()].is_subset_of(imp[l][mp.source_side(p.dir)][p.from.back()]);
  };

  const bool with_b = conds.needs_b();
  SeqAsimulation out;
  if (with_b) out.relB.emplace();
  std::vector<std::pair<bool, SeqPair>> work;
  auto offer = [&](bool is_b, SeqPair p) {
    if (is_b ? !in_b(p) : !in_a(p)) return;
    auto& target = is_b ? *out.relB : out.relA;
    if (target.insert(p).second) work.emplace_back(is_b, std::move(p));
  };

  for (Direction d : {Direction::forward, Direction::backward})
    for (std::size_t a = 0; a < mp.source(d).size(); ++a)
      for (std::size_t b = 0; b < mp.target(d).size(); ++b) {
        offer(false, SeqPair{d, {a}, {b}});
        if (with_b) offer(true, SeqPair{d, {a}, {b}});
      }

  auto extended = [](const SeqPair& p, std::initializer_list<std::size_t> xs, std::initializer_list<std::size_t> ys) {
    SeqPair q = p;
    q.from.insert(q.from.end(), xs);
    q.to.insert(q.to.end(), ys);
    return q;
  };

  while (!work.empty()) {
    auto [is_b, p] = std::move(work.back());
    work.pop_back();
    const KripkeStructure& src = mp.source(p.dir);
    const KripkeStructure& tgt = mp.target(p.dir);
    const std::size_t a = p.from.back();
    const std::size_t b = p.to.back();
    const std::size_t m = p.from.size() - 1;
    if (is_b) {
      if (conds.has(Condition::diam2_2) && m < k)
        for (std::size_t c : src.successors(Rel::Dia, a))
          for (std::size_t d : tgt.successors(Rel::Dia, b)) offer(false, extended(p, {c}, {d}));
      continue;
    }
    if (conds.has(Condition::step) && m < k)
      for (std::size_t c : src.successors(Rel::R, a))
        for (std::size_t d : tgt.successors(Rel::R, b)) {
          SeqPair q = extended(p, {c}, {d});
          offer(false, SeqPair{flip(q.dir), q.to, q.from});
          offer(false, std::move(q));
        }
    if (conds.has(Condition::box2) && m + 1 < k)
      for (std::size_t c : src.successors(Rel::R, a))
        for (std::size_t e : src.successors(Rel::Box, c))
          for (std::size_t d : tgt.successors(Rel::R, b))
            for (std::size_t f : tgt.successors(Rel::Box, d)) offer(false, extended(p, {c, e}, {d, f}));
    if (conds.has(Condition::box1) && m + 1 < k)
      for (std::size_t c : src.successors(Rel::Box, a))
        for (std::size_t d : tgt.successors(Rel::Box, b)) offer(false, extended(p, {c}, {d}));
    if (conds.has(Condition::diam1) && m < k)
      for (std::size_t c : src.successors(Rel::Dia, a))
        for (std::size_t d : tgt.successors(Rel::Dia, b)) offer(false, extended(p, {c}, {d}));
    if (conds.has(Condition::diam2_1) && m + 1 < k)
      for (std::size_t c : src.successors(Rel::R, a))
        for (std::size_t d : tgt.successors(Rel::R, b)) offer(true, extended(p, {c}, {d}));
  }
  return out;
}

inline SeqAsimulation canonical_k_asimulation(const KripkeStructure& m1, std::size_t t, const KripkeStructure& m2,
                                              std::size_t u, std::size_t k, Variant v,
                                              const std::vector<FormulaPool>& pools) {
  return canonical_k_asimulation(m1, t, m2, u, k, Conditions::of(v), pools);
}

struct CanonicalAsimulation {
  Asimulation relation;
  /// Same relations at bound + 1.
  bool stabilized = false;
};

namespace detail {

inline Asimulation type_inclusion(const ModelPair& mp, bool with_b,
                                  const std::vector<std::array<std::vector<boost::dynamic_bitset<>>, 2>>& tp,
                                  const std::vector<std::array<std::vector<boost::dynamic_bitset<>>, 2>>& imp,
                                  std::size_t first, std::size_t last) {
  Asimulation rel;
  if (with_b) rel.relB.emplace();
  for (Direction d : {Direction::forward, Direction::backward}) {
    const std::size_t ss = mp.source_side(d);
    const std::size_t ts = mp.target_side(d);
    for (std::size_t a = 0; a < mp.source(d).size(); ++a)
      for (std::size_t b = 0; b < mp.target(d).size(); ++b) {
        bool in_a = true;
        bool in_b = true;
        for (std::size_t l = first; l <= last; ++l) {
          in_a = in_a && tp[l][ss][a].is_subset_of(tp[l][ts][b]);
          in_b = in_b && imp[l][ts][b].is_subset_of(imp[l][ss][a]);
        }
        if (in_a) rel.relA.insert({d, a, b});
        if (with_b && in_b) rel.relB->insert({d, a, b});
      }
  }
  return rel;
}

}  // namespace detail

/// A: tp inclusion at every bound up to stabilization_bound; B (diamond
/// clause 2 only): reversed imp inclusion at the same bounds. Pools are built
/// over the two models.
inline CanonicalAsimulation canonical_asimulation(const KripkeStructure& m1, std::size_t t, const KripkeStructure& m2,
                                                  std::size_t u, Variant v, std::size_t stabilization_bound) {
  if (stabilization_bound < 1) throw InputError("stabilization bound must be at least 1");
  if (t >= m1.size() || u >= m2.size()) throw ModelError("point outside its model");
  const detail::ModelPair mp(m1, m2);
  const std::vector<const KripkeStructure*> corpus{&m1, &m2};
  const auto pools = enumerate_pools(signature_of(corpus), v, stabilization_bound + 1, corpus);
  std::vector<std::array<std::vector<boost::dynamic_bitset<>>, 2>> tp(pools.size()), imp(pools.size());
  for (std::size_t l = 0; l < pools.size(); ++l)
    for (std::size_t s = 0; s < 2; ++s) {
      tp[l][s] = detail::tp_rows(mp.model(s), pools[l]);
      imp[l][s] = detail::imp_rows(mp.model(s), tp[l][s]);
    }
  const bool with_b = v.dia() == 2;
  CanonicalAsimulation out;
  out.relation = detail::type_inclusion(mp, with_b, tp, imp, 0, stabilization_bound);
  out.stabilized = detail::type_inclusion(mp, with_b, tp, imp, 0, stabilization_bound + 1) == out.relation;
  return out;
}

}  // namespace masim
