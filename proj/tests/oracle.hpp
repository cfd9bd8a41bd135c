#pragma once

// Reference implementations written straight from the clauses, sharing no
// code with the evaluators under test.

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "masim/masim.hpp"

namespace oracle {

using namespace masim;

inline bool modal(const KripkeStructure& m, std::size_t w, const ModalFormula& f, Variant v) {
  using K = ModalFormula::Kind;
  auto succ = [&](Rel r, std::size_t x) {
    std::vector<std::size_t> out;
    for (std::size_t y = 0; y < m.size(); ++y)
      if (m.has_edge(r, x, y)) out.push_back(y);
    return out;
  };
  switch (f.kind()) {
    case K::bottom: return false;
    case K::prop: return m.holds(f.index(), w);
    case K::conj: return modal(m, w, f.lhs(), v) && modal(m, w, f.rhs(), v);
    case K::disj: return modal(m, w, f.lhs(), v) || modal(m, w, f.rhs(), v);
    case K::impl:
      for (std::size_t y : succ(Rel::R, w))
        if (modal(m, y, f.lhs(), v) && !modal(m, y, f.rhs(), v)) return false;
      return true;
    case K::box: {
      auto all_box = [&](std::size_t x) {
        for (std::size_t z : succ(Rel::Box, x))
          if (!modal(m, z, f.child(), v)) return false;
        return true;
      };
      if (v.box() == 1) return all_box(w);
      for (std::size_t y : succ(Rel::R, w))
        if (!all_box(y)) return false;
      return true;
    }
    case K::dia: {
      auto some_dia = [&](std::size_t x) {
        for (std::size_t z : succ(Rel::Dia, x))
          if (modal(m, z, f.child(), v)) return true;
        return false;
      };
      if (v.dia() == 1) return some_dia(w);
      for (std::size_t y : succ(Rel::R, w))
        if (!some_dia(y)) return false;
      return true;
    }
  }
  return false;
}

inline bool fol(const KripkeStructure& m, std::map<std::string, std::size_t> env, const FolFormula& f) {
  using K = FolFormula::Kind;
  switch (f.kind()) {
    case K::bottom: return false;
    case K::pred: return m.holds(f.index(), env.at(f.vars()[0]));
    case K::rel: return m.has_edge(f.relation(), env.at(f.vars()[0]), env.at(f.vars()[1]));
    case K::conj: return fol(m, env, f.lhs()) && fol(m, env, f.rhs());
    case K::disj: return fol(m, env, f.lhs()) || fol(m, env, f.rhs());
    case K::impl: return !fol(m, env, f.lhs()) || fol(m, env, f.rhs());
    case K::forall:
    case K::exists: {
      const bool universal = f.kind() == K::forall;
      for (std::size_t w = 0; w < m.size(); ++w) {
        env[f.bound_var()] = w;
        if (fol(m, env, f.body()) != universal) return !universal;
      }
      return universal;
    }
  }
  return false;
}

/// Largest quantifier nesting, counted on the tree.
inline std::size_t quantifier_depth(const FolFormula& f) {
  if (f.is_quantifier()) return 1 + quantifier_depth(f.body());
  if (f.is_binary()) return std::max(quantifier_depth(f.lhs()), quantifier_depth(f.rhs()));
  return 0;
}

/// Every cross pair whose endpoints agree on the letters as (base) demands:
/// letters true at the source are true at the target.
inline std::vector<DirectedPair> base_pairs(const KripkeStructure& m1, const KripkeStructure& m2) {
  std::set<unsigned> letters = m1.letters();
  for (unsigned p : m2.letters()) letters.insert(p);
  std::vector<DirectedPair> out;
  for (Direction d : {Direction::forward, Direction::backward}) {
    const KripkeStructure& src = d == Direction::forward ? m1 : m2;
    const KripkeStructure& tgt = d == Direction::forward ? m2 : m1;
    for (std::size_t a = 0; a < src.size(); ++a)
      for (std::size_t b = 0; b < tgt.size(); ++b) {
        bool ok = true;
        for (unsigned p : letters) ok = ok && (!src.holds(p, a) || tgt.holds(p, b));
        if (ok) out.push_back({d, a, b});
      }
  }
  return out;
}

/// B pairs allowed by (diam-2(2)) once A is fixed: a R◇ c ⇒ ∃d (b R◇ d ∧ c A d).
inline std::set<DirectedPair> largest_b(const KripkeStructure& m1, const KripkeStructure& m2,
                                        const std::set<DirectedPair>& relA) {
  std::set<DirectedPair> out;
  for (Direction d : {Direction::forward, Direction::backward}) {
    const KripkeStructure& src = d == Direction::forward ? m1 : m2;
    const KripkeStructure& tgt = d == Direction::forward ? m2 : m1;
    for (std::size_t a = 0; a < src.size(); ++a)
      for (std::size_t b = 0; b < tgt.size(); ++b) {
        bool ok = true;
        for (std::size_t c = 0; c < src.size() && ok; ++c) {
          if (!src.has_edge(Rel::Dia, a, c)) continue;
          bool found = false;
          for (std::size_t e = 0; e < tgt.size() && !found; ++e)
            found = tgt.has_edge(Rel::Dia, b, e) && relA.count({d, c, e});
          ok = found;
        }
        if (ok) out.insert({d, a, b});
      }
  }
  return out;
}

struct SubsetUnion {
  Asimulation relation;
  std::size_t subsets = 0;
};

/// Union of every relation over the base-surviving pairs that passes
/// check_asimulation without (elem). With B, each A is paired with largest_b(A),
/// which passes whenever any B does.
inline SubsetUnion subset_union(const KripkeStructure& m1, const KripkeStructure& m2, Conditions conds) {
  const auto candidates = base_pairs(m1, m2);
  const Conditions checked = conds.without(Condition::elem);
  SubsetUnion out;
  if (conds.needs_b()) out.relation.relB.emplace();
  const std::uint64_t total = std::uint64_t{1} << candidates.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    Asimulation rel;
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (mask >> i & 1) rel.relA.insert(candidates[i]);
    if (conds.needs_b()) rel.relB = largest_b(m1, m2, rel.relA);
    ++out.subsets;
    if (!check_asimulation(m1, 0, m2, 0, checked, rel).ok()) continue;
    out.relation.relA.insert(rel.relA.begin(), rel.relA.end());
    if (rel.relB) out.relation.relB->insert(rel.relB->begin(), rel.relB->end());
  }
  return out;
}

}  // namespace oracle
