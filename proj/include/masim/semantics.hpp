#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "masim/error.hpp"
#include "masim/kripke.hpp"
#include "masim/syntax.hpp"

namespace masim {

/// Choice of box clause (1 or 2) and diamond clause (1 or 2).
class Variant {
 public:
  constexpr Variant(int box_clause, int diamond_clause) : box_(box_clause), dia_(diamond_clause) {
    if ((box_ != 1 && box_ != 2) || (dia_ != 1 && dia_ != 2)) throw InputError("variant clauses must be 1 or 2");
  }

  constexpr int box() const noexcept { return box_; }
  constexpr int dia() const noexcept { return dia_; }

  /// "11", "12", "21" or "22".
  std::string code() const { return std::to_string(box_) + std::to_string(dia_); }

  static Variant parse(std::string_view code) {
    if (code.size() != 2 || (code[0] != '1' && code[0] != '2') || (code[1] != '1' && code[1] != '2'))
      throw InputError("unknown variant '" + std::string(code) + "' (expected 11, 12, 21 or 22)");
    return Variant(code[0] - '0', code[1] - '0');
  }

  static constexpr std::array<Variant, 4> all() { return {Variant{1, 1}, Variant{1, 2}, Variant{2, 1}, Variant{2, 2}}; }

  friend constexpr bool operator==(Variant, Variant) = default;

 private:
  int box_;
  int dia_;
};

// ---------------------------------------------------------------------------
// Set-level operators shared by evaluation and enumeration.

namespace ops {

/// {w : every r-successor of w is in s}.
inline WorldSet all_successors_in(const KripkeStructure& m, Rel r, const WorldSet& s) {
  WorldSet out(m.size());
  for (std::size_t w = 0; w < m.size(); ++w)
    if (m.image(r, w).is_subset_of(s)) out.set(w);
  return out;
}

/// {w : some r-successor of w is in s}.
inline WorldSet some_successor_in(const KripkeStructure& m, Rel r, const WorldSet& s) {
  WorldSet out(m.size());
  for (std::size_t w = 0; w < m.size(); ++w)
    if (m.image(r, w).intersects(s)) out.set(w);
  return out;
}

inline WorldSet implication(const KripkeStructure& m, const WorldSet& lhs, const WorldSet& rhs) {
  return all_successors_in(m, Rel::R, ~lhs | rhs);
}

inline WorldSet box(const KripkeStructure& m, int clause, const WorldSet& s) {
  WorldSet inner = all_successors_in(m, Rel::Box, s);
  return clause == 1 ? inner : all_successors_in(m, Rel::R, inner);
}

inline WorldSet dia(const KripkeStructure& m, int clause, const WorldSet& s) {
  WorldSet inner = some_successor_in(m, Rel::Dia, s);
  return clause == 1 ? inner : all_successors_in(m, Rel::R, inner);
}

}  // namespace ops

/// Worlds of m satisfying I under variant v.
inline WorldSet truth_set(const KripkeStructure& m, const ModalFormula& f, Variant v) {
  std::unordered_map<const void*, WorldSet> memo;
  auto go = [&](auto&& self, const ModalFormula& g) -> WorldSet {
    if (auto it = memo.find(g.id()); it != memo.end()) return it->second;
    WorldSet out(m.size());
    using K = ModalFormula::Kind;
    switch (g.kind()) {
      case K::bottom: break;
      case K::prop: out = m.extension(g.index()); break;
      case K::conj: out = self(self, g.lhs()) & self(self, g.rhs()); break;
      case K::disj: out = self(self, g.lhs()) | self(self, g.rhs()); break;
      case K::impl: out = ops::implication(m, self(self, g.lhs()), self(self, g.rhs())); break;
      case K::box: out = ops::box(m, v.box(), self(self, g.child())); break;
      case K::dia: out = ops::dia(m, v.dia(), self(self, g.child())); break;
    }
    memo.emplace(g.id(), out);
    return out;
  };
  return go(go, f);
}

/// M, w ⊨ I under variant v.
inline bool eval_modal(const KripkeStructure& m, std::size_t w, const ModalFormula& f, Variant v) {
  if (w >= m.size()) throw ModelError("unknown world index " + std::to_string(w));
  return truth_set(m, f, v).test(w);
}

inline bool eval_modal(const KripkeStructure& m, std::string_view world, const ModalFormula& f, Variant v) {
  return eval_modal(m, m.at(world), f, v);
}

// ---------------------------------------------------------------------------
// Classical evaluation of correspondence formulas.

using Environment = std::map<std::string, std::size_t>;

namespace detail {

/// Truth table of a formula over assignments to its free variables.
/// Variable i (in sorted order) is digit i of the assignment in base |U|.
struct FolTable {
  std::vector<std::string> vars;
  std::vector<char> bits;
};

inline constexpr std::size_t kMaxTableCells = std::size_t{1} << 22;

inline std::size_t table_cells(std::size_t n, std::size_t arity) {
  std::size_t cells = 1;
  for (std::size_t i = 0; i < arity; ++i) {
    if (cells > kMaxTableCells / n) return kMaxTableCells + 1;
    cells *= n;
  }
  return cells;
}

/// Decodes an assignment index into per-variable worlds.
inline void decode(std::size_t index, std::size_t n, std::vector<std::size_t>& out) {
  for (auto& w : out) {
    w = index % n;
    index /= n;
  }
}

inline std::size_t lookup(const FolTable& t, const std::vector<std::string>& vars, const std::vector<std::size_t>& assign,
                          std::size_t n) {
  std::size_t index = 0;
  std::size_t scale = 1;
  for (const auto& v : t.vars) {
    const auto pos = static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
    index += assign[pos] * scale;
    scale *= n;
  }
  return index;
}

inline bool fol_naive(const KripkeStructure& m, const FolFormula& f, Environment& env) {
  using K = FolFormula::Kind;
  switch (f.kind()) {
    case K::bottom: return false;
    case K::pred: return m.holds(f.index(), env.at(f.vars()[0]));
    case K::rel: return m.has_edge(f.relation(), env.at(f.vars()[0]), env.at(f.vars()[1]));
    case K::conj: return fol_naive(m, f.lhs(), env) && fol_naive(m, f.rhs(), env);
    case K::disj: return fol_naive(m, f.lhs(), env) || fol_naive(m, f.rhs(), env);
    case K::impl: return !fol_naive(m, f.lhs(), env) || fol_naive(m, f.rhs(), env);
    case K::forall:
    case K::exists: {
      const std::string& y = f.bound_var();
      const auto it = env.find(y);
      const bool had = it != env.end();
      const std::size_t saved = had ? it->second : 0;
      const bool universal = f.kind() == K::forall;
      bool result = universal;
      for (std::size_t w = 0; w < m.size(); ++w) {
        env[y] = w;
        if (fol_naive(m, f.body(), env) != universal) {
          result = !universal;
          break;
        }
      }
      if (had)
        env[y] = saved;
      else
        env.erase(y);
      return result;
    }
  }
  return false;
}

/// Builds the table of f bottom-up; returns false when some table would be
/// too large, in which case the caller falls back to naive evaluation.
inline bool fol_table(const KripkeStructure& m, const FolFormula& f, FolTable& out) {
  using K = FolFormula::Kind;
  const std::size_t n = m.size();
  out.vars.assign(f.free_variables().begin(), f.free_variables().end());
  const std::size_t cells = table_cells(n, out.vars.size());
  if (cells > kMaxTableCells) return false;
  out.bits.assign(cells, 0);
  std::vector<std::size_t> assign(out.vars.size());

  switch (f.kind()) {
    case K::bottom: return true;
    case K::pred:
      for (std::size_t w = 0; w < n; ++w) out.bits[w] = m.holds(f.index(), w);
      return true;
    case K::rel: {
      const auto& a = f.vars()[0];
      const auto& b = f.vars()[1];
      for (std::size_t i = 0; i < cells; ++i) {
        decode(i, n, assign);
        const std::size_t wa = assign[a == out.vars[0] ? 0 : 1];
        const std::size_t wb = assign[b == out.vars[0] ? 0 : 1];
        out.bits[i] = m.has_edge(f.relation(), wa, wb);
      }
      return true;
    }
    case K::conj:
    case K::disj:
    case K::impl: {
      FolTable l, r;
      if (!fol_table(m, f.lhs(), l) || !fol_table(m, f.rhs(), r)) return false;
      for (std::size_t i = 0; i < cells; ++i) {
        decode(i, n, assign);
        const bool x = l.bits[lookup(l, out.vars, assign, n)];
        const bool y = r.bits[lookup(r, out.vars, assign, n)];
        out.bits[i] = f.kind() == K::conj ? (x && y) : f.kind() == K::disj ? (x || y) : (!x || y);
      }
      return true;
    }
    case K::forall:
    case K::exists: {
      FolTable b;
      if (!fol_table(m, f.body(), b)) return false;
      const bool universal = f.kind() == K::forall;
      const auto ypos = std::find(b.vars.begin(), b.vars.end(), f.bound_var());
      if (ypos == b.vars.end()) {
        out.bits = b.bits;  // domain is non-empty
        return true;
      }
      const std::size_t yi = static_cast<std::size_t>(ypos - b.vars.begin());
      std::vector<std::size_t> inner(b.vars.size());
      for (std::size_t i = 0; i < cells; ++i) {
        decode(i, n, assign);
        for (std::size_t j = 0, k = 0; j < inner.size(); ++j)
          if (j != yi) inner[j] = assign[k++];
        bool acc = universal;
        for (std::size_t w = 0; w < n && acc == universal; ++w) {
          inner[yi] = w;
          std::size_t index = 0;
          for (std::size_t j = inner.size(); j-- > 0;) index = index * n + inner[j];
          if (static_cast<bool>(b.bits[index]) != universal) acc = !universal;
        }
        out.bits[i] = acc;
      }
      return true;
    }
  }
  return true;
}

inline void require_bound(const FolFormula& f, const Environment& env) {
  for (const auto& v : f.free_variables())
    if (!env.contains(v)) throw InputError("free variable '" + v + "' is not bound by the environment");
}

}  // namespace detail

/// M, env ⊨ φ with quantifiers ranging over all worlds.
inline bool eval_fol(const KripkeStructure& m, const Environment& env, const FolFormula& f) {
  detail::require_bound(f, env);
  for (const auto& [v, w] : env)
    if (w >= m.size()) throw ModelError("environment maps '" + v + "' to an unknown world");
  detail::FolTable t;
  if (detail::fol_table(m, f, t)) {
    std::vector<std::size_t> assign;
    for (const auto& v : t.vars) assign.push_back(env.at(v));
    std::size_t index = 0;
    for (std::size_t j = assign.size(); j-- > 0;) index = index * m.size() + assign[j];
    return t.bits[index];
  }
  Environment copy = env;
  return detail::fol_naive(m, f, copy);
}

/// {w : M, {var ↦ w} ⊨ φ} for a formula whose free variables are among {var}.
inline WorldSet satisfying_worlds(const KripkeStructure& m, const FolFormula& f, const std::string& var) {
  for (const auto& v : f.free_variables())
    if (v != var) throw InputError("free variable '" + v + "' is not bound by the environment");
  WorldSet out(m.size());
  detail::FolTable t;
  if (detail::fol_table(m, f, t)) {
    for (std::size_t w = 0; w < m.size(); ++w)
      if (t.vars.empty() ? t.bits[0] : t.bits[w]) out.set(w);
    return out;
  }
  for (std::size_t w = 0; w < m.size(); ++w) {
    Environment env{{var, w}};
    if (detail::fol_naive(m, f, env)) out.set(w);
  }
  return out;
}

}  // namespace masim
