#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "masim/asimulation.hpp"
#include "masim/error.hpp"
#include "masim/kripke.hpp"
#include "masim/semantics.hpp"
#include "masim/syntax.hpp"
#include "masim/translate.hpp"

namespace masim {

enum class Quantifier : std::uint8_t { forall, exists };

struct GuardedQuantifier {
  Quantifier quantifier;
  Rel relation;

  friend bool operator==(const GuardedQuantifier&, const GuardedQuantifier&) = default;
};

/// Prefix of guarded quantifiers of a generalized modality, outermost first.
struct ModalitySignature {
  std::vector<GuardedQuantifier> prefix;

  friend bool operator==(const ModalitySignature&, const ModalitySignature&) = default;
};

/// Parses "A:R;E:Rd": A is ∀, E is ∃, relations R, Rb, Rd, outermost first.
inline ModalitySignature parse_modality_signature(std::string_view text) {
  ModalitySignature sig;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(';', pos), text.size());
    std::string item(text.substr(pos, end - pos));
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) throw ParseError("expected <A|E>:<relation>", pos);
    const std::string q = item.substr(0, colon);
    const std::string r = item.substr(colon + 1);
    GuardedQuantifier g{};
    if (q == "A")
      g.quantifier = Quantifier::forall;
    else if (q == "E")
      g.quantifier = Quantifier::exists;
    else
      throw ParseError("unknown quantifier '" + q + "' (expected A or E)", pos);
    if (r == "R")
      g.relation = Rel::R;
    else if (r == "Rb")
      g.relation = Rel::Box;
    else if (r == "Rd")
      g.relation = Rel::Dia;
    else
      throw ParseError("unknown relation '" + r + "' (expected R, Rb or Rd)", pos + colon + 1);
    sig.prefix.push_back(g);
    pos = end + 1;
  }
  return sig;
}

inline std::string to_string(const ModalitySignature& sig) {
  std::string out;
  for (std::size_t i = 0; i < sig.prefix.size(); ++i) {
    if (i) out += ';';
    out += sig.prefix[i].quantifier == Quantifier::forall ? "A:" : "E:";
    out += rel_name(sig.prefix[i].relation);
  }
  return out;
}

/// Signatures of the four built-in modal clauses.
namespace builtin_signatures {
inline ModalitySignature box1() { return {{{Quantifier::forall, Rel::Box}}}; }
inline ModalitySignature box2() { return {{{Quantifier::forall, Rel::R}, {Quantifier::forall, Rel::Box}}}; }
inline ModalitySignature dia1() { return {{{Quantifier::exists, Rel::Dia}}}; }
inline ModalitySignature dia2() { return {{{Quantifier::forall, Rel::R}, {Quantifier::exists, Rel::Dia}}}; }
}  // namespace builtin_signatures

/// Guarded-prefix translation: Q y(rel(prev, y) ⊙ …) from the outermost
/// quantifier inwards, with ⊙ = → under ∀ and ∧ under ∃, and the v-translation
/// of I at the innermost variable.
inline FolFormula gen_st(const ModalitySignature& sig, const ModalFormula& f, const std::string& x = "x",
                         Variant v = Variant(2, 2)) {
  if (sig.prefix.empty()) throw InputError("modality signature must have at least one quantifier");
  detail::FreshVariables fresh(x);
  std::vector<std::string> vars;
  for (std::size_t i = 0; i < sig.prefix.size(); ++i) vars.push_back(fresh.next());
  detail::Translator tr(v, fresh);
  FolFormula body = tr(f, vars.back());
  for (std::size_t i = sig.prefix.size(); i-- > 0;) {
    const std::string& prev = i == 0 ? x : vars[i - 1];
    FolFormula guard = FolFormula::rel(sig.prefix[i].relation, prev, vars[i]);
    body = sig.prefix[i].quantifier == Quantifier::forall
               ? FolFormula::forall(vars[i], FolFormula::impl(std::move(guard), std::move(body)))
               : FolFormula::exists(vars[i], FolFormula::conj(std::move(guard), std::move(body)));
  }
  return body;
}

// ---------------------------------------------------------------------------
// Condition schemas

/// universal: a A_p b and a chain from b in the target model must be matched
/// by a chain from a in the source model ending in A_q.
/// existential: a A_p b and a chain from a in the source model must be matched
/// by a chain from b in the target model ending in A_q.
enum class SchemaForm : std::uint8_t { universal, existential };

struct ConditionSchema {
  /// 1-based relation indices.
  std::size_t premise = 1;
  SchemaForm form = SchemaForm::universal;
  std::vector<Rel> chain;
  std::size_t conclusion = 1;

  friend bool operator==(const ConditionSchema&, const ConditionSchema&) = default;
};

inline std::string to_string(const ConditionSchema& s) {
  const bool uni = s.form == SchemaForm::universal;
  const char* premise_side = uni ? "b" : "a";
  const char* witness_side = uni ? "a" : "b";
  auto chain_text = [&](const char* side, const char* tag) {
    std::string out;
    for (std::size_t i = 0; i < s.chain.size(); ++i) {
      if (i) out += " & ";
      out += std::string(rel_name(s.chain[i])) + tag + "(" + side + std::to_string(i + 1) + "," + side +
             std::to_string(i + 2) + ")";
    }
    return out;
  };
  const std::size_t last = s.chain.size() + 1;
  std::string witnesses;
  for (std::size_t i = 2; i <= last; ++i) witnesses += std::string(i > 2 ? "," : "") + witness_side + std::to_string(i);
  return "a1 A" + std::to_string(s.premise) + " b1 & " + chain_text(premise_side, uni ? "_j" : "_i") + " => exists " +
         witnesses + " (" + chain_text(witness_side, uni ? "_i" : "_j") + " & a" + std::to_string(last) + " A" +
         std::to_string(s.conclusion) + " b" + std::to_string(last) + ")";
}

/// 1 + number of quantifier alternations along the prefix.
inline std::size_t relation_count(const ModalitySignature& sig) {
  if (sig.prefix.empty()) throw InputError("modality signature must have at least one quantifier");
  std::size_t k = 1;
  for (std::size_t i = 1; i < sig.prefix.size(); ++i) k += sig.prefix[i].quantifier != sig.prefix[i - 1].quantifier;
  return k;
}

/// Schemas r1 … rk, built from the innermost quantifier outwards. A quantifier
/// of the same kind as the one inside it extends the chain of the schema whose
/// premise is A1; a change of kind moves that schema's premise to a new
/// relation A_k and adds a one-step schema from A1 into A_k.
inline std::vector<ConditionSchema> gen_conditions(const ModalitySignature& sig) {
  if (sig.prefix.empty()) throw InputError("modality signature must have at least one quantifier");
  auto form_of = [](Quantifier q) { return q == Quantifier::forall ? SchemaForm::universal : SchemaForm::existential; };
  const std::size_t n = sig.prefix.size();
  std::vector<ConditionSchema> out{{1, form_of(sig.prefix[n - 1].quantifier), {sig.prefix[n - 1].relation}, 1}};
  std::size_t current = 0;
  std::size_t k = 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    const GuardedQuantifier& g = sig.prefix[i];
    if (g.quantifier == sig.prefix[i + 1].quantifier) {
      auto& chain = out[current].chain;
      chain.insert(chain.begin(), g.relation);
    } else {
      ++k;
      out[current].premise = k;
      out.push_back({1, form_of(g.quantifier), {g.relation}, k});
      current = out.size() - 1;
    }
  }
  return out;
}

namespace detail {

/// Endpoints of chain-paths from w, as a set.
inline WorldSet chain_image(const KripkeStructure& m, const std::vector<Rel>& chain, std::size_t w) {
  WorldSet cur(m.size());
  cur.set(w);
  for (Rel r : chain) {
    WorldSet next(m.size());
    for (std::size_t x = cur.find_first(); x != WorldSet::npos; x = cur.find_next(x)) next |= m.image(r, x);
    cur = std::move(next);
  }
  return cur;
}

/// Calls visit(path) for every chain-path from w (path excludes w).
template <class Visit>
bool for_each_path(const KripkeStructure& m, const std::vector<Rel>& chain, std::size_t w, std::vector<std::size_t>& path,
                   Visit&& visit) {
  if (path.size() == chain.size()) return visit(path);
  const std::size_t from = path.empty() ? w : path.back();
  for (std::size_t x : m.successors(chain[path.size()], from)) {
    path.push_back(x);
    const bool go_on = for_each_path(m, chain, w, path, visit);
    path.pop_back();
    if (!go_on) return false;
  }
  return true;
}

}  // namespace detail

/// Checks relations A1 … Ak against the basic conditions (on A1), (type) on
/// every A_p and every generated schema. Violations of schema i are named "r<i>".
inline Verdict check_generated(const KripkeStructure& m1, std::size_t t, const KripkeStructure& m2, std::size_t u,
                               const ModalitySignature& sig, const std::vector<std::set<DirectedPair>>& relations) {
  if (t >= m1.size() || u >= m2.size()) throw ModelError("point outside its model");
  const auto schemas = gen_conditions(sig);
  const std::size_t k = relation_count(sig);
  if (relations.size() != k)
    throw InputError("signature needs " + std::to_string(k) + " relations, got " + std::to_string(relations.size()));

  const detail::ModelPair mp(m1, m2);
  Verdict verdict;
  std::vector<detail::Membership> mem(k, detail::Membership(mp));
  for (std::size_t p = 0; p < k; ++p)
    for (const auto& pair : relations[p]) {
      if (mp.in_range(pair))
        mem[p].insert(pair.dir, pair.from, pair.to);
      else
        verdict.violations.push_back({p == 0 ? "type" : "type(A" + std::to_string(p + 1) + ")",
                                      "(" + std::string(direction_code(pair.dir)) + ":" + std::to_string(pair.from) +
                                          "," + std::to_string(pair.to) + ") outside the models"});
    }

  if (!mem[0].contains(Direction::forward, t, u))
    verdict.violations.push_back({"elem", mp.pair_text(Direction::forward, t, u) + " missing"});
  const Conditions basic = Conditions::basic().without(Condition::type).without(Condition::elem);
  for (const auto& pair : relations[0]) {
    if (!mp.in_range(pair)) continue;
    detail::a_failures(mp, mem[0], nullptr, basic, pair.dir, pair.from, pair.to,
                       [&](Condition c, std::size_t x, std::size_t y) {
                         verdict.violations.push_back(
                             {condition_name(c), detail::failure_text(mp, c, pair.dir, pair.from, pair.to, x, y)});
                         return true;
                       });
  }

  for (std::size_t i = 0; i < schemas.size(); ++i) {
    const ConditionSchema& s = schemas[i];
    const std::string name = "r" + std::to_string(i + 1);
    const detail::Membership& conclusion = mem[s.conclusion - 1];
    for (const auto& pair : relations[s.premise - 1]) {
      if (!mp.in_range(pair)) continue;
      const KripkeStructure& src = mp.source(pair.dir);
      const KripkeStructure& tgt = mp.target(pair.dir);
      const bool uni = s.form == SchemaForm::universal;
      const KripkeStructure& premise_model = uni ? tgt : src;
      const std::size_t premise_start = uni ? pair.to : pair.from;
      const WorldSet reach = detail::chain_image(uni ? src : tgt, s.chain, uni ? pair.from : pair.to);
      std::vector<std::size_t> path;
      detail::for_each_path(premise_model, s.chain, premise_start, path, [&](const std::vector<std::size_t>& p) {
        const std::size_t end = p.back();
        bool found = false;
        for (std::size_t w = reach.find_first(); w != WorldSet::npos && !found; w = reach.find_next(w))
          found = uni ? conclusion.contains(pair.dir, w, end) : conclusion.contains(pair.dir, end, w);
        if (!found) {
          std::string text = mp.pair_text(pair.dir, pair.from, pair.to) + " path";
          for (std::size_t x : p) text += " " + premise_model.name(x);
          verdict.violations.push_back({name, std::move(text)});
        }
        return true;
      });
    }
  }
  return verdict;
}

}  // namespace masim
