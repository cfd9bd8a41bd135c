#pragma once

#include <algorithm>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "masim/asimulation.hpp"
#include "masim/error.hpp"
#include "masim/kripke.hpp"
#include "masim/semantics.hpp"
#include "masim/syntax.hpp"
#include "masim/types.hpp"

namespace masim {

/// Class of models cut out by a finite set of sentences.
class ModelClassSpec {
 public:
  ModelClassSpec(std::string name, std::vector<FolFormula> axioms) : name_(std::move(name)), axioms_(std::move(axioms)) {
    for (const auto& ax : axioms_)
      if (!ax.free_variables().empty())
        throw InputError("axiom '" + to_string(ax) + "' has free variable '" + *ax.free_variables().begin() + "'");
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<FolFormula>& axioms() const noexcept { return axioms_; }

 private:
  std::string name_;
  std::vector<FolFormula> axioms_;
};

inline bool satisfies_axioms(const KripkeStructure& m, const ModelClassSpec& spec) {
  for (const auto& ax : spec.axioms())
    if (!eval_fol(m, {}, ax)) return false;
  return true;
}

/// One sentence per line; blank lines and lines starting with '#' are skipped.
inline ModelClassSpec parse_axioms(std::string name, std::string_view text) {
  std::vector<FolFormula> axioms;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    axioms.push_back(parse_fol(line));
  }
  return ModelClassSpec(std::move(name), std::move(axioms));
}

namespace model_classes {

inline ModelClassSpec unrestricted() { return ModelClassSpec("all", {}); }

inline ModelClassSpec reflexive() { return ModelClassSpec("reflexive", {parse_fol("forall x. R(x,x)")}); }

inline ModelClassSpec transitive() {
  return ModelClassSpec("transitive", {parse_fol("forall x. forall y. forall z. (R(x,y) & R(y,z) -> R(x,z))")});
}

inline ModelClassSpec reflexive_transitive() {
  return ModelClassSpec("reflexive-transitive",
                        {parse_fol("forall x. R(x,x)"),
                         parse_fol("forall x. forall y. forall z. (R(x,y) & R(y,z) -> R(x,z))")});
}

/// R□ and R◇ coincide.
inline ModelClassSpec box_equals_dia() {
  return ModelClassSpec("box-equals-dia", {parse_fol("forall x. forall y. (Rb(x,y) -> Rd(x,y))"),
                                           parse_fol("forall x. forall y. (Rd(x,y) -> Rb(x,y))")});
}

/// R∘R□ ⊆ R□∘R.
inline ModelClassSpec composition() {
  return ModelClassSpec("composition",
                        {parse_fol("forall x. forall z. ((exists y. (R(x,y) & Rb(y,z))) -> exists w. (Rb(x,w) & R(w,z)))")});
}

}  // namespace model_classes

struct Counterexample {
  /// Positions of the two models in the unfiltered corpus.
  std::size_t source_model = 0;
  std::size_t target_model = 0;
  std::size_t source_world = 0;
  std::size_t target_world = 0;
};

namespace detail {

inline const std::string& only_free_variable(const FolFormula& f) {
  if (f.free_variables().size() != 1) throw InputError("formula must have exactly one free variable");
  return *f.free_variables().begin();
}

inline std::vector<std::size_t> filter_corpus(const std::vector<KripkeStructure>& corpus, const ModelClassSpec& spec) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (satisfies_axioms(corpus[i], spec)) kept.push_back(i);
  if (kept.empty()) throw InputError("no model of the corpus satisfies the axioms of '" + spec.name() + "'");
  return kept;
}

}  // namespace detail

/// Pairs (a → b) of maximal asimulations between models of the class where φ
/// holds at a and fails at b. Every ordered pair of class members, including a
/// model with itself, is examined. An empty result is evidence, not proof.
inline std::vector<Counterexample> kappa_invariance_test(const FolFormula& phi, const std::vector<KripkeStructure>& corpus,
                                                         const ModelClassSpec& spec, Conditions conds) {
  const std::string& var = detail::only_free_variable(phi);
  const auto kept = detail::filter_corpus(corpus, spec);
  std::vector<WorldSet> truth(corpus.size());
  for (std::size_t i : kept) truth[i] = satisfying_worlds(corpus[i], phi, var);

  std::vector<Counterexample> out;
  for (std::size_t i : kept)
    for (std::size_t j : kept) {
      const auto max = maximal_asimulation(corpus[i], 0, corpus[j], 0, conds);
      for (const auto& p : max.relation.relA)
        if (p.dir == Direction::forward && truth[i][p.from] && !truth[j][p.to]) out.push_back({i, j, p.from, p.to});
    }
  return out;
}

inline std::vector<Counterexample> kappa_invariance_test(const FolFormula& phi, const std::vector<KripkeStructure>& corpus,
                                                         const ModelClassSpec& spec, Variant v) {
  return kappa_invariance_test(phi, corpus, spec, Conditions::of(v));
}

/// kappa_invariance_test with no axioms.
inline std::vector<Counterexample> invariance_test(const FolFormula& phi, const std::vector<KripkeStructure>& corpus,
                                                   Variant v) {
  return kappa_invariance_test(phi, corpus, model_classes::unrestricted(), v);
}

struct CompanionCandidate {
  ModalFormula formula;
  /// Points of the filtered corpus where the candidate and φ agree.
  std::size_t agree = 0;
  std::size_t total = 0;

  bool exact() const noexcept { return agree == total; }
};

/// Pool members ranked by pointwise agreement with φ over the filtered corpus,
/// best first; ties keep pool order.
inline std::vector<CompanionCandidate> modal_companion_search(const FolFormula& phi,
                                                              const std::vector<KripkeStructure>& corpus,
                                                              const ModelClassSpec& spec, Variant v,
                                                              const FormulaPool& pool) {
  if (phi.free_variables().size() > 1) throw InputError("formula must have at most one free variable");
  const std::string var = phi.free_variables().empty() ? "x" : *phi.free_variables().begin();
  const auto kept = detail::filter_corpus(corpus, spec);
  std::vector<WorldSet> target;
  std::size_t total = 0;
  for (std::size_t i : kept) {
    target.push_back(satisfying_worlds(corpus[i], phi, var));
    total += corpus[i].size();
  }
  std::vector<CompanionCandidate> out;
  for (const auto& f : pool.members) {
    CompanionCandidate c{f, 0, total};
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const WorldSet s = truth_set(corpus[kept[k]], f, v);
      c.agree += corpus[kept[k]].size() - (s ^ target[k]).count();
    }
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CompanionCandidate& a, const CompanionCandidate& b) { return a.agree > b.agree; });
  return out;
}

}  // namespace masim
