#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "masim/asimulation.hpp"
#include "masim/classes.hpp"
#include "masim/error.hpp"
#include "masim/genmod.hpp"
#include "masim/kripke.hpp"
#include "masim/random.hpp"
#include "masim/semantics.hpp"
#include "masim/syntax.hpp"
#include "masim/translate.hpp"
#include "masim/types.hpp"

namespace masim {

/// Leaves are ⊥ or p1 … p_letters; inner nodes are drawn uniformly among the
/// five connectives. Depth counts connectives along the longest branch.
inline ModalFormula random_formula(Rng& rng, std::size_t max_depth, std::size_t letters) {
  const bool leaf = max_depth == 0 || rng.chance(0.25);
  if (leaf) {
    const std::size_t pick = rng.between(0, letters);
    return pick == 0 ? ModalFormula::bottom() : ModalFormula::prop(static_cast<unsigned>(pick));
  }
  switch (rng.between(0, 4)) {
    case 0: {
      ModalFormula l = random_formula(rng, max_depth - 1, letters);
      return ModalFormula::conj(std::move(l), random_formula(rng, max_depth - 1, letters));
    }
    case 1: {
      ModalFormula l = random_formula(rng, max_depth - 1, letters);
      return ModalFormula::disj(std::move(l), random_formula(rng, max_depth - 1, letters));
    }
    case 2: {
      ModalFormula l = random_formula(rng, max_depth - 1, letters);
      return ModalFormula::impl(std::move(l), random_formula(rng, max_depth - 1, letters));
    }
    case 3: return ModalFormula::box(random_formula(rng, max_depth - 1, letters));
    default: return ModalFormula::dia(random_formula(rng, max_depth - 1, letters));
  }
}

/// Closes R under reflexivity and transitivity.
inline void close_preorder(KripkeStructure& m) {
  const std::size_t n = m.size();
  for (std::size_t w = 0; w < n; ++w) m.add_edge(Rel::R, w, w);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (m.has_edge(Rel::R, i, k))
        for (std::size_t j = 0; j < n; ++j)
          if (m.has_edge(Rel::R, k, j)) m.add_edge(Rel::R, i, j);
}

struct SuiteConfig {
  std::string name;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  /// Unset bounds take the suite's default.
  std::optional<std::size_t> max_worlds;
  std::optional<std::size_t> max_depth;
  std::optional<std::size_t> letters;
  /// Formulas per model pair (preservation).
  std::optional<std::size_t> formulas;
  /// Largest k (canonical-k).
  std::optional<std::size_t> max_k;
  /// Models outside the class are skipped, not failed.
  std::optional<ModelClassSpec> axioms;
  /// Close R of every sampled model into a preorder before filtering.
  bool preorder_models = false;
  std::size_t threads = 1;
};

struct TrialFailure {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string property;
  /// Models, formulas, relations and variant involved.
  nlohmann::json data;
};

struct SuiteReport {
  SuiteConfig config;
  std::size_t trials_run = 0;
  std::size_t skipped = 0;
  std::vector<TrialFailure> failures;
  double seconds = 0.0;

  bool ok() const noexcept { return failures.empty(); }

  /// Everything except timing, so reruns compare byte for byte.
  std::string body() const {
    std::string out = "suite " + config.name + "\nseed " + std::to_string(config.seed) + "\ntrials " +
                      std::to_string(trials_run) + "\nskipped " + std::to_string(skipped) + "\nfailures " +
                      std::to_string(failures.size()) + "\n";
    for (const auto& f : failures)
      out += "failure trial " + std::to_string(f.trial) + " seed " + std::to_string(f.seed) + " " + f.property + " " +
             f.data.dump() + "\n";
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json failures_json = nlohmann::json::array();
    for (const auto& f : failures)
      failures_json.push_back({{"trial", f.trial}, {"seed", f.seed}, {"property", f.property}, {"data", f.data}});
    return {{"suite", config.name},   {"seed", config.seed},          {"trials", trials_run},
            {"skipped", skipped},     {"failures", failures_json},    {"seconds", seconds}};
  }
};

/// Outcome of one trial: skipped (sampled models outside the class), passed,
/// or failed with a property name and reproduction data.
struct TrialOutcome {
  bool skipped = false;
  std::optional<std::pair<std::string, nlohmann::json>> failure;
};

namespace detail {

struct Bounds {
  std::size_t worlds;
  std::size_t depth;
  std::size_t letters;
  std::size_t formulas;
  std::size_t max_k;
};

inline const std::map<std::string, Bounds, std::less<>>& suite_defaults() {
  static const std::map<std::string, Bounds, std::less<>> table{
      {"st-agreement", {6, 4, 3, 0, 0}}, {"degree", {1, 6, 3, 0, 0}},   {"preservation", {5, 3, 2, 50, 0}},
      {"distinguish", {4, 6, 2, 0, 0}},     {"canonical-k", {4, 0, 2, 0, 3}}, {"genmod", {3, 3, 1, 0, 0}},
      {"kappa", {3, 3, 2, 0, 0}},
  };
  return table;
}

inline Bounds resolve(const SuiteConfig& c) {
  const auto it = suite_defaults().find(c.name);
  if (it == suite_defaults().end()) throw InputError("unknown suite '" + c.name + "'");
  Bounds b = it->second;
  if (c.max_worlds) b.worlds = *c.max_worlds;
  if (c.max_depth) b.depth = *c.max_depth;
  if (c.letters) b.letters = *c.letters;
  if (c.formulas) b.formulas = *c.formulas;
  if (c.max_k) b.max_k = *c.max_k;
  if (b.worlds == 0) throw InputError("max_worlds must be positive");
  return b;
}

inline KripkeStructure sample_model(Rng& rng, const SuiteConfig& c, const Bounds& b) {
  RandomModelParams p;
  p.worlds = rng.between(1, b.worlds);
  p.density_r = rng.uniform() * 0.6;
  p.density_box = rng.uniform() * 0.6;
  p.density_dia = rng.uniform() * 0.6;
  p.letters = b.letters;
  KripkeStructure m = random_model(p, rng.next());
  if (c.preorder_models) close_preorder(m);
  return m;
}

inline bool in_class(const SuiteConfig& c, const KripkeStructure& m) {
  return !c.axioms || satisfies_axioms(m, *c.axioms);
}

inline nlohmann::json relation_json(const std::set<DirectedPair>& rel) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : rel) out.push_back({{"dir", direction_code(p.dir)}, {"from", p.from}, {"to", p.to}});
  return out;
}

inline std::string ascii(const ModalFormula& f) { return to_string(f, Notation::ascii); }
inline std::string ascii(const FolFormula& f) { return to_string(f, Notation::ascii); }

using Failure = std::optional<std::pair<std::string, nlohmann::json>>;

inline Failure st_agreement(Rng& rng, const SuiteConfig& c, const Bounds& b, bool& skipped) {
  KripkeStructure m = sample_model(rng, c, b);
  if (!in_class(c, m)) return skipped = true, std::nullopt;
  const ModalFormula f = random_formula(rng, b.depth, b.letters);
  for (const Variant& v : Variant::all()) {
    const WorldSet modal = truth_set(m, f, v);
    const WorldSet fol = satisfying_worlds(m, translate(f, v), "x");
    if (modal != fol)
      return std::pair{"eval_modal = eval_fol o translate",
                       nlohmann::json{{"model", model_to_json(m)}, {"formula", ascii(f)}, {"variant", v.code()}}};
  }
  return std::nullopt;
}

inline Failure degree_law(Rng& rng, const SuiteConfig&, const Bounds& b, bool&) {
  const ModalFormula f = random_formula(rng, b.depth, b.letters);
  for (const Variant& v : Variant::all()) {
    const std::size_t actual = degree(translate(f, v));
    const std::size_t predicted = translation_degree(f, v);
    if (actual != predicted)
      return std::pair{"degree(translate) = translation_degree",
                       nlohmann::json{{"formula", ascii(f)},
                                      {"variant", v.code()},
                                      {"degree", actual},
                                      {"predicted", predicted}}};
  }
  return std::nullopt;
}

/// Along every pair of the maximal relation, translations true at the source
/// stay true at the target.
inline Failure preservation(Rng& rng, const SuiteConfig& c, const Bounds& b, bool& skipped) {
  KripkeStructure m1 = sample_model(rng, c, b);
  KripkeStructure m2 = sample_model(rng, c, b);
  if (!in_class(c, m1) || !in_class(c, m2)) return skipped = true, std::nullopt;
  std::vector<ModalFormula> formulas;
  for (std::size_t i = 0; i < b.formulas; ++i) formulas.push_back(random_formula(rng, b.depth, b.letters));
  for (const Variant& v : Variant::all()) {
    const auto max = maximal_asimulation(m1, 0, m2, 0, v);
    for (const auto& f : formulas) {
      const FolFormula phi = translate(f, v);
      const WorldSet s1 = satisfying_worlds(m1, phi, "x");
      const WorldSet s2 = satisfying_worlds(m2, phi, "x");
      for (const auto& p : max.relation.relA) {
        const bool at_source = p.dir == Direction::forward ? s1[p.from] : s2[p.from];
        const bool at_target = p.dir == Direction::forward ? s2[p.to] : s1[p.to];
        if (at_source && !at_target)
          return std::pair{"translation preserved along the maximal asimulation",
                           nlohmann::json{{"m1", model_to_json(m1)},
                                          {"m2", model_to_json(m2)},
                                          {"formula", ascii(f)},
                                          {"variant", v.code()},
                                          {"pair", {{"dir", direction_code(p.dir)}, {"from", p.from}, {"to", p.to}}},
                                          {"relA", relation_json(max.relation.relA)}}};
      }
    }
  }
  return std::nullopt;
}

/// Root in the maximal relation iff no formula separates the roots.
inline Failure distinguishing(Rng& rng, const SuiteConfig& c, const Bounds& b, bool& skipped) {
  KripkeStructure m1 = sample_model(rng, c, b);
  KripkeStructure m2 = sample_model(rng, c, b);
  if (!in_class(c, m1) || !in_class(c, m2)) return skipped = true, std::nullopt;
  auto data = [&](const Variant& v) {
    return nlohmann::json{{"m1", model_to_json(m1)}, {"m2", model_to_json(m2)}, {"variant", v.code()}};
  };
  const std::size_t short_depth = std::min<std::size_t>(3, b.depth);
  for (const Variant& v : Variant::all()) {
    const auto max = maximal_asimulation(m1, 0, m2, 0, v);
    if (max.contains_root) {
      if (auto f = distinguishing_formula(m1, 0, m2, 0, v, short_depth)) {
        auto d = data(v);
        d["formula"] = ascii(*f);
        return std::pair{"no distinguishing formula when the roots are related", d};
      }
      continue;
    }
    const auto f = distinguishing_formula(m1, 0, m2, 0, v, b.depth);
    if (!f) return std::pair{"distinguishing formula found when the roots are unrelated", data(v)};
    const FolFormula phi = translate(*f, v);
    const bool separates = eval_modal(m1, 0, *f, v) && !eval_modal(m2, 0, *f, v) &&
                           eval_fol(m1, {{"x", 0}}, phi) && !eval_fol(m2, {{"x", 0}}, phi);
    if (!separates) {
      auto d = data(v);
      d["formula"] = ascii(*f);
      return std::pair{"distinguishing formula holds at t and fails at u", d};
    }
  }
  return std::nullopt;
}

inline Failure canonical_k(Rng& rng, const SuiteConfig& c, const Bounds& b, bool& skipped) {
  KripkeStructure m1 = sample_model(rng, c, b);
  KripkeStructure m2 = sample_model(rng, c, b);
  if (!in_class(c, m1) || !in_class(c, m2)) return skipped = true, std::nullopt;
  const std::size_t k = rng.between(0, b.max_k);
  const std::vector<const KripkeStructure*> corpus{&m1, &m2};
  for (const Variant& v : Variant::all()) {
    const auto pools = enumerate_pools(signature_of(corpus), v, k + 2, corpus, kNoSizeCap);
    const SeqAsimulation rel = canonical_k_asimulation(m1, 0, m2, 0, k, v, pools);
    const Verdict verdict = check_k_asimulation(m1, 0, m2, 0, k, Conditions::of(v).without(Condition::elem), rel);
    if (!verdict.ok()) {
      const auto& first = verdict.violations.front();
      return std::pair{"canonical k-asimulation passes its conditions",
                       nlohmann::json{{"m1", model_to_json(m1)},
                                      {"m2", model_to_json(m2)},
                                      {"variant", v.code()},
                                      {"k", k},
                                      {"condition", first.condition},
                                      {"witness", first.witness}}};
    }
  }
  return std::nullopt;
}

struct BuiltinCase {
  const char* label;
  ModalitySignature sig;
  Variant variant;
  Conditions conds;
  /// Generated condition name → hand-written condition name.
  std::map<std::string, std::string> names;
  ModalFormula::Kind modality;
};

inline const std::vector<BuiltinCase>& builtin_cases() {
  using K = ModalFormula::Kind;
  static const std::vector<BuiltinCase> cases{
      {"box1", builtin_signatures::box1(), Variant(1, 1), Conditions::basic().with(Condition::box1),
       {{"r1", "box-1"}}, K::box},
      {"box2", builtin_signatures::box2(), Variant(2, 1), Conditions::basic().with(Condition::box2),
       {{"r1", "box-2"}}, K::box},
      {"dia1", builtin_signatures::dia1(), Variant(1, 1), Conditions::basic().with(Condition::diam1),
       {{"r1", "diam-1"}}, K::dia},
      {"dia2", builtin_signatures::dia2(), Variant(1, 2),
       Conditions::basic().with(Condition::b_type).with(Condition::diam2_1).with(Condition::diam2_2),
       {{"r1", "diam-2(2)"}, {"r2", "diam-2(1)"}, {"type(A2)", "B-type"}}, K::dia},
  };
  return cases;
}

/// Pairs of `base` kept with probability 0.8, plus up to two random pairs.
inline std::set<DirectedPair> perturb(Rng& rng, const std::set<DirectedPair>& base, std::size_t n1, std::size_t n2) {
  std::set<DirectedPair> out;
  for (const auto& p : base)
    if (rng.chance(0.8)) out.insert(p);
  const std::size_t extra = rng.between(0, 2);
  for (std::size_t i = 0; i < extra; ++i) {
    const Direction d = rng.chance(0.5) ? Direction::forward : Direction::backward;
    const std::size_t from = rng.between(0, (d == Direction::forward ? n1 : n2) - 1);
    const std::size_t to = rng.between(0, (d == Direction::forward ? n2 : n1) - 1);
    out.insert({d, from, to});
  }
  return out;
}

/// Violation counts per condition, generated names mapped to hand-written ones.
inline std::map<std::string, std::size_t> tally(const Verdict& verdict, const std::map<std::string, std::string>& names) {
  std::map<std::string, std::size_t> out;
  for (const auto& v : verdict.violations) {
    const auto it = names.find(v.condition);
    ++out[it == names.end() ? v.condition : it->second];
  }
  return out;
}

inline Failure genmod(Rng& rng, const SuiteConfig& c, const Bounds& b, bool& skipped) {
  KripkeStructure m1 = sample_model(rng, c, b);
  KripkeStructure m2 = sample_model(rng, c, b);
  if (!in_class(c, m1) || !in_class(c, m2)) return skipped = true, std::nullopt;
  const ModalFormula inner = random_formula(rng, b.depth, b.letters);
  for (const auto& bc : builtin_cases()) {
    const auto max = maximal_asimulation(m1, 0, m2, 0, bc.conds);
    std::vector<std::set<DirectedPair>> tuple{perturb(rng, max.relation.relA, m1.size(), m2.size())};
    Asimulation rel{tuple[0], std::nullopt};
    if (bc.conds.needs_b()) {
      tuple.push_back(perturb(rng, *max.relation.relB, m1.size(), m2.size()));
      rel.relB = tuple[1];
    }
    const auto generated = tally(check_generated(m1, 0, m2, 0, bc.sig, tuple), bc.names);
    const auto written = tally(check_asimulation(m1, 0, m2, 0, bc.conds, rel), {});
    if (generated != written) {
      nlohmann::json data{{"signature", bc.label},
                          {"m1", model_to_json(m1)},
                          {"m2", model_to_json(m2)},
                          {"relA", relation_json(tuple[0])},
                          {"generated", generated},
                          {"hand-written", written}};
      if (tuple.size() > 1) data["relB"] = relation_json(tuple[1]);
      return std::pair{"generated conditions agree with the hand-written ones", data};
    }
    const ModalFormula whole = ModalFormula::unary(bc.modality, inner);
    for (const Variant& v : Variant::all()) {
      const bool is_box = bc.modality == ModalFormula::Kind::box;
      if ((is_box ? v.box() : v.dia()) != (is_box ? bc.variant.box() : bc.variant.dia()))
        continue;
      if (!alpha_equivalent(gen_st(bc.sig, inner, "x", v), translate(whole, v)))
        return std::pair{"gen_st matches translate",
                         nlohmann::json{{"signature", bc.label}, {"formula", ascii(whole)}, {"variant", v.code()}}};
    }
  }
  return std::nullopt;
}

/// Translations are invariant over a random corpus.
inline Failure kappa(Rng& rng, const SuiteConfig& c, const Bounds& b, bool& skipped) {
  std::vector<KripkeStructure> corpus;
  for (int i = 0; i < 3; ++i) corpus.push_back(sample_model(rng, c, b));
  if (std::none_of(corpus.begin(), corpus.end(), [&](const KripkeStructure& m) { return in_class(c, m); }))
    return skipped = true, std::nullopt;
  const ModelClassSpec spec = c.axioms ? *c.axioms : model_classes::unrestricted();
  ModalFormula f = random_formula(rng, b.depth, b.letters);
  while (translate(f, Variant(1, 1)).free_variables().empty()) f = random_formula(rng, b.depth, b.letters);
  for (const Variant& v : Variant::all()) {
    const auto cex = kappa_invariance_test(translate(f, v), corpus, spec, v);
    if (!cex.empty()) {
      nlohmann::json models = nlohmann::json::array();
      for (const auto& m : corpus) models.push_back(model_to_json(m));
      return std::pair{"translation invariant under asimulations",
                       nlohmann::json{{"corpus", models},
                                      {"formula", ascii(f)},
                                      {"variant", v.code()},
                                      {"source_model", cex.front().source_model},
                                      {"target_model", cex.front().target_model},
                                      {"source_world", cex.front().source_world},
                                      {"target_world", cex.front().target_world}}};
    }
  }
  return std::nullopt;
}

using TrialFn = Failure (*)(Rng&, const SuiteConfig&, const Bounds&, bool&);

inline TrialFn trial_function(std::string_view name) {
  static const std::map<std::string, TrialFn, std::less<>> table{
      {"st-agreement", st_agreement}, {"degree", degree_law}, {"preservation", preservation},
      {"distinguish", distinguishing},         {"canonical-k", canonical_k}, {"genmod", genmod},
      {"kappa", kappa},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw InputError("unknown suite '" + std::string(name) + "'");
  return it->second;
}

}  // namespace detail

inline std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& [name, bounds] : detail::suite_defaults()) out.push_back(name);
  return out;
}

/// Runs one trial from its seed alone; a failure's `seed` reproduces it.
inline TrialOutcome run_trial(const SuiteConfig& config, std::uint64_t trial_seed) {
  const detail::Bounds bounds = detail::resolve(config);
  const detail::TrialFn fn = detail::trial_function(config.name);
  Rng rng(trial_seed);
  TrialOutcome out;
  try {
    out.failure = fn(rng, config, bounds, out.skipped);
  } catch (const Error& e) {
    out.failure = std::pair{std::string("trial ran without error"), nlohmann::json{{"error", e.what()}}};
  }
  return out;
}

/// Trial i runs from trial_seed(config.seed, i), so the report does not depend
/// on the thread count.
inline SuiteReport run_suite(const SuiteConfig& config) {
  detail::resolve(config);
  detail::trial_function(config.name);
  const auto start = std::chrono::steady_clock::now();
  std::vector<TrialOutcome> outcomes(config.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.trials; i = next++)
      outcomes[i] = run_trial(config, trial_seed(config.seed, i));
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(config.threads, config.trials));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  SuiteReport report;
  report.config = config;
  report.trials_run = config.trials;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    report.skipped += outcomes[i].skipped;
    if (outcomes[i].failure)
      report.failures.push_back(
          {i, trial_seed(config.seed, i), outcomes[i].failure->first, std::move(outcomes[i].failure->second)});
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace masim
