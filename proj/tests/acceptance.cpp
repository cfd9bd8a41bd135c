// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracle.hpp"

using namespace masim;

namespace {

constexpr std::uint64_t kSeed = 20261016;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

SuiteReport suite(const std::string& name, std::size_t trials) {
  SuiteConfig c;
  c.name = name;
  c.trials = trials;
  c.seed = kSeed;
  return run_suite(c);
}

std::string suite_detail(const SuiteReport& r) {
  std::string out = std::to_string(r.trials_run) + " trials, " + std::to_string(r.failures.size()) + " failures";
  if (r.skipped) out += ", " + std::to_string(r.skipped) + " skipped";
  if (!r.failures.empty()) out += " (first: " + r.failures.front().property + ")";
  return out;
}

Outcome agreement() {
  const auto r = suite("st-agreement", 10000);
  return {r.ok() && r.seconds < 30.0, suite_detail(r) + ", " + fmt_seconds(r.seconds) + " (limit 30 s)"};
}

Outcome degree_law() {
  std::size_t failures = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    Rng rng(trial_seed(kSeed, i));
    const auto f = random_formula(rng, 6, 3);
    for (const Variant v : Variant::all()) {
      const auto t = translate(f, v);
      failures += oracle::quantifier_depth(t) != translation_degree(f, v) || degree(t) != translation_degree(f, v);
    }
  }
  return {failures == 0, "1000 formulas x 4 variants, " + std::to_string(failures) + " failures"};
}

Outcome preservation() {
  const auto r = suite("preservation", 1000);
  return {r.ok() && r.seconds < 60.0, suite_detail(r) + ", " + fmt_seconds(r.seconds) + " (limit 60 s)"};
}

Outcome fixpoint() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<KripkeStructure> points;
  for (unsigned shape = 0; shape < 16; ++shape) {
    auto m = KripkeStructure::with_worlds(1);
    for (Rel r : kAllRelations)
      if (shape >> rel_slot(r) & 1) m.add_edge(r, 0, 0);
    if (shape & 8) m.set_true(1, 0);
    points.push_back(std::move(m));
  }
  std::vector<std::pair<KripkeStructure, KripkeStructure>> pairs;
  for (const auto& a : points)
    for (const auto& b : points) pairs.emplace_back(a, b);
  const std::size_t exhaustive = pairs.size();
  Rng rng(kSeed);
  for (int i = 0; i < 500; ++i) {
    auto sample = [&] {
      return random_model(RandomModelParams{rng.between(1, 3), rng.uniform() * 0.6, rng.uniform() * 0.6,
                                            rng.uniform() * 0.6, 1, 0.5},
                          rng.next());
    };
    auto m1 = sample();
    auto m2 = sample();
    pairs.emplace_back(std::move(m1), std::move(m2));
  }
  std::size_t mismatches = 0;
  std::size_t subsets = 0;
  for (const auto& [m1, m2] : pairs)
    for (const Variant v : Variant::all()) {
      const auto brute = oracle::subset_union(m1, m2, Conditions::of(v));
      const auto max = maximal_asimulation(m1, 0, m2, 0, v);
      subsets += brute.subsets;
      mismatches += !(max.relation == brute.relation);
    }
  const double s = seconds_since(start);
  return {mismatches == 0 && s < 60.0,
          std::to_string(exhaustive) + " one-point pairs + 500 seeded pairs <= 3 worlds, x 4 variants, " +
              std::to_string(subsets) + " relations checked, " + std::to_string(mismatches) + " mismatches, " +
              fmt_seconds(s) + " (limit 60 s)"};
}

Outcome distinguishing() {
  const auto r = suite("distinguish", 500);
  return {r.ok(), suite_detail(r)};
}

Outcome canonical_k() {
  const auto r = suite("canonical-k", 200);
  return {r.ok(), suite_detail(r)};
}

Outcome genmod() {
  const auto r = suite("genmod", 500);
  return {r.ok() && r.seconds < 30.0, suite_detail(r) + " per signature, " + fmt_seconds(r.seconds) + " (limit 30 s)"};
}

Outcome relativization() {
  SuiteConfig c;
  c.name = "preservation";
  c.trials = 1000;
  c.seed = kSeed;
  c.axioms = model_classes::reflexive_transitive();
  c.preorder_models = true;
  const auto r = run_suite(c);

  auto point = [](bool p1) {
    auto m = KripkeStructure::with_worlds(1);
    if (p1) m.set_true(1, 0);
    return m;
  };
  const std::vector<KripkeStructure> points{point(false), point(true)};
  const std::vector<KripkeStructure> chain_and_point{load_model(R"({"worlds": ["u", "v"], "R": [["u", "v"]]})"),
                                                     point(false)};
  const auto spec = model_classes::unrestricted();
  const std::size_t neg = kappa_invariance_test(parse_fol("P1(x) -> false"), points, spec, Variant(1, 1)).size();
  const std::size_t succ = kappa_invariance_test(parse_fol("exists y. R(x,y)"), chain_and_point, spec, Variant(1, 1)).size();
  const bool filtered = r.ok() && r.skipped < r.trials_run;
  return {filtered && neg > 0 && succ > 0, "filtered " + suite_detail(r) + "; counterexamples: P1(x)->false " +
                                               std::to_string(neg) + ", exists y R(x,y) " + std::to_string(succ)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"translation-semantics agreement", agreement},
      {"degree law", degree_law},
      {"preservation along maximal asimulations", preservation},
      {"fixpoint equals brute-force union", fixpoint},
      {"distinguishing formulas iff unrelated roots", distinguishing},
      {"canonical k-asimulation passes its conditions", canonical_k},
      {"generated conditions agree with built-in ones", genmod},
      {"relativized preservation and non-invariance witnesses", relativization},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("%s criterion %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
