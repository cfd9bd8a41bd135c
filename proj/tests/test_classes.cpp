#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"

using namespace masim;

namespace {

KripkeStructure single(bool p1) {
  auto m = KripkeStructure::with_worlds(1);
  if (p1) m.set_true(1, 0);
  return m;
}

KripkeStructure chain() { return load_model(R"({"worlds": ["u", "v"], "R": [["u", "v"]]})"); }

}  // namespace

TEST_CASE("axiom satisfaction", "[classes]") {
  const ModelClassSpec refl("reflexive", {parse_fol("forall x. R(x,x)")});
  auto loop = KripkeStructure::with_worlds(1);
  loop.add_edge(Rel::R, 0, 0);
  CHECK(satisfies_axioms(loop, refl));
  CHECK_FALSE(satisfies_axioms(single(false), refl));
  CHECK(satisfies_axioms(single(false), model_classes::unrestricted()));
  CHECK_THROWS_AS(ModelClassSpec("open", {parse_fol("R(x,x)")}), InputError);
}

TEST_CASE("axiom files", "[classes]") {
  const auto spec = parse_axioms("preorder", "# comment\n\nforall x. R(x,x)\n  forall x. forall y. forall z. (R(x,y) & R(y,z) -> R(x,z))\n");
  CHECK(spec.axioms().size() == 2);
  CHECK(spec.name() == "preorder");
  CHECK_THROWS_AS(parse_axioms("bad", "forall x. R(x"), ParseError);
}

TEST_CASE("built-in classes", "[classes]") {
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    auto m = random_model(RandomModelParams{rng.between(1, 4), 0.5, 0.5, 0.5, 0, 0.5}, rng.next());
    close_preorder(m);
    CHECK(satisfies_axioms(m, model_classes::reflexive_transitive()));
    CHECK(satisfies_axioms(m, model_classes::reflexive()));
    CHECK(satisfies_axioms(m, model_classes::transitive()));
  }
  const auto chain3 = load_model(R"({"worlds": ["a", "b", "c"], "R": [["a", "b"], ["b", "c"]]})");
  CHECK_FALSE(satisfies_axioms(chain3, model_classes::transitive()));
  const auto same = load_model(R"({"worlds": ["a", "b"], "Rb": [["a", "b"]], "Rd": [["a", "b"]]})");
  CHECK(satisfies_axioms(same, model_classes::box_equals_dia()));
  CHECK_FALSE(satisfies_axioms(load_model(R"({"worlds": ["a", "b"], "Rb": [["a", "b"]]})"), model_classes::box_equals_dia()));
  const auto comp = load_model(R"({"worlds": ["a", "b", "c"], "R": [["a", "b"]], "Rb": [["b", "c"]]})");
  CHECK_FALSE(satisfies_axioms(comp, model_classes::composition()));
}

TEST_CASE("translations have no invariance counterexamples", "[classes]") {
  std::vector<KripkeStructure> corpus{single(true), single(false), chain()};
  Rng rng(1);
  for (int i = 0; i < 4; ++i) corpus.push_back(random_model(RandomModelParams{3, 0.4, 0.4, 0.4, 1, 0.5}, rng.next()));
  CHECK(invariance_test(parse_fol("P1(x)"), corpus, Variant(1, 1)).empty());
  CHECK(invariance_test(translate(parse_modal("box p1"), Variant(1, 1)), corpus, Variant(1, 1)).empty());
  for (const Variant v : Variant::all())
    CHECK(invariance_test(translate(parse_modal("dia p1 -> box (p1 | false)"), v), corpus, v).empty());
}

TEST_CASE("non-translations have counterexamples", "[classes]") {
  const std::vector<KripkeStructure> points{single(false), single(true)};
  const auto neg = invariance_test(parse_fol("P1(x) -> false"), points, Variant(1, 1));
  REQUIRE_FALSE(neg.empty());
  CHECK(neg.front().source_model == 0);
  CHECK(neg.front().target_model == 1);

  const std::vector<KripkeStructure> chain_and_point{chain(), single(false)};
  const auto succ = invariance_test(parse_fol("exists y. R(x,y)"), chain_and_point, Variant(1, 1));
  REQUIRE_FALSE(succ.empty());
  for (const auto& c : succ) {
    CHECK(c.source_model == 0);
    CHECK(c.source_world == 0);
  }
}

TEST_CASE("invariance needs one free variable and a non-empty class", "[classes]") {
  const std::vector<KripkeStructure> corpus{single(false)};
  CHECK_THROWS_AS(invariance_test(parse_fol("exists y. R(y,y)"), corpus, Variant(1, 1)), InputError);
  CHECK_THROWS_AS(invariance_test(parse_fol("R(x,y)"), corpus, Variant(1, 1)), InputError);
  CHECK_THROWS_AS(kappa_invariance_test(parse_fol("P1(x)"), corpus, model_classes::reflexive(), Variant(1, 1)),
                  InputError);
}

TEST_CASE("the class filter removes counterexamples outside it", "[classes]") {
  auto loop = KripkeStructure::with_worlds(1);
  loop.add_edge(Rel::R, 0, 0);
  const std::vector<KripkeStructure> corpus{chain(), single(false), loop};
  const auto phi = parse_fol("exists y. R(x,y)");
  CHECK_FALSE(invariance_test(phi, corpus, Variant(1, 1)).empty());
  for (const auto& c : kappa_invariance_test(phi, corpus, model_classes::reflexive(), Variant(1, 1))) {
    CHECK(c.source_model == 2);
    CHECK(c.target_model == 2);
  }
}

TEST_CASE("modal companions", "[classes]") {
  const std::vector<KripkeStructure> corpus{single(true), single(false), chain(),
                                            random_model(RandomModelParams{3, 0.4, 0.4, 0.4, 2, 0.5}, 5)};
  const auto spec = model_classes::unrestricted();
  std::vector<const KripkeStructure*> ptrs;
  for (const auto& m : corpus) ptrs.push_back(&m);
  const Variant v(2, 2);
  const auto pool = enumerate_pool(signature_of(ptrs), v, 1, ptrs);

  const auto both = modal_companion_search(translate(parse_modal("p1 & p2"), v), corpus, spec, v, pool);
  REQUIRE(both.front().exact());
  CHECK(truth_set(*pool.corpus, both.front().formula, v) == truth_set(*pool.corpus, parse_modal("p1 & p2"), v));

  const auto bottom = modal_companion_search(FolFormula::bottom(), corpus, spec, v, pool);
  REQUIRE(bottom.front().exact());
  CHECK(bottom.front().formula == ModalFormula::bottom());

  const auto succ = modal_companion_search(parse_fol("exists y. R(x,y)"), corpus, spec, v, pool);
  CHECK_FALSE(succ.front().exact());
  CHECK_THROWS_AS(modal_companion_search(parse_fol("R(x,y)"), corpus, spec, v, pool), InputError);
}
