#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"

using namespace masim;

namespace {

KripkeStructure single(bool p1) {
  auto m = KripkeStructure::with_worlds(1);
  if (p1) m.set_true(1, 0);
  return m;
}

}  // namespace

TEST_CASE("first-order evaluation on one world", "[semantics]") {
  const auto m = single(true);
  CHECK(eval_fol(m, {{"x", 0}}, parse_fol("P1(x)")));
  CHECK_FALSE(eval_fol(m, {{"x", 0}}, parse_fol("exists y. R(x,y)")));
  CHECK(eval_fol(m, {{"x", 0}}, parse_fol("forall y. (R(x,y) -> P1(y))")));
  CHECK_THROWS_AS(eval_fol(m, {}, parse_fol("P1(x)")), InputError);
}

TEST_CASE("modal evaluation at an isolated world", "[semantics]") {
  const auto m = single(false);
  CHECK(eval_modal(m, 0, parse_modal("box false"), Variant(1, 1)));
  CHECK_FALSE(eval_modal(m, 0, parse_modal("dia (false -> false)"), Variant(1, 1)));
  for (const Variant v : {Variant(1, 2), Variant(2, 2)}) {
    const auto f = parse_modal("dia false");
    CHECK(eval_modal(m, 0, f, v));
    CHECK(oracle::fol(m, {{"x", 0}}, translate(f, v)));
  }
  CHECK_THROWS_AS(eval_modal(m, "nowhere", parse_modal("p1"), Variant(1, 1)), ModelError);
}

TEST_CASE("implication looks at every R-successor", "[semantics]") {
  const auto m = load_model(R"({"worlds": ["a", "b"], "R": [["a", "b"]], "val": {"p1": ["b"]}})");
  const auto f = parse_modal("p1 -> false");
  CHECK(eval_modal(m, "b", f, Variant(1, 1)));
  CHECK_FALSE(eval_modal(m, "a", f, Variant(1, 1)));
  const auto g = parse_modal("(false -> false) -> p1");
  CHECK(eval_modal(m, "b", g, Variant(1, 1)));
  CHECK(eval_modal(m, "a", g, Variant(1, 1)));
}

TEST_CASE("truth sets match the pointwise clauses", "[semantics]") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = random_model(RandomModelParams{rng.between(1, 5), 0.4, 0.4, 0.4, 2, 0.5}, rng.next());
    const auto f = random_formula(rng, 4, 2);
    for (const Variant v : Variant::all()) {
      const WorldSet s = truth_set(m, f, v);
      for (std::size_t w = 0; w < m.size(); ++w) {
        INFO(to_string(f) << " variant " << v.code() << " world " << w);
        CHECK(s[w] == oracle::modal(m, w, f, v));
      }
    }
  }
}

TEST_CASE("table evaluation matches naive evaluation", "[semantics]") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = random_model(RandomModelParams{rng.between(1, 4), 0.5, 0.5, 0.5, 2, 0.5}, rng.next());
    const auto phi = translate(random_formula(rng, 4, 2), Variant::all()[trial % 4]);
    const WorldSet s = satisfying_worlds(m, phi, "x");
    for (std::size_t w = 0; w < m.size(); ++w) CHECK(s[w] == oracle::fol(m, {{"x", w}}, phi));
  }
}

TEST_CASE("variant codes", "[semantics]") {
  CHECK(Variant::parse("21") == Variant(2, 1));
  CHECK(Variant::parse("12").code() == "12");
  CHECK_THROWS_AS(Variant::parse("13"), InputError);
  CHECK_THROWS_AS(Variant(0, 1), InputError);
}
