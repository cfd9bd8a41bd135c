#include <catch2/catch_amalgamated.hpp>

#include "masim/harness.hpp"
#include "masim/syntax.hpp"

using namespace masim;
using K = ModalFormula::Kind;
using FK = FolFormula::Kind;

TEST_CASE("modal parser builds the expected trees", "[syntax]") {
  CHECK(parse_modal("box p1") == ModalFormula::box(ModalFormula::prop(1)));
  CHECK(parse_modal("(p1 -> false)") == ModalFormula::impl(ModalFormula::prop(1), ModalFormula::bottom()));
  CHECK(parse_modal("dia (p1 & p2)") == ModalFormula::dia(ModalFormula::conj(ModalFormula::prop(1), ModalFormula::prop(2))));
}

TEST_CASE("modal precedence and associativity", "[syntax]") {
  const auto f = parse_modal("p1 & p2 | p3 -> p4 -> p5");
  REQUIRE(f.kind() == K::impl);
  CHECK(f.lhs().kind() == K::disj);
  CHECK(f.lhs().lhs().kind() == K::conj);
  CHECK(f.rhs().kind() == K::impl);
  CHECK(parse_modal("box p1 & p2").kind() == K::conj);
  CHECK(parse_modal("box dia p1").child().kind() == K::dia);
}

TEST_CASE("fol parser builds the expected trees", "[syntax]") {
  CHECK(parse_fol("forall x. R(x,x)") == FolFormula::forall("x", FolFormula::rel(Rel::R, "x", "x")));
  CHECK(parse_fol("P1(x)") == FolFormula::pred(1, "x"));
  CHECK(parse_fol("exists y. (R(x,y) & P2(y))") ==
        FolFormula::exists("y", FolFormula::conj(FolFormula::rel(Rel::R, "x", "y"), FolFormula::pred(2, "y"))));
  CHECK(parse_fol("Rb(x,y) | Rd(y,x)").kind() == FK::disj);
}

TEST_CASE("degree counts quantifier nesting", "[syntax]") {
  CHECK(degree(FolFormula::bottom()) == 0);
  CHECK(degree(parse_fol("forall y. (R(x,y) -> P1(y))")) == 1);
  CHECK(degree(parse_fol("forall y. (R(x,y) -> forall z. (Rb(y,z) -> P1(z)))")) == 2);
  CHECK(degree(parse_fol("(forall y. R(x,y)) & exists z. exists w. R(z,w)")) == 2);
}

TEST_CASE("free variables, predicates and relations", "[syntax]") {
  const auto f = parse_fol("forall y. (Rb(x,y) -> P3(y) | P1(z))");
  CHECK(f.free_variables() == std::set<std::string>{"x", "z"});
  CHECK(predicates(f) == std::set<unsigned>{1, 3});
  CHECK(relations(f) == std::set<Rel>{Rel::Box});
}

TEST_CASE("alpha equivalence ignores bound names only", "[syntax]") {
  CHECK(alpha_equivalent(parse_fol("forall y. R(x,y)"), parse_fol("forall z. R(x,z)")));
  CHECK_FALSE(alpha_equivalent(parse_fol("forall y. R(x,y)"), parse_fol("forall y. R(z,y)")));
  CHECK_FALSE(alpha_equivalent(parse_fol("forall y. forall z. R(y,z)"), parse_fol("forall y. forall z. R(z,y)")));
}

TEST_CASE("parse errors carry positions", "[syntax]") {
  try {
    parse_modal("box (p1 & )");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 10);
  }
  CHECK_THROWS_AS(parse_modal("p1 ^ p2"), ParseError);
  CHECK_THROWS_AS(parse_modal("p0"), Error);
  CHECK_THROWS_AS(parse_fol("R(x)"), ParseError);
  CHECK_THROWS_AS(parse_fol("forall . R(x,x)"), ParseError);
  CHECK_THROWS_AS(parse_fol("P1(x) junk"), ParseError);
}

TEST_CASE("printing then parsing is the identity", "[syntax]") {
  Rng rng(42);
  for (int i = 0; i < 500; ++i) {
    const auto f = random_formula(rng, 5, 3);
    INFO(to_string(f));
    CHECK(parse_modal(to_string(f, Notation::ascii)) == f);
    const auto t = translate(f, Variant(2, 2));
    CHECK(parse_fol(to_string(t, Notation::ascii)) == t);
  }
}

TEST_CASE("unicode printing", "[syntax]") {
  CHECK(to_string(parse_modal("box (p1 -> false) & dia p2"), Notation::unicode) == "□(p1 → ⊥) ∧ ◇p2");
  CHECK(to_string(parse_fol("forall y. (Rb(x,y) -> P1(y))"), Notation::unicode) == "∀y(R□(x,y) → P1(y))");
  CHECK(to_string(parse_modal("p1 -> (p2 -> p3)")) == "p1 -> (p2 -> p3)");
  CHECK(to_string(parse_modal("(p1 -> p2) -> p3")) == "(p1 -> p2) -> p3");
}
