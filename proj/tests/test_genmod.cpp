#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"

using namespace masim;

TEST_CASE("modality signature text", "[genmod]") {
  const auto sig = parse_modality_signature("A:R;E:Rd");
  CHECK(sig == builtin_signatures::dia2());
  CHECK(to_string(sig) == "A:R;E:Rd");
  CHECK(parse_modality_signature(" A:Rb ") == builtin_signatures::box1());
  CHECK_THROWS_AS(parse_modality_signature("A:S"), ParseError);
  CHECK_THROWS_AS(parse_modality_signature("X:R"), ParseError);
  CHECK_THROWS_AS(parse_modality_signature("A:R;"), ParseError);
  CHECK_THROWS_AS(parse_modality_signature(""), ParseError);
}

TEST_CASE("generalized translations of the built-in modalities", "[genmod]") {
  const auto p1 = parse_modal("p1");
  CHECK(alpha_equivalent(gen_st(builtin_signatures::box2(), p1),
                         parse_fol("forall y. (R(x,y) -> forall z. (Rb(y,z) -> P1(z)))")));
  CHECK(alpha_equivalent(gen_st(builtin_signatures::dia1(), p1), parse_fol("exists y. (Rd(x,y) & P1(y))")));
  CHECK(alpha_equivalent(gen_st(builtin_signatures::dia2(), p1),
                         parse_fol("forall y. (R(x,y) -> exists z. (Rd(y,z) & P1(z)))")));
  const auto nested = parse_modal("box p1 -> dia p2");
  for (const Variant v : Variant::all()) {
    if (v.box() == 1)
      CHECK(alpha_equivalent(gen_st(builtin_signatures::box1(), nested, "x", v), translate(ModalFormula::box(nested), v)));
    if (v.dia() == 2)
      CHECK(alpha_equivalent(gen_st(builtin_signatures::dia2(), nested, "x", v), translate(ModalFormula::dia(nested), v)));
  }
  CHECK_THROWS_AS(gen_st(ModalitySignature{}, p1), InputError);
}

TEST_CASE("generated schemas of the built-in modalities", "[genmod]") {
  using S = SchemaForm;
  CHECK(gen_conditions(builtin_signatures::box1()) == std::vector<ConditionSchema>{{1, S::universal, {Rel::Box}, 1}});
  CHECK(gen_conditions(builtin_signatures::box2()) ==
        std::vector<ConditionSchema>{{1, S::universal, {Rel::R, Rel::Box}, 1}});
  CHECK(gen_conditions(builtin_signatures::dia1()) == std::vector<ConditionSchema>{{1, S::existential, {Rel::Dia}, 1}});
  CHECK(gen_conditions(builtin_signatures::dia2()) ==
        std::vector<ConditionSchema>{{2, S::existential, {Rel::Dia}, 1}, {1, S::universal, {Rel::R}, 2}});
  CHECK(relation_count(builtin_signatures::dia2()) == 2);
}

TEST_CASE("alternations add relations", "[genmod]") {
  const auto sig = parse_modality_signature("E:R;A:Rb;A:R;E:Rd");
  CHECK(relation_count(sig) == 3);
  const auto schemas = gen_conditions(sig);
  REQUIRE(schemas.size() == 3);
  CHECK(schemas[0].form == SchemaForm::existential);
  CHECK(schemas[0].chain == std::vector<Rel>{Rel::Dia});
  CHECK(schemas[1].chain == std::vector<Rel>{Rel::Box, Rel::R});
  CHECK(schemas[1].conclusion == 2);
  CHECK(schemas[1].premise == 3);
  CHECK(schemas[2].form == SchemaForm::existential);
  CHECK(schemas[2].conclusion == 3);
}

TEST_CASE("generated checks on small instances", "[genmod]") {
  const auto t = load_model(R"({"worlds": ["t"]})");
  const auto u = load_model(R"({"worlds": ["u"]})");
  const std::set<DirectedPair> both{{Direction::forward, 0, 0}, {Direction::backward, 0, 0}};
  for (const auto& sig : {builtin_signatures::box1(), builtin_signatures::box2(), builtin_signatures::dia1(),
                          parse_modality_signature("A:R;A:Rb;E:Rd;A:R")}) {
    std::vector<std::set<DirectedPair>> tuple(relation_count(sig), both);
    CHECK(check_generated(t, 0, u, 0, sig, tuple).ok());
  }
  CHECK_THROWS_AS(check_generated(t, 0, u, 0, builtin_signatures::dia2(), {both}), InputError);

  const auto target = load_model(R"({"worlds": ["u", "d"], "Rb": [["u", "d"]]})");
  const Verdict broken = check_generated(t, 0, target, 0, builtin_signatures::box1(), {{{Direction::forward, 0, 0}}});
  CHECK(broken.conditions() == std::set<std::string>{"r1"});
}

TEST_CASE("generated conditions agree with the hand-written ones", "[genmod]") {
  SuiteConfig config;
  config.name = "genmod";
  config.trials = 150;
  config.seed = 5;
  const auto report = run_suite(config);
  INFO(report.body());
  CHECK(report.ok());
}
