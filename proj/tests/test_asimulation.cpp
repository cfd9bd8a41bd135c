#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"

using namespace masim;

namespace {

const DirectedPair kRoot{Direction::forward, 0, 0};
const DirectedPair kBack{Direction::backward, 0, 0};

KripkeStructure single(bool p1) {
  auto m = KripkeStructure::with_worlds(1);
  if (p1) m.set_true(1, 0);
  return m;
}

Asimulation only_a(std::set<DirectedPair> a) { return {std::move(a), std::nullopt}; }

}  // namespace

TEST_CASE("identical one-point models with both cross pairs", "[asimulation]") {
  const auto m = single(false);
  for (const Variant v : Variant::all()) {
    Asimulation rel = only_a({kRoot, kBack});
    if (v.dia() == 2) rel.relB = std::set<DirectedPair>{kRoot, kBack};
    CHECK(check_asimulation(m, 0, m, 0, v, rel).ok());
  }
}

TEST_CASE("(base) names the letter that is lost", "[asimulation]") {
  const auto t = single(true);
  const auto u = single(false);
  for (const Variant v : Variant::all()) {
    Asimulation rel = only_a({kRoot});
    if (v.dia() == 2) rel.relB = std::set<DirectedPair>{};
    const Verdict verdict = check_asimulation(t, 0, u, 0, v, rel);
    REQUIRE(verdict.conditions() == std::set<std::string>{"base"});
    CHECK(verdict.violations.front().witness.find("P1") != std::string::npos);
  }
}

TEST_CASE("a target successor without a source match breaks (step) and (box-1)", "[asimulation]") {
  const auto t = single(false);
  const auto u = load_model(R"({"worlds": ["u", "d"], "R": [["u", "d"]], "Rb": [["u", "d"]]})");
  const Verdict verdict = check_asimulation(t, 0, u, 0, Variant(1, 1), only_a({kRoot}));
  CHECK(verdict.conditions() == std::set<std::string>{"step", "box-1"});
  CHECK(verdict.count("step") == 1);
}

TEST_CASE("(box-1) is driven by the box relation of the target", "[asimulation]") {
  const auto t = single(false);
  const auto only_r = load_model(R"({"worlds": ["u", "d"], "R": [["u", "d"]]})");
  CHECK(check_asimulation(t, 0, only_r, 0, Variant(1, 1), only_a({kRoot})).conditions() ==
        std::set<std::string>{"step"});
  const auto only_box = load_model(R"({"worlds": ["u", "d"], "Rb": [["u", "d"]]})");
  CHECK(check_asimulation(t, 0, only_box, 0, Variant(1, 1), only_a({kRoot})).conditions() ==
        std::set<std::string>{"box-1"});
}

TEST_CASE("(elem) and (type) are reported", "[asimulation]") {
  const auto m = single(false);
  const Verdict missing = check_asimulation(m, 0, m, 0, Variant(1, 1), only_a({kBack}));
  CHECK(missing.conditions() == std::set<std::string>{"elem"});
  const Verdict outside = check_asimulation(m, 0, m, 0, Variant(1, 1), only_a({kRoot, {Direction::forward, 3, 0}}));
  CHECK(outside.conditions() == std::set<std::string>{"type"});
}

TEST_CASE("B is required exactly for diamond clause 2", "[asimulation]") {
  const auto m = single(false);
  CHECK_THROWS_AS(check_asimulation(m, 0, m, 0, Variant(1, 2), only_a({kRoot})), InputError);
  Asimulation with_b = only_a({kRoot});
  with_b.relB.emplace();
  CHECK_THROWS_AS(check_asimulation(m, 0, m, 0, Variant(1, 1), with_b), InputError);
}

TEST_CASE("maximal relation on one-point models", "[asimulation]") {
  const auto p = single(true);
  const auto max = maximal_asimulation(p, 0, p, 0, Variant(1, 1));
  CHECK(max.relation.relA == std::set<DirectedPair>{kRoot, kBack});
  CHECK(max.contains_root);

  const auto q = single(false);
  const auto lost = maximal_asimulation(p, 0, q, 0, Variant(1, 1));
  CHECK(lost.relation.relA == std::set<DirectedPair>{kBack});
  CHECK_FALSE(lost.contains_root);
  CHECK(lost.relation.relA == oracle::subset_union(p, q, Conditions::of(Variant(1, 1))).relation.relA);
}

TEST_CASE("a pair whose target has no successors survives", "[asimulation]") {
  const auto m1 = load_model(R"({"worlds": ["t", "t1"], "R": [["t", "t1"]], "val": {"p1": ["t1"]}})");
  const auto m2 = load_model(R"({"worlds": ["u"]})");
  const auto max = maximal_asimulation(m1, 0, m2, 0, Variant(1, 1));
  CHECK(max.contains_root);
  CHECK(max.relation.relA == oracle::subset_union(m1, m2, Conditions::of(Variant(1, 1))).relation.relA);
}

TEST_CASE("the maximal relation is the union of all passing relations", "[asimulation]") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m1 = random_model(RandomModelParams{rng.between(1, 2), 0.4, 0.4, 0.4, 1, 0.5}, rng.next());
    const auto m2 = random_model(RandomModelParams{rng.between(1, 2), 0.4, 0.4, 0.4, 1, 0.5}, rng.next());
    for (const Variant v : Variant::all()) {
      const auto max = maximal_asimulation(m1, 0, m2, 0, v);
      const auto brute = oracle::subset_union(m1, m2, Conditions::of(v));
      INFO(print_model(m1) << " " << print_model(m2) << " " << v.code());
      CHECK(max.relation.relA == brute.relation.relA);
      CHECK(max.relation.relB == brute.relation.relB);
      Asimulation rel = max.relation;
      CHECK(check_asimulation(m1, 0, m2, 0, Conditions::of(v).without(Condition::elem), rel).ok());
    }
  }
}

TEST_CASE("distinguishing formulas", "[asimulation]") {
  const auto p = single(true);
  const auto q = single(false);
  const auto f = distinguishing_formula(p, 0, q, 0, Variant(1, 1), 3);
  REQUIRE(f);
  CHECK(*f == parse_modal("p1"));
  CHECK_FALSE(distinguishing_formula(q, 0, p, 0, Variant(1, 1), 3));

  const auto m = random_model(RandomModelParams{3, 0.4, 0.4, 0.4, 2, 0.5}, 11);
  for (const Variant v : Variant::all())
    for (std::size_t depth = 0; depth <= 4; ++depth) CHECK_FALSE(distinguishing_formula(m, 0, m, 0, v, depth));
}

TEST_CASE("an isolated point against a point with an R-successor", "[asimulation]") {
  const auto t = load_model(R"({"worlds": ["t"]})");
  const auto u = load_model(R"({"worlds": ["u", "u1"], "R": [["u", "u1"]]})");
  for (const Variant v : {Variant(1, 2), Variant(2, 2)}) {
    const auto f = distinguishing_formula(t, 0, u, 0, v, 3);
    REQUIRE(f);
    CHECK(*f == parse_modal("dia false"));
    const auto phi = translate(*f, v);
    CHECK(oracle::fol(t, {{"x", 0}}, phi));
    CHECK_FALSE(oracle::fol(u, {{"x", 0}}, phi));
    CHECK_FALSE(maximal_asimulation(t, 0, u, 0, v).contains_root);
  }
}

TEST_CASE("k-indexed relations", "[asimulation]") {
  const auto t = load_model(R"({"worlds": ["t"]})");
  const auto u = load_model(R"({"worlds": ["u", "d"], "R": [["u", "d"]]})");
  const SeqAsimulation root{{{Direction::forward, {0}, {0}}}, std::nullopt};
  const Conditions conds = Conditions::of(Variant(1, 1));
  CHECK(check_k_asimulation(t, 0, u, 0, 0, conds, root).ok());
  const Verdict deeper = check_k_asimulation(t, 0, u, 0, 2, conds, root);
  CHECK(deeper.count("p-step") == 1);

  const auto same = single(true);
  const SeqAsimulation both{{{Direction::forward, {0}, {0}}, {Direction::backward, {0}, {0}}}, std::nullopt};
  for (std::size_t k = 0; k <= 3; ++k) CHECK(check_k_asimulation(same, 0, same, 0, k, conds, both).ok());

  const SeqAsimulation uneven{{{Direction::forward, {0}, {0}}, {Direction::forward, {0, 0}, {0}}}, std::nullopt};
  CHECK(check_k_asimulation(same, 0, same, 0, 1, conds, uneven).count("p-type") == 1);
}

TEST_CASE("relation documents", "[asimulation]") {
  const auto m1 = load_model(R"({"worlds": ["w0"]})");
  const auto m2 = load_model(R"({"worlds": ["v0", "v1"]})");
  const auto rel = relation_from_json(
      nlohmann::json::parse(R"({"relA": [{"dir": "12", "from": "w0", "to": "v1"}, {"dir": "21", "from": "v0", "to": "w0"}]})"),
      m1, m2);
  CHECK(rel.relA == std::set<DirectedPair>{{Direction::forward, 0, 1}, {Direction::backward, 0, 0}});
  CHECK_FALSE(rel.relB);
  CHECK(relation_from_json(relation_to_json(rel, m1, m2), m1, m2) == rel);
  CHECK_THROWS_AS(relation_from_json(nlohmann::json::parse(R"({"relA": [{"dir": "13", "from": "w0", "to": "v0"}]})"), m1, m2),
                  InputError);
  CHECK_THROWS_AS(relation_from_json(nlohmann::json::parse(R"({"relA": [{"dir": "12", "from": "v0", "to": "w0"}]})"), m1, m2),
                  ModelError);
  const SeqAsimulation seq{{{Direction::forward, {0, 0}, {1, 0}}}, std::set<SeqPair>{}};
  CHECK(seq_relation_from_json(seq_relation_to_json(seq, m1, m2), m1, m2) == seq);
}
