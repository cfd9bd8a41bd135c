// Command-line front end: one subcommand per operation.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "masim/masim.hpp"

namespace {

using namespace masim;

constexpr int kOk = 0;
constexpr int kPropertyFailure = 1;
constexpr int kUsageError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

/// "@path" reads the formula from a file.
std::string formula_text(const std::string& arg) { return arg.starts_with('@') ? read_file(arg.substr(1)) : arg; }

KripkeStructure model_file(const std::string& path) { return load_model(read_file(path)); }

nlohmann::json json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

Notation notation(bool unicode) { return unicode ? Notation::unicode : Notation::ascii; }

int print_verdict(const Verdict& verdict) {
  if (verdict.ok()) {
    std::cout << "ok\n";
    return kOk;
  }
  for (const auto& v : verdict.violations) std::cout << v.condition << ": " << v.witness << "\n";
  return kPropertyFailure;
}

/// --m1/--t/--m2/--u, shared by the relational subcommands.
struct PointedPair {
  std::string m1, t, m2, u;

  void add(CLI::App* cmd) {
    cmd->add_option("--m1", m1, "first model file")->required();
    cmd->add_option("--t", t, "point of the first model")->required();
    cmd->add_option("--m2", m2, "second model file")->required();
    cmd->add_option("--u", u, "point of the second model")->required();
  }
};

struct Loaded {
  KripkeStructure m1, m2;
  std::size_t t, u;
};

Loaded load(const PointedPair& p) {
  KripkeStructure m1 = model_file(p.m1);
  KripkeStructure m2 = model_file(p.m2);
  const std::size_t t = m1.at(p.t);
  const std::size_t u = m2.at(p.u);
  return {std::move(m1), std::move(m2), t, u};
}

std::vector<KripkeStructure> corpus_files(const std::vector<std::string>& paths) {
  std::vector<KripkeStructure> out;
  for (const auto& p : paths) out.push_back(model_file(p));
  return out;
}

ModelClassSpec axioms_file(const std::optional<std::string>& path) {
  return path ? parse_axioms(*path, read_file(*path)) : model_classes::unrestricted();
}

int run(int argc, char** argv) {
  CLI::App app{"Modal asimulations, standard translations and property suites"};
  app.require_subcommand(1);
  std::function<int()> action;

  // translate
  std::string variant = "11", var = "x", formula;
  bool unicode = false;
  auto* translate_cmd = app.add_subcommand("translate", "standard translation of a modal formula");
  translate_cmd->add_option("--variant", variant, "11|12|21|22");
  translate_cmd->add_option("--var", var, "free variable");
  translate_cmd->add_flag("--unicode", unicode, "print with unicode symbols");
  translate_cmd->add_option("formula", formula, "modal formula or @file")->required();
  translate_cmd->callback([&] {
    action = [&] {
      std::cout << to_string(translate(parse_modal(formula_text(formula)), Variant::parse(variant), var),
                             notation(unicode))
                << "\n";
      return kOk;
    };
  });

  // eval
  std::string model_path, world;
  std::optional<std::string> modal_text, fol_text;
  auto* eval_cmd = app.add_subcommand("eval", "truth of a modal or first-order formula in a model");
  eval_cmd->add_option("--model", model_path, "model file")->required();
  eval_cmd->add_option("--world", world, "world (all worlds when omitted)");
  eval_cmd->add_option("--variant", variant, "11|12|21|22 (modal formulas)");
  eval_cmd->add_option("--var", var, "free variable (first-order formulas)");
  auto* modal_opt = eval_cmd->add_option("--modal", modal_text, "modal formula or @file");
  auto* fol_opt = eval_cmd->add_option("--fol", fol_text, "first-order formula or @file");
  modal_opt->excludes(fol_opt);
  eval_cmd->callback([&] {
    action = [&] {
      if (!modal_text && !fol_text) throw InputError("eval needs --modal or --fol");
      const KripkeStructure m = model_file(model_path);
      WorldSet truth;
      if (modal_text) {
        truth = truth_set(m, parse_modal(formula_text(*modal_text)), Variant::parse(variant));
      } else {
        const FolFormula f = parse_fol(formula_text(*fol_text));
        for (const auto& v : f.free_variables())
          if (v != var) throw InputError("free variable '" + v + "' other than --var " + var);
        truth = satisfying_worlds(m, f, var);
      }
      if (!world.empty()) {
        std::cout << (truth[m.at(world)] ? "true" : "false") << "\n";
      } else {
        for (std::size_t w = 0; w < m.size(); ++w) std::cout << m.name(w) << " " << (truth[w] ? "true" : "false") << "\n";
      }
      return kOk;
    };
  });

  // check-asim
  PointedPair pair;
  std::string relation_path;
  auto* check_cmd = app.add_subcommand("check-asim", "verdict of a relation file against the conditions");
  pair.add(check_cmd);
  check_cmd->add_option("--variant", variant, "11|12|21|22|basic");
  check_cmd->add_option("--rel", relation_path, "relation file")->required();
  check_cmd->callback([&] {
    action = [&] {
      const Loaded l = load(pair);
      const Asimulation rel = relation_from_json(json_file(relation_path), l.m1, l.m2);
      return print_verdict(check_asimulation(l.m1, l.t, l.m2, l.u, Conditions::parse(variant), rel));
    };
  });

  // check-kasim
  std::size_t k = 1;
  auto* kcheck_cmd = app.add_subcommand("check-kasim", "verdict of a sequence relation file for a given k");
  pair.add(kcheck_cmd);
  kcheck_cmd->add_option("--variant", variant, "11|12|21|22|basic");
  kcheck_cmd->add_option("--k", k, "k")->required();
  kcheck_cmd->add_option("--rel", relation_path, "relation file")->required();
  kcheck_cmd->callback([&] {
    action = [&] {
      const Loaded l = load(pair);
      const SeqAsimulation rel = seq_relation_from_json(json_file(relation_path), l.m1, l.m2);
      return print_verdict(check_k_asimulation(l.m1, l.t, l.m2, l.u, k, Conditions::parse(variant), rel));
    };
  });

  // max-asim
  auto* max_cmd = app.add_subcommand("max-asim", "maximal relation between two pointed models");
  pair.add(max_cmd);
  max_cmd->add_option("--variant", variant, "11|12|21|22|basic");
  max_cmd->callback([&] {
    action = [&] {
      const Loaded l = load(pair);
      const auto max = maximal_asimulation(l.m1, l.t, l.m2, l.u, Conditions::parse(variant));
      std::cout << relation_to_json(max.relation, l.m1, l.m2).dump() << "\n"
                << "contains_root " << (max.contains_root ? "true" : "false") << "\n";
      return kOk;
    };
  });

  // distinguish
  std::size_t depth = 6;
  auto* dist_cmd = app.add_subcommand("distinguish", "formula true at t and false at u");
  pair.add(dist_cmd);
  dist_cmd->add_option("--variant", variant, "11|12|21|22");
  dist_cmd->add_option("--depth", depth, "largest modal depth searched");
  dist_cmd->add_flag("--unicode", unicode, "print with unicode symbols");
  dist_cmd->callback([&] {
    action = [&] {
      const Loaded l = load(pair);
      const auto f = distinguishing_formula(l.m1, l.t, l.m2, l.u, Variant::parse(variant), depth);
      std::cout << (f ? to_string(*f, notation(unicode)) : std::string("none")) << "\n";
      return kOk;
    };
  });

  // canonical
  std::optional<std::size_t> canonical_k;
  std::size_t bound = 3;
  auto* canon_cmd = app.add_subcommand("canonical", "type-inclusion relations (k-indexed with --k)");
  pair.add(canon_cmd);
  canon_cmd->add_option("--variant", variant, "11|12|21|22");
  canon_cmd->add_option("--k", canonical_k, "build the k-asimulation");
  canon_cmd->add_option("--bound", bound, "degree bound for the unindexed relation");
  canon_cmd->callback([&] {
    action = [&] {
      const Loaded l = load(pair);
      const Variant v = Variant::parse(variant);
      if (canonical_k) {
        const std::vector<const KripkeStructure*> corpus{&l.m1, &l.m2};
        const auto pools = enumerate_pools(signature_of(corpus), v, *canonical_k + 2, corpus, kNoSizeCap);
        const auto rel = canonical_k_asimulation(l.m1, l.t, l.m2, l.u, *canonical_k, v, pools);
        std::cout << seq_relation_to_json(rel, l.m1, l.m2).dump() << "\n";
        return kOk;
      }
      const auto c = canonical_asimulation(l.m1, l.t, l.m2, l.u, v, bound);
      std::cout << relation_to_json(c.relation, l.m1, l.m2).dump() << "\n"
                << "stabilized " << (c.stabilized ? "true" : "false") << "\n";
      return kOk;
    };
  });

  // gen-st
  std::string signature;
  auto* genst_cmd = app.add_subcommand("gen-st", "translation through a generalized modality");
  genst_cmd->add_option("--sig", signature, "signature such as A:R;E:Rd")->required();
  genst_cmd->add_option("--variant", variant, "variant for the argument formula (default 22)");
  genst_cmd->add_option("--var", var, "free variable");
  genst_cmd->add_flag("--unicode", unicode, "print with unicode symbols");
  genst_cmd->add_option("formula", formula, "modal formula or @file")->required();
  genst_cmd->callback([&] {
    action = [&] {
      std::cout << to_string(gen_st(parse_modality_signature(signature), parse_modal(formula_text(formula)), var,
                                    Variant::parse(variant)),
                             notation(unicode))
                << "\n";
      return kOk;
    };
  });
  genst_cmd->preparse_callback([&](std::size_t) { variant = "22"; });

  // gen-conditions
  auto* genc_cmd = app.add_subcommand("gen-conditions", "condition schemas of a generalized modality");
  genc_cmd->add_option("--sig", signature, "signature such as A:R;E:Rd")->required();
  genc_cmd->callback([&] {
    action = [&] {
      const auto sig = parse_modality_signature(signature);
      const auto schemas = gen_conditions(sig);
      std::cout << "relations " << relation_count(sig) << "\n";
      for (std::size_t i = 0; i < schemas.size(); ++i) std::cout << "r" << i + 1 << ": " << to_string(schemas[i]) << "\n";
      return kOk;
    };
  });

  // check-gen
  auto* checkgen_cmd = app.add_subcommand("check-gen", "verdict of generated conditions for a relation tuple");
  pair.add(checkgen_cmd);
  checkgen_cmd->add_option("--sig", signature, "signature such as A:R;E:Rd")->required();
  checkgen_cmd->add_option("--rel", relation_path, "file {\"relations\": [[...], ...]}")->required();
  checkgen_cmd->callback([&] {
    action = [&] {
      const Loaded l = load(pair);
      const nlohmann::json doc = json_file(relation_path);
      if (!doc.is_object() || !doc.contains("relations") || !doc["relations"].is_array())
        throw InputError("relation tuple document needs a \"relations\" array");
      std::vector<std::set<DirectedPair>> tuple;
      for (const auto& r : doc["relations"]) tuple.push_back(pairs_from_json(r, l.m1, l.m2));
      return print_verdict(check_generated(l.m1, l.t, l.m2, l.u, parse_modality_signature(signature), tuple));
    };
  });

  // kappa-test
  std::string fol_formula;
  std::vector<std::string> corpus;
  std::optional<std::string> axioms;
  auto* kappa_cmd = app.add_subcommand("kappa-test", "counterexamples to invariance over a model corpus");
  kappa_cmd->add_option("--fol", fol_formula, "formula with one free variable, or @file")->required();
  kappa_cmd->add_option("--corpus", corpus, "model files")->required();
  kappa_cmd->add_option("--axioms", axioms, "axiom file restricting the class");
  kappa_cmd->add_option("--variant", variant, "11|12|21|22|basic");
  kappa_cmd->callback([&] {
    action = [&] {
      const auto models = corpus_files(corpus);
      const auto cex = kappa_invariance_test(parse_fol(formula_text(fol_formula)), models, axioms_file(axioms),
                                             Conditions::parse(variant));
      if (cex.empty()) {
        std::cout << "no counterexample\n";
        return kOk;
      }
      for (const auto& c : cex)
        std::cout << corpus[c.source_model] << ":" << models[c.source_model].name(c.source_world) << " -> "
                  << corpus[c.target_model] << ":" << models[c.target_model].name(c.target_world) << "\n";
      return kPropertyFailure;
    };
  });

  // companion
  std::size_t top = 5;
  auto* comp_cmd = app.add_subcommand("companion", "modal formulas agreeing best with a first-order formula");
  comp_cmd->add_option("--fol", fol_formula, "formula with at most one free variable, or @file")->required();
  comp_cmd->add_option("--corpus", corpus, "model files")->required();
  comp_cmd->add_option("--axioms", axioms, "axiom file restricting the class");
  comp_cmd->add_option("--variant", variant, "11|12|21|22");
  comp_cmd->add_option("--bound", bound, "degree bound of the candidate pool");
  comp_cmd->add_option("--top", top, "candidates printed");
  comp_cmd->add_flag("--unicode", unicode, "print with unicode symbols");
  comp_cmd->callback([&] {
    action = [&] {
      const auto models = corpus_files(corpus);
      const ModelClassSpec spec = axioms_file(axioms);
      std::vector<const KripkeStructure*> kept;
      for (const auto& m : models)
        if (satisfies_axioms(m, spec)) kept.push_back(&m);
      if (kept.empty()) throw InputError("no model of the corpus satisfies the axioms");
      const Variant v = Variant::parse(variant);
      const FormulaPool pool = enumerate_pool(signature_of(kept), v, bound, kept, kNoSizeCap);
      const auto ranked = modal_companion_search(parse_fol(formula_text(fol_formula)), models, spec, v, pool);
      for (std::size_t i = 0; i < std::min(top, ranked.size()); ++i)
        std::cout << ranked[i].agree << "/" << ranked[i].total << " " << to_string(ranked[i].formula, notation(unicode))
                  << "\n";
      return ranked.empty() || !ranked.front().exact() ? kPropertyFailure : kOk;
    };
  });

  // suite
  SuiteConfig config;
  std::optional<std::string> json_path;
  std::size_t max_worlds = 0, max_depth = 0, letters = 0, formulas = 0, max_k = 0;
  auto* suite_cmd = app.add_subcommand("suite", "run a randomized property suite");
  suite_cmd->add_option("--name", config.name, "suite name")->required()->check(CLI::IsMember(suite_names()));
  suite_cmd->add_option("--trials", config.trials, "number of trials");
  suite_cmd->add_option("--seed", config.seed, "master seed");
  suite_cmd->add_option("--threads", config.threads, "worker threads");
  auto* worlds_opt = suite_cmd->add_option("--max-worlds", max_worlds, "largest model");
  auto* depth_opt = suite_cmd->add_option("--max-depth", max_depth, "largest formula depth");
  auto* letters_opt = suite_cmd->add_option("--letters", letters, "proposition letters");
  auto* formulas_opt = suite_cmd->add_option("--formulas", formulas, "formulas per model pair");
  auto* k_opt = suite_cmd->add_option("--max-k", max_k, "largest k");
  suite_cmd->add_option("--axioms", axioms, "axiom file; models outside the class are skipped");
  suite_cmd->add_flag("--preorder", config.preorder_models, "close sampled R into a preorder");
  suite_cmd->add_option("--json", json_path, "also write the report as JSON");
  suite_cmd->callback([&] {
    action = [&] {
      if (*worlds_opt) config.max_worlds = max_worlds;
      if (*depth_opt) config.max_depth = max_depth;
      if (*letters_opt) config.letters = letters;
      if (*formulas_opt) config.formulas = formulas;
      if (*k_opt) config.max_k = max_k;
      if (axioms) config.axioms = axioms_file(axioms);
      const SuiteReport report = run_suite(config);
      std::cout << report.body();
      std::cerr << "time " << report.seconds << " s\n";
      if (json_path) {
        std::ofstream out(*json_path);
        if (!out) throw InputError("cannot write '" + *json_path + "'");
        out << report.to_json().dump(2) << "\n";
      }
      return report.ok() ? kOk : kPropertyFailure;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }
  return action();
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const masim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
}
