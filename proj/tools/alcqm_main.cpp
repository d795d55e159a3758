#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "alcqm/engine.hpp"
#include "alcqm/inference.hpp"
#include "alcqm/model.hpp"
#include "alcqm/oracle.hpp"
#include "alcqm/parser.hpp"
#include "alcqm/random_ontology.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;  // inconsistent / not entailed / violations
constexpr int kExitUsage = 2;     // usage, parse or name errors
constexpr int kExitInternal = 3;  // step cap, broken invariants

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_diagnostics(const std::string& path, const std::vector<alcqm::Diagnostic>& diags) {
  for (const auto& d : diags) {
    std::cerr << path << ":";
    if (d.span) std::cerr << d.span->line << ":" << d.span->column << ":";
    if (!d.location.empty()) std::cerr << d.location << ":";
    std::cerr << " " << d.message << "\n";
  }
}

std::optional<alcqm::Ontology> load_ontology(const std::string& path) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << path << ": cannot read file\n";
    return std::nullopt;
  }
  alcqm::ParseResult parsed = alcqm::parse(*text);
  if (!parsed.ok()) {
    print_diagnostics(path, parsed.errors);
    return std::nullopt;
  }
  return std::move(parsed.ontology);
}

std::uint64_t default_step_cap() {
  if (const char* env = std::getenv("ALCQM_STEP_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return 1000000;
}

struct CommonFlags {
  bool trace = false;
  bool fair = false;
  int jobs = 1;
  std::uint64_t step_cap = default_step_cap();

  alcqm::EngineOptions engine() const {
    alcqm::EngineOptions opts;
    opts.prioritized = !fair;
    opts.jobs = jobs;
    opts.step_cap = step_cap;
    if (trace) opts.trace = [](const std::string& line) { std::cout << line << "\n"; };
    return opts;
  }
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_flag("--trace", flags.trace, "print one line per rule application and graph mutation");
  cmd->add_flag("--fair", flags.fair, "disable the rule-priority strategy");
  cmd->add_option("--jobs", flags.jobs, "parallel branch exploration at the first branch point");
  cmd->add_option("--step-cap", flags.step_cap,
                  "abort after this many rule applications (env ALCQM_STEP_CAP)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alcqm: consistency checking and inference for ALCQ with meta-modelling"};
  app.require_subcommand(1);

  // check
  auto* check = app.add_subcommand("check", "decide consistency of an ontology");
  std::string check_path;
  CommonFlags check_flags;
  bool explain = false, explain_all = false, print_model = false;
  check->add_option("file", check_path)->required();
  add_common(check, check_flags);
  check->add_flag("--explain", explain, "print one closure witness when inconsistent");
  check->add_flag("--explain-all", explain_all, "print every explored branch closure");
  check->add_flag("--model", print_model, "print the extracted model when consistent");

  // infer
  auto* infer = app.add_subcommand("infer", "meta | instance | subsumes | metaconcept");
  std::string infer_path, infer_query;
  std::vector<std::string> infer_args;
  CommonFlags infer_flags;
  infer->add_option("file", infer_path)->required();
  infer->add_option("query", infer_query)->required();
  infer->add_option("args", infer_args);
  add_common(infer, infer_flags);

  // hierarchy
  auto* hierarchy = app.add_subcommand("hierarchy", "meta-modelling levels of all concepts");
  std::string hierarchy_path;
  CommonFlags hierarchy_flags;
  hierarchy->add_option("file", hierarchy_path)->required();
  add_common(hierarchy, hierarchy_flags);

  // model-check
  auto* mc = app.add_subcommand("model-check", "check a model file against an ontology");
  std::string mc_onto, mc_model;
  mc->add_option("ontology", mc_onto)->required();
  mc->add_option("model", mc_model)->required();

  // fuzz
  auto* fuzz = app.add_subcommand("fuzz", "random ontologies vs. the brute-force model search");
  std::uint64_t fuzz_seed = 0;
  int fuzz_count = 100;
  CommonFlags fuzz_flags;
  fuzz->add_option("count", fuzz_count, "number of cases");
  fuzz->add_option("--seed", fuzz_seed, "first seed");
  add_common(fuzz, fuzz_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) {
      auto onto = load_ontology(check_path);
      if (!onto) return kExitUsage;
      alcqm::EngineOptions opts = check_flags.engine();
      opts.explain_all = explain_all;
      alcqm::Verdict v = alcqm::check_consistency(*onto, opts);
      if (v.consistent) {
        std::cout << "CONSISTENT\n";
        if (print_model) {
          alcqm::Interpretation m = alcqm::build_model(v.state->graph, *onto);
          std::cout << alcqm::serialize_model(m, *onto);
        }
        return kExitOk;
      }
      std::cout << "INCONSISTENT\n";
      if (explain_all) {
        for (const auto& c : v.closures) std::cout << "closed by: " << c.description << "\n";
      } else if (explain && !v.closures.empty()) {
        std::cout << "closed by: " << v.closures.front().description << "\n";
      }
      return kExitNegative;
    }

    if (*infer) {
      auto onto = load_ontology(infer_path);
      if (!onto) return kExitUsage;
      alcqm::EngineOptions opts = infer_flags.engine();
      auto parse_expr = [&](const std::string& text) -> std::optional<alcqm::ConceptId> {
        alcqm::ConceptParseResult r = alcqm::parse_concept(text, *onto);
        if (!r.expr) print_diagnostics("<query>", r.errors);
        return r.expr;
      };
      bool answer = false;
      std::string witness;
      if (infer_query == "meta") {
        if (infer_args.size() != 2) {
          std::cerr << "usage: infer <file> meta <individual> <Concept>\n";
          return kExitUsage;
        }
        answer = alcqm::entails_meta(*onto, infer_args[0], infer_args[1], opts);
      } else if (infer_query == "instance") {
        if (infer_args.size() != 2) {
          std::cerr << "usage: infer <file> instance <Concept> <individual>\n";
          return kExitUsage;
        }
        auto c = parse_expr(infer_args[0]);
        if (!c) return kExitUsage;
        alcqm::Signature sig = onto->signature();
        if (!sig.individuals.count(infer_args[1])) {
          std::cerr << "unknown individual '" << infer_args[1] << "'\n";
          return kExitUsage;
        }
        answer = alcqm::entails_instance(*onto, *c, infer_args[1], opts);
      } else if (infer_query == "subsumes") {
        if (infer_args.size() != 2) {
          std::cerr << "usage: infer <file> subsumes <Concept> <Concept>\n";
          return kExitUsage;
        }
        auto c = parse_expr(infer_args[0]);
        auto d = parse_expr(infer_args[1]);
        if (!c || !d) return kExitUsage;
        // subsumes C D: is C a subclass of D
        answer = alcqm::entails_subsumption(*onto, *c, *d, opts);
      } else if (infer_query == "metaconcept") {
        if (infer_args.size() != 1) {
          std::cerr << "usage: infer <file> metaconcept <Concept>\n";
          return kExitUsage;
        }
        auto c = parse_expr(infer_args[0]);
        if (!c) return kExitUsage;
        alcqm::MetaConceptResult r = alcqm::is_meta_concept(*onto, *c, opts);
        answer = r.is_meta;
        if (r.witness)
          witness = "witness: " + r.witness->first + " =m " + r.witness->second;
      } else {
        std::cerr << "unknown query '" << infer_query << "'\n";
        return kExitUsage;
      }
      std::cout << (answer ? "true" : "false") << "\n";
      if (!witness.empty()) std::cout << witness << "\n";
      return answer ? kExitOk : kExitNegative;
    }

    if (*hierarchy) {
      auto onto = load_ontology(hierarchy_path);
      if (!onto) return kExitUsage;
      alcqm::HierarchyLevels levels;
      try {
        levels = alcqm::meta_hierarchy(*onto, hierarchy_flags.engine());
      } catch (const alcqm::InconsistentOntology&) {
        std::cerr << "ontology is inconsistent; no hierarchy\n";
        return kExitNegative;
      }
      std::vector<std::pair<int, std::string>> rows;
      for (const auto& [name, level] : levels.levels) rows.emplace_back(level, name);
      std::sort(rows.begin(), rows.end());
      for (const auto& [level, name] : rows) std::cout << name << ": " << level << "\n";
      return kExitOk;
    }

    if (*mc) {
      auto onto = load_ontology(mc_onto);
      if (!onto) return kExitUsage;
      auto text = read_file(mc_model);
      if (!text) {
        std::cerr << mc_model << ": cannot read file\n";
        return kExitUsage;
      }
      alcqm::ModelParseResult parsed = alcqm::parse_model(*text, *onto);
      if (!parsed.interpretation) {
        print_diagnostics(mc_model, parsed.errors);
        return kExitUsage;
      }
      auto violations = alcqm::check_model(*parsed.interpretation, *onto);
      if (violations.empty()) {
        std::cout << "ok\n";
        std::cout << "LEVEL " << parsed.interpretation->level() << "\n";
        return kExitOk;
      }
      for (const auto& v : violations)
        std::cout << "violated: " << v.axiom << ": " << v.detail << "\n";
      return kExitNegative;
    }

    if (*fuzz) {
      alcqm::GeneratorBounds gen;
      gen.max_individuals = 3;
      gen.max_concepts = 3;
      gen.max_mbox = 2;
      int disagreements = 0;
      for (int i = 0; i < fuzz_count; ++i) {
        std::uint64_t seed = fuzz_seed + static_cast<std::uint64_t>(i);
        alcqm::Ontology o = alcqm::random_ontology(seed, gen);
        alcqm::EngineOptions opts = fuzz_flags.engine();
        opts.trace = nullptr;
        bool tableau_verdict = alcqm::check_consistency(o, opts).consistent;
        bool oracle_verdict = alcqm::brute_force_consistent(o);
        if (tableau_verdict != oracle_verdict) {
          ++disagreements;
          std::cout << "DISAGREE seed=" << seed << " tableau=" << tableau_verdict
                    << " oracle=" << oracle_verdict << "\n";
          std::cout << alcqm::serialize(o);
        }
      }
      std::cout << fuzz_count << " cases, " << disagreements << " disagreements\n";
      return disagreements == 0 ? kExitOk : kExitNegative;
    }
  } catch (const alcqm::StepCapExceeded& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
