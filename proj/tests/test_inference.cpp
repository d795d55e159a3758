#include <doctest.h>

#include "alcqm/inference.hpp"
#include "alcqm/parser.hpp"
#include "test_util.hpp"

using namespace alcqm;

TEST_CASE("meta-modelling entailment on fig3") {
  Ontology o = testutil::load_fixture("fig3.alcqm");
  CHECK(entails_meta(o, "river", "River"));
  CHECK(entails_meta(o, "lake", "Lake"));
  CHECK(!entails_meta(o, "queguay", "River"));
  CHECK(!entails_meta(o, "river", "Lake"));
  CHECK_THROWS_AS((void)entails_meta(o, "nosuch", "River"), std::invalid_argument);
}

TEST_CASE("equated individuals inherit meta-modelling") {
  // no disjointness, but river = lake: both correspond to River
  auto r = parse(
      "TBOX\nABOX\nHydrographicObject(river)\nHydrographicObject(lake)\nriver = lake\n"
      "MBOX\nriver =m River\nlake =m Lake\n");
  REQUIRE(r.ok());
  CHECK(entails_meta(*r.ontology, "lake", "River"));
  CHECK(entails_meta(*r.ontology, "river", "Lake"));
}

TEST_CASE("instance and subsumption reductions") {
  Ontology o = testutil::load_fixture("fig3.alcqm");
  auto expr = [&](const std::string& text) {
    auto pr = parse_concept(text, o);
    REQUIRE(pr.expr.has_value());
    return *pr.expr;
  };
  CHECK(entails_instance(o, expr("River"), "queguay"));
  CHECK(!entails_instance(o, expr("Lake"), "queguay"));
  CHECK(!entails_subsumption(o, expr("River"), expr("Lake")));
  CHECK(entails_subsumption(o, expr("River"), expr("River")));
  CHECK(entails_subsumption(o, expr("River AND Lake"), expr("BOTTOM")));
}

TEST_CASE("meta-concept detection") {
  Ontology o = testutil::load_fixture("fig3.alcqm");
  auto expr = [&](const std::string& text) { return *parse_concept(text, o).expr; };

  MetaConceptResult ho = is_meta_concept(o, expr("HydrographicObject"));
  CHECK(ho.is_meta);
  REQUIRE(ho.witness.has_value());
  CHECK(ho.witness->first == "river");
  CHECK(ho.witness->second == "River");

  CHECK(!is_meta_concept(o, expr("River")).is_meta);

  Ontology fig5 = testutil::load_fixture("fig5.alcqm");
  auto expr5 = [&](const std::string& text) { return *parse_concept(text, fig5).expr; };
  CHECK(is_meta_concept(fig5, expr5("GeographicObject")).is_meta);
}

TEST_CASE("hierarchy levels for fig3") {
  HierarchyLevels h = meta_hierarchy(testutil::load_fixture("fig3.alcqm"));
  REQUIRE(h.levels.size() == 3);
  CHECK(h.levels.at("River") == 0);
  CHECK(h.levels.at("Lake") == 0);
  CHECK(h.levels.at("HydrographicObject") == 1);
}

TEST_CASE("hierarchy levels for fig5") {
  HierarchyLevels h = meta_hierarchy(testutil::load_fixture("fig5.alcqm"));
  CHECK(h.levels.at("GeographicObject") == 2);
  CHECK(h.levels.at("HydrographicObject") == 1);
  CHECK(h.levels.at("FloraObject") == 1);
  int zeros = 0;
  for (const auto& [name, level] : h.levels)
    if (level == 0) ++zeros;
  CHECK(zeros == 6);
}

TEST_CASE("one more meta-modelling axiom adds one more level") {
  Ontology o = testutil::load_fixture("fig5.alcqm");
  o.mbox.push_back({"santaLucia", "SantaLucia"});
  HierarchyLevels h = meta_hierarchy(o);
  CHECK(h.levels.at("SantaLucia") == 0);
  CHECK(h.levels.at("River") == 1);
  CHECK(h.levels.at("HydrographicObject") == 2);
  CHECK(h.levels.at("GeographicObject") == 3);
}

TEST_CASE("empty mbox means every concept sits at level 0") {
  HierarchyLevels h = meta_hierarchy(testutil::load_fixture("example3_no_mbox.alcqm"));
  for (const auto& [name, level] : h.levels) {
    (void)name;
    CHECK(level == 0);
  }
}

TEST_CASE("hierarchy refuses inconsistent ontologies") {
  CHECK_THROWS_AS((void)meta_hierarchy(testutil::load_fixture("example1.alcqm")),
                  InconsistentOntology);
}

TEST_CASE("asserted mbox axioms are always entailed") {
  for (const char* name : {"fig3.alcqm", "fig5.alcqm"}) {
    Ontology o = testutil::load_fixture(name);
    for (const auto& m : o.mbox) CHECK(entails_meta(o, m.individual, m.concept_name));
  }
}
