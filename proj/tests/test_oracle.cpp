#include <doctest.h>

#include "alcqm/engine.hpp"
#include "alcqm/oracle.hpp"
#include "alcqm/parser.hpp"
#include "alcqm/random_ontology.hpp"
#include "test_util.hpp"

using namespace alcqm;

TEST_CASE("the empty ontology has a model") {
  CHECK(brute_force_consistent(testutil::load_fixture("empty.alcqm")));
}

TEST_CASE("fig3 has a model within bounds") {
  CHECK(brute_force_consistent(testutil::load_fixture("fig3.alcqm"),
                               OracleBounds{5, 8, 3, 1, 2}));
}

TEST_CASE("self-membership has no well-founded model") {
  auto r = parse("TBOX\nABOX\nA(a)\nMBOX\na =m A\n");
  REQUIRE(r.ok());
  CHECK(!brute_force_consistent(*r.ontology));
}

TEST_CASE("the two-axiom label cycle has no model") {
  CHECK(!brute_force_consistent(testutil::load_fixture("def7_cycle.alcqm")));
}

TEST_CASE("equality transfer is forced semantically") {
  auto r = parse(
      "TBOX\nRiver AND Lake SUBCLASSOF BOTTOM\nABOX\nRiver(queguay)\nLake(deRocha)\n"
      "river = lake\nMBOX\nriver =m River\nlake =m Lake\n");
  REQUIRE(r.ok());
  CHECK(!brute_force_consistent(*r.ontology));
}

TEST_CASE("unsatisfiable boolean combinations are detected") {
  auto r = parse("TBOX\nTOP SUBCLASSOF BOTTOM\nABOX\nTOP(a)\nMBOX\n");
  REQUIRE(r.ok());
  CHECK(!brute_force_consistent(*r.ontology));
  // with no individuals, the empty domain is a model even under TOP SUBCLASSOF BOTTOM
  auto r2 = parse("TBOX\nTOP SUBCLASSOF BOTTOM\nABOX\nMBOX\n");
  REQUIRE(r2.ok());
  CHECK(brute_force_consistent(*r2.ontology));
}

TEST_CASE("counting semantics distinguishes distinct individuals") {
  auto r = parse(
      "TBOX\nTOP SUBCLASSOF ATMOST 1 r.TOP\nABOX\nr(a, b)\nr(a, c)\nb != c\nMBOX\n");
  REQUIRE(r.ok());
  CHECK(!brute_force_consistent(*r.ontology));
  auto r2 = parse("TBOX\nTOP SUBCLASSOF ATMOST 1 r.TOP\nABOX\nr(a, b)\nr(a, c)\nMBOX\n");
  REQUIRE(r2.ok());
  CHECK(brute_force_consistent(*r2.ontology));  // b and c may coincide
}

TEST_CASE("bounds are enforced") {
  Ontology o;
  o.pool = std::make_shared<ConceptPool>();
  for (int i = 0; i < 7; ++i)
    o.abox.push_back(
        {ABoxAssertion::Kind::Concept, o.pool->atomic("A"), 0, "a" + std::to_string(i), ""});
  CHECK_THROWS_AS((void)brute_force_consistent(o), OracleRefusal);
}

TEST_CASE("oracle and tableau agree on a seed range") {
  GeneratorBounds gen;
  gen.max_individuals = 3;
  gen.max_concepts = 3;
  gen.max_mbox = 2;
  for (std::uint64_t seed = 5000; seed < 5300; ++seed) {
    Ontology o = random_ontology(seed, gen);
    CAPTURE(seed);
    CHECK(check_consistency(o).consistent == brute_force_consistent(o));
  }
}
