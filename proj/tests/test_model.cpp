#include <doctest.h>

#include "alcqm/engine.hpp"
#include "alcqm/model.hpp"
#include "alcqm/parser.hpp"
#include "alcqm/random_ontology.hpp"
#include "test_util.hpp"

using namespace alcqm;

namespace {

Verdict consistent_verdict(const Ontology& o) {
  Verdict v = check_consistency(o);
  REQUIRE(v.consistent);
  return v;
}

}  // namespace

TEST_CASE("canonical interpretation reads labels off the graph") {
  Ontology o = testutil::load_fixture("fig3.alcqm");
  Verdict v = consistent_verdict(o);
  AtomicInterpretation ic = canonical_interpretation(v.state->graph, o);

  const auto& g = v.state->graph;
  auto river_ext = ic.concepts.at("River");
  CHECK(river_ext.count(g.find(*g.individual("queguay"))) == 1);
  CHECK(river_ext.count(g.find(*g.individual("santaLucia"))) == 1);
  CHECK(ic.individuals.at("river") == g.find(*g.individual("river")));
}

TEST_CASE("one bare node gives a one-element domain with empty maps") {
  auto r = parse("TBOX\nABOX\nTOP(a)\nMBOX\n");
  REQUIRE(r.ok());
  Verdict v = consistent_verdict(*r.ontology);
  AtomicInterpretation ic = canonical_interpretation(v.state->graph, *r.ontology);
  CHECK(ic.domain.size() == 1);
  for (const auto& [name, ext] : ic.concepts) {
    (void)name;
    CHECK(ext.empty());
  }
}

TEST_CASE("clashing graphs are rejected") {
  ConceptPoolPtr pool = std::make_shared<ConceptPool>();
  TableauGraph g(pool);
  NodeHandle x = g.add_individual("x", {});
  g.add_label(x, pool->bottom(), {});
  Ontology o;
  o.pool = pool;
  o.abox.push_back({ABoxAssertion::Kind::Concept, pool->atomic("A"), 0, "x", ""});
  CHECK_THROWS_AS((void)canonical_interpretation(g, o), std::logic_error);
}

TEST_CASE("a directly blocked node borrows its blocker's successors") {
  ConceptPoolPtr pool = std::make_shared<ConceptPool>();
  TableauGraph g(pool);
  ConceptId a = pool->atomic("A");
  RoleId r = pool->role("r");
  NodeHandle x = g.add_individual("x", {});
  NodeHandle v1 = g.add_variable(1, {});
  NodeHandle v2 = g.add_variable(2, {});
  g.add_edge(x, v1, r, {});
  g.add_edge(v1, v2, r, {});
  g.add_label(x, a, {});
  g.add_label(v1, a, {});
  g.add_label(v2, a, {});  // label(v2) subset of label(v1): v2 blocked by v1

  Ontology o;
  o.pool = pool;
  o.abox.push_back({ABoxAssertion::Kind::Concept, a, 0, "x", ""});
  o.abox.push_back({ABoxAssertion::Kind::Role, 0, r, "x", "x"});

  REQUIRE(g.block_status(v2).kind == TableauGraph::BlockInfo::Kind::Direct);
  AtomicInterpretation ic = canonical_interpretation(g, o);
  // v2 mirrors v1's out-edges, so it loops back to v2 itself
  CHECK(ic.roles.at("r").count({v2, v2}) == 1);
  CHECK(ic.roles.at("r").count({v1, v2}) == 1);
  CHECK(ic.roles.at("r").count({x, v1}) == 1);
}

TEST_CASE("precedence edges and well-foundedness") {
  Ontology o = testutil::load_fixture("fig3.alcqm");
  Verdict v = consistent_verdict(o);
  const auto& g = v.state->graph;
  auto edges = prec_relation(g, o);
  bool found = false;
  for (const auto& e : edges) {
    if (e.y == g.find(*g.individual("queguay")) && e.x == g.find(*g.individual("river")))
      found = true;
  }
  CHECK(found);
  CHECK(!prec_cycle(edges).has_value());

  SUBCASE("empty mbox gives an empty relation") {
    Ontology plain = testutil::load_fixture("example3_no_mbox.alcqm");
    Verdict v2 = consistent_verdict(plain);
    CHECK(prec_relation(v2.state->graph, plain).empty());
  }

  SUBCASE("the cycle fixture trips both detectors") {
    Ontology bad = testutil::load_fixture("def7_cycle.alcqm");
    TableauGraph g2 = initialize(bad);
    auto mbox = compile_mbox(bad, g2);
    REQUIRE(g2.has_cycle(mbox).has_value());
    auto prec = prec_relation(g2, bad);
    CHECK(prec_cycle(prec).has_value());
  }
}

TEST_CASE("set_of folds meta-modelled nodes into sets") {
  Ontology o = testutil::load_fixture("fig3.alcqm");
  Verdict v = consistent_verdict(o);
  const auto& g = v.state->graph;
  auto sets = std::make_shared<NestedSetPool>();
  SetOfBuilder builder(g, o, sets);

  SetId qg = builder.set_of(*g.individual("queguay"));
  CHECK(sets->is_atom(qg));

  SetId river = builder.set_of(*g.individual("river"));
  REQUIRE(!sets->is_atom(river));
  AtomicInterpretation ic = canonical_interpretation(g, o);
  CHECK(sets->members(river).size() == ic.concepts.at("River").size());
}

TEST_CASE("set_of is well-defined across merged axioms") {
  // a and b merge, so both axioms name one node; the extensions coincide
  auto r = parse("TBOX\nABOX\na = b\nA(c)\nMBOX\na =m A\nb =m A\n");
  REQUIRE(r.ok());
  Verdict v = consistent_verdict(*r.ontology);
  Interpretation m = build_model(v.state->graph, *r.ontology);
  CHECK(m.individuals.at("a") == m.individuals.at("b"));
}

TEST_CASE("build_model equates meta-modelled individuals with their concepts") {
  Ontology o = testutil::load_fixture("fig3.alcqm");
  Verdict v = consistent_verdict(o);
  Interpretation m = build_model(v.state->graph, o);

  auto river_ext = m.concepts.at("River");
  SetId river_as_set = m.sets->make_set({river_ext.begin(), river_ext.end()});
  CHECK(m.individuals.at("river") == river_as_set);
  auto lake_ext = m.concepts.at("Lake");
  CHECK(m.individuals.at("lake") == m.sets->make_set({lake_ext.begin(), lake_ext.end()}));
  CHECK(m.level() == 1);
  CHECK(check_model(m, o).empty());
}

TEST_CASE("an mbox-free model is all atoms at level 0") {
  auto r = parse("TBOX\nA SUBCLASSOF B\nABOX\nA(x)\nMBOX\n");
  REQUIRE(r.ok());
  Verdict v = consistent_verdict(*r.ontology);
  Interpretation m = build_model(v.state->graph, *r.ontology);
  for (SetId d : m.domain) CHECK(m.sets->is_atom(d));
  CHECK(m.level() == 0);
  CHECK(check_model(m, *r.ontology).empty());
}

TEST_CASE("the hand-written model of fig3 checks out") {
  Ontology o = testutil::load_fixture("fig3.alcqm");
  auto parsed = parse_model(testutil::read_file(testutil::fixture_path("fig3_hand.model")), o);
  REQUIRE(parsed.interpretation.has_value());
  CHECK(check_model(*parsed.interpretation, o).empty());
  CHECK(parsed.interpretation->level() == 1);

  SUBCASE("dropping delSauce from Lake breaks an assertion") {
    std::string text = testutil::read_file(testutil::fixture_path("fig3_hand.model"));
    auto pos = text.find("Lake := {deRocha, delSauce}");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("Lake := {deRocha, delSauce}").size(), "Lake := {deRocha}");
    // lake's value and the level line stay as they were, so several axioms break
    auto mutated = parse_model(text, o);
    REQUIRE(mutated.interpretation.has_value());
    auto violations = check_model(*mutated.interpretation, o);
    REQUIRE(!violations.empty());
    bool mentions_delsauce_assertion = false;
    for (const auto& v : violations) {
      if (v.axiom.find("Lake(delSauce)") != std::string::npos) mentions_delsauce_assertion = true;
    }
    CHECK(mentions_delsauce_assertion);
  }
}

TEST_CASE("model files round trip") {
  for (const char* name : {"fig3.alcqm", "fig5.alcqm", "example3_no_mbox.alcqm"}) {
    Ontology o = testutil::load_fixture(name);
    Verdict v = consistent_verdict(o);
    Interpretation m = build_model(v.state->graph, o);
    std::string text = serialize_model(m, o);
    auto parsed = parse_model(text, o);
    REQUIRE(parsed.interpretation.has_value());
    CHECK(check_model(*parsed.interpretation, o).empty());
    CHECK(parsed.interpretation->level() == m.level());
    CHECK(serialize_model(*parsed.interpretation, o) == text);
  }
}

TEST_CASE("model parser rejects foreign names and wrong levels") {
  Ontology o = testutil::load_fixture("fig3.alcqm");
  CHECK(!parse_model("Nonsense := {}\n", o).interpretation.has_value());
  CHECK(!parse_model("queguay := queguay\nLEVEL 7\n", o).interpretation.has_value());
}

TEST_CASE("extraction safety on random consistent ontologies") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 400 && checked < 150; ++seed) {
    Ontology o = random_ontology(seed);
    Verdict v = check_consistency(o);
    if (!v.consistent) continue;
    ++checked;
    // build_model asserts set_of injectivity and the mbox equalities
    Interpretation m = build_model(v.state->graph, o);
    CHECK(check_model(m, o).empty());
    CHECK(!prec_cycle(prec_relation(v.state->graph, o)).has_value());
  }
  CHECK(checked > 50);
}
