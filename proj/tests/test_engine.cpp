#include <doctest.h>

#include "alcqm/engine.hpp"
#include "alcqm/parser.hpp"
#include "alcqm/random_ontology.hpp"
#include "test_util.hpp"

using namespace alcqm;

namespace {

bool has_tag(const std::vector<RuleInstance>& rules, RuleTag tag) {
  for (const auto& r : rules)
    if (r.tag == tag) return true;
  return false;
}

const RuleInstance& first_of(const std::vector<RuleInstance>& rules, RuleTag tag) {
  for (const auto& r : rules)
    if (r.tag == tag) return r;
  throw std::runtime_error("no instance of that rule");
}

}  // namespace

TEST_CASE("applicable_rules lists guarded instances") {
  auto parsed = parse("TBOX\nABOX\n(A AND B)(x)\nMBOX\n");
  REQUIRE(parsed.ok());
  Reasoner reasoner(*parsed.ontology);
  SearchState s = reasoner.initial_state();
  auto rules = reasoner.applicable_rules(s);
  REQUIRE(has_tag(rules, RuleTag::Conj));
  const auto& inst = first_of(rules, RuleTag::Conj);
  CHECK(inst.branch_count() == 1);

  // after applying, the conjunction is decomposed and no longer applicable
  auto children = reasoner.apply_rule(s, inst);
  REQUIRE(children.size() == 1);
  CHECK(!has_tag(reasoner.applicable_rules(children[0]), RuleTag::Conj));
}

TEST_CASE("fig3 starts with a close-rule instance for river and lake") {
  Ontology o = testutil::load_fixture("fig3.alcqm");
  Reasoner reasoner(o);
  SearchState s = reasoner.initial_state();
  auto rules = reasoner.applicable_rules(s);
  REQUIRE(has_tag(rules, RuleTag::Close));
  const auto& close = first_of(rules, RuleTag::Close);
  CHECK(close.branch_count() == 2);
  CHECK(reasoner.mbox()[close.mbox_i].individual == "river");
  CHECK(reasoner.mbox()[close.mbox_j].individual == "lake");
}

TEST_CASE("complete states have no applicable rules") {
  Ontology o = testutil::load_fixture("fig3.alcqm");
  Reasoner reasoner(o);
  Verdict v = reasoner.check();
  REQUIRE(v.consistent);
  CHECK(reasoner.applicable_rules(*v.state).empty());
}

TEST_CASE("rule effects") {
  auto parsed = parse("TBOX\nABOX\n(SOME r.C)(x)\n(ATLEAST 2 r.D)(x)\n(C OR D)(y)\nMBOX\n");
  REQUIRE(parsed.ok());
  Ontology o = *parsed.ontology;
  Reasoner reasoner(o);
  SearchState s = reasoner.initial_state();
  auto rules = reasoner.applicable_rules(s);

  SUBCASE("disjunction branches twice") {
    const auto& disj = first_of(rules, RuleTag::Disj);
    auto children = reasoner.apply_rule(s, disj);
    REQUIRE(children.size() == 2);
    NodeHandle y = *s.graph.individual("y");
    CHECK(children[0].graph.has_label(y, o.pool->atomic("C")));
    CHECK(children[1].graph.has_label(y, o.pool->atomic("D")));
  }

  SUBCASE("existential creates one fresh labelled successor") {
    const auto& ex = first_of(rules, RuleTag::Exists);
    auto children = reasoner.apply_rule(s, ex);
    REQUIRE(children.size() == 1);
    const auto& g = children[0].graph;
    REQUIRE(g.node_count() == s.graph.node_count() + 1);
    NodeHandle v = static_cast<NodeHandle>(g.node_count() - 1);
    CHECK(!g.data(v).is_individual);
    CHECK(g.has_edge_role(*g.individual("x"), v, o.pool->role("r")));
    CHECK(g.has_label(v, o.pool->atomic("C")));
  }

  SUBCASE("at-least creates pairwise different witnesses") {
    const auto& al = first_of(rules, RuleTag::AtLeast);
    auto children = reasoner.apply_rule(s, al);
    REQUIRE(children.size() == 1);
    const auto& g = children[0].graph;
    REQUIRE(g.node_count() == s.graph.node_count() + 2);
    NodeHandle v1 = static_cast<NodeHandle>(g.node_count() - 2);
    NodeHandle v2 = static_cast<NodeHandle>(g.node_count() - 1);
    CHECK(g.are_different(v1, v2));
    CHECK(g.has_label(v1, o.pool->atomic("D")));
    CHECK(g.has_label(v2, o.pool->atomic("D")));
  }

  SUBCASE("applying a non-applicable instance is a contract violation") {
    RuleInstance bogus = first_of(rules, RuleTag::Disj);
    bogus.expr = o.pool->atomic("C");  // no such disjunction anywhere
    CHECK_THROWS_AS((void)reasoner.apply_rule(s, bogus), std::invalid_argument);
  }
}

TEST_CASE("meta rules transfer equalities and differences") {
  auto parsed = parse("TBOX\nABOX\na = b\nMBOX\na =m A\nb =m B\n");
  REQUIRE(parsed.ok());
  Ontology o = *parsed.ontology;
  Reasoner reasoner(o);
  SearchState s = reasoner.initial_state();
  auto rules = reasoner.applicable_rules(s);
  REQUIRE(has_tag(rules, RuleTag::MEq));
  auto children = reasoner.apply_rule(s, first_of(rules, RuleTag::MEq));
  REQUIRE(children.size() == 1);
  auto& p = *o.pool;
  ConceptId ab = p.disj(p.atomic("A"), p.negation(p.atomic("B")));
  ConceptId ba = p.disj(p.atomic("B"), p.negation(p.atomic("A")));
  CHECK(children[0].working_tbox.count(ab) == 1);
  CHECK(children[0].working_tbox.count(ba) == 1);

  auto parsed2 = parse("TBOX\nABOX\na != b\nMBOX\na =m A\nb =m B\n");
  REQUIRE(parsed2.ok());
  Reasoner reasoner2(*parsed2.ontology);
  SearchState s2 = reasoner2.initial_state();
  auto rules2 = reasoner2.applicable_rules(s2);
  REQUIRE(has_tag(rules2, RuleTag::MNeq));
  auto children2 = reasoner2.apply_rule(s2, first_of(rules2, RuleTag::MNeq));
  REQUIRE(children2.size() == 1);
  CHECK(children2[0].graph.node_count() == s2.graph.node_count() + 1);  // fresh witness node
}

TEST_CASE("fixture verdicts") {
  CHECK(check_consistency(testutil::load_fixture("fig3.alcqm")).consistent);
  CHECK(check_consistency(testutil::load_fixture("fig5.alcqm")).consistent);
  CHECK(check_consistency(testutil::load_fixture("empty.alcqm")).consistent);
  CHECK(check_consistency(testutil::load_fixture("example3_no_mbox.alcqm")).consistent);
  CHECK(!check_consistency(testutil::load_fixture("example1.alcqm")).consistent);
  CHECK(!check_consistency(testutil::load_fixture("example2.alcqm")).consistent);
  CHECK(!check_consistency(testutil::load_fixture("example3.alcqm")).consistent);
  CHECK(!check_consistency(testutil::load_fixture("def7_cycle.alcqm")).consistent);
}

TEST_CASE("close-rule saturation on complete clash-free states") {
  for (const char* name : {"fig3.alcqm", "fig5.alcqm"}) {
    Ontology o = testutil::load_fixture(name);
    Reasoner reasoner(o);
    Verdict v = reasoner.check();
    REQUIRE(v.consistent);
    const auto& g = v.state->graph;
    const auto& mbox = reasoner.mbox();
    for (std::size_t i = 0; i < mbox.size(); ++i) {
      for (std::size_t j = i + 1; j < mbox.size(); ++j) {
        bool equal = g.same_class(mbox[i].node, mbox[j].node);
        bool differ = g.are_different(mbox[i].node, mbox[j].node);
        CHECK(equal != differ);
      }
    }
  }
}

TEST_CASE("equality transfer closes example 2 through the disjointness") {
  EngineOptions opts;
  opts.explain_all = true;
  Verdict v = check_consistency(testutil::load_fixture("example2.alcqm"), opts);
  REQUIRE(!v.consistent);
  bool found = false;
  for (const auto& c : v.closures) {
    if (c.kind == ClosureInfo::Kind::Clash && c.clash_kind == Clash::Kind::AtomPair &&
        (c.clash_atom == "River" || c.clash_atom == "Lake"))
      found = true;
  }
  CHECK(found);
}

TEST_CASE("verdicts are deterministic and strategy independent") {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    Ontology o = random_ontology(seed);
    Verdict a = check_consistency(o);
    Verdict b = check_consistency(o);
    CHECK(a.consistent == b.consistent);
    CHECK(a.steps == b.steps);
    if (!a.consistent) {
      REQUIRE(!a.closures.empty());
      CHECK(a.closures.front().description == b.closures.front().description);
    }
    EngineOptions fair;
    fair.prioritized = false;
    CHECK(check_consistency(o, fair).consistent == a.consistent);
    EngineOptions nojump;
    nojump.backjump = false;
    CHECK(check_consistency(o, nojump).consistent == a.consistent);
  }
}

TEST_CASE("parallel branch exploration agrees with sequential") {
  EngineOptions par;
  par.jobs = 4;
  for (const char* name :
       {"fig3.alcqm", "fig5.alcqm", "example1.alcqm", "example2.alcqm", "example3.alcqm"}) {
    Ontology o = testutil::load_fixture(name);
    CHECK(check_consistency(o, par).consistent == check_consistency(o).consistent);
  }
  for (std::uint64_t seed = 200; seed < 260; ++seed) {
    Ontology o = random_ontology(seed);
    CHECK(check_consistency(o, par).consistent == check_consistency(o).consistent);
  }
}

TEST_CASE("the step cap aborts instead of deciding") {
  EngineOptions opts;
  opts.step_cap = 3;
  CHECK_THROWS_AS((void)check_consistency(testutil::load_fixture("fig3.alcqm"), opts),
                  StepCapExceeded);
}

TEST_CASE("random_ontology is valid and deterministic in the seed") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Ontology o = random_ontology(seed);
    CHECK(validate_ontology(o).empty());
  }
  CHECK(serialize(random_ontology(42)) == serialize(random_ontology(42)));
  CHECK(serialize(random_ontology(1)) != serialize(random_ontology(2)));
}

TEST_CASE("random_ontology golden output for seed 0") {
  // frozen at first generation; guards against accidental generator drift
  CHECK(serialize(random_ontology(0)) ==
        "TBOX\n"
        "ALL r1.(ATLEAST 2 r0.C0) SUBCLASSOF C2 AND BOTTOM\n"
        "SOME r1.(NOT TOP) SUBCLASSOF NOT (C1 AND BOTTOM)\n"
        "ABOX\n"
        "r0(a0, a2)\n"
        "r1(a0, a1)\n"
        "r1(a2, a0)\n"
        "r1(a2, a2)\n"
        "MBOX\n"
        "a0 =m C1\n"
        "a0 =m C2\n");
}
