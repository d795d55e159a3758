#include <doctest.h>

#include "alcqm/parser.hpp"
#include "alcqm/random_ontology.hpp"
#include "test_util.hpp"

using namespace alcqm;

TEST_CASE("parse the minimal three-axiom file") {
  auto r = parse(
      "TBOX\nRiver AND Lake SUBCLASSOF BOTTOM\nABOX\nRiver(queguay)\nMBOX\nriver =m River\n");
  REQUIRE(r.ok());
  CHECK(r.ontology->tbox.size() == 1);
  CHECK(r.ontology->abox.size() == 1);
  CHECK(r.ontology->mbox.size() == 1);
  CHECK(r.ontology->mbox[0].individual == "river");
  CHECK(r.ontology->mbox[0].concept_name == "River");
}

TEST_CASE("empty sections parse to an empty ontology") {
  auto r = parse("TBOX\nABOX\nMBOX");
  REQUIRE(r.ok());
  CHECK(r.ontology->tbox.empty());
  CHECK(r.ontology->abox.empty());
  CHECK(r.ontology->mbox.empty());
}

TEST_CASE("non-atomic meta-modelling target is rejected") {
  auto r = parse("TBOX\nABOX\nMBOX\na =m (A AND B)\n");
  CHECK(!r.ok());
  REQUIRE(!r.errors.empty());
  CHECK(r.errors[0].span.has_value());
  CHECK(r.errors[0].span->line == 4);
}

TEST_CASE("sort clashes are positioned errors") {
  auto r = parse("TBOX\nABOX\nriver(river)\nMBOX\n");
  CHECK(!r.ok());
  REQUIRE(!r.errors.empty());
  CHECK(r.errors[0].span.has_value());
}

TEST_CASE("reserved namespace is rejected") {
  auto r = parse("TBOX\nABOX\nA(__fresh_0)\nMBOX\n");
  CHECK(!r.ok());
}

TEST_CASE("oversized number restrictions are parse errors") {
  auto r = parse("TBOX\nA SUBCLASSOF ATMOST 65 r.TOP\nABOX\nMBOX\n");
  CHECK(!r.ok());
  REQUIRE(!r.errors.empty());
  CHECK(r.errors[0].message.find("maximum") != std::string::npos);
}

TEST_CASE("unknown tokens carry spans inside the input") {
  auto r = parse("TBOX\nA ? B\nABOX\nMBOX\n");
  CHECK(!r.ok());
  REQUIRE(!r.errors.empty());
  REQUIRE(r.errors[0].span.has_value());
  CHECK(r.errors[0].span->line == 2);
  CHECK(r.errors[0].span->column >= 1);
  CHECK(r.errors[0].span->column <= 6);
}

TEST_CASE("sections must appear in order") {
  CHECK(!parse("ABOX\nTBOX\nMBOX\n").ok());
  CHECK(!parse("TBOX\nABOX\n").ok());
}

TEST_CASE("precedence and maximal dot-argument") {
  auto r = parse("TBOX\nABOX\nMBOX\n");
  REQUIRE(r.ok());
  Ontology o = *r.ontology;
  auto& p = *o.pool;
  // register names with their sorts first
  ConceptId a = p.atomic("A"), b = p.atomic("B"), c = p.atomic("C");
  o.tbox.push_back({a, a});
  o.abox.push_back({ABoxAssertion::Kind::Role, 0, p.role("r"), "x", "y"});
  o.tbox.push_back({b, c});

  auto expr = [&](const std::string& text) {
    auto pr = parse_concept(text, o);
    REQUIRE(pr.expr.has_value());
    return *pr.expr;
  };
  CHECK(expr("NOT A AND B") == p.conj(p.negation(a), b));
  CHECK(expr("A AND B OR C") == p.disj(p.conj(a, b), c));
  CHECK(expr("A OR B AND C") == p.disj(a, p.conj(b, c)));
  CHECK(expr("ALL r.A OR B") == p.forall(p.role("r"), p.disj(a, b)));
  CHECK(expr("(ALL r.A) OR B") == p.disj(p.forall(p.role("r"), a), b));
  CHECK(expr("NOT ALL r.A") == p.negation(p.forall(p.role("r"), a)));
  CHECK(expr("ATLEAST 2 r.A AND B") == p.at_least(2, p.role("r"), p.conj(a, b)));
}

TEST_CASE("FUNCTIONAL expands to an at-most-one axiom") {
  auto r = parse("TBOX\nFUNCTIONAL worksFor\nABOX\nMBOX\n");
  REQUIRE(r.ok());
  REQUIRE(r.ontology->tbox.size() == 1);
  auto& p = *r.ontology->pool;
  CHECK(r.ontology->tbox[0].lhs == p.top());
  CHECK(r.ontology->tbox[0].rhs == p.at_most(1, p.role("worksFor"), p.top()));
}

TEST_CASE("serialize of the empty ontology") {
  Ontology o;
  o.pool = std::make_shared<ConceptPool>();
  CHECK(serialize(o) == "TBOX\nABOX\nMBOX\n");
}

TEST_CASE("fig3 serializes to all its axioms") {
  Ontology o = testutil::load_fixture("fig3.alcqm");
  std::string text = serialize(o);
  CHECK(text.find("River AND Lake SUBCLASSOF BOTTOM") != std::string::npos);
  CHECK(text.find("HydrographicObject(river)") != std::string::npos);
  CHECK(text.find("Lake(delSauce)") != std::string::npos);
  CHECK(text.find("river =m River") != std::string::npos);
  CHECK(text.find("lake =m Lake") != std::string::npos);
  auto again = parse(text);
  REQUIRE(again.ok());
  CHECK(same_ontology(o, *again.ontology));
}

TEST_CASE("round trip on random ontologies") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Ontology o = random_ontology(seed);
    CHECK(validate_ontology(o).empty());
    std::string text = serialize(o);
    auto r = parse(text);
    REQUIRE(r.ok());
    CHECK(same_ontology(o, *r.ontology));
    CHECK(serialize(*r.ontology) == text);  // canonical text is a fixed point
  }
}

TEST_CASE("compound concept assertions survive the round trip") {
  auto r = parse("TBOX\nABOX\n(NOT A AND SOME r.B)(x)\nTOP(y)\nMBOX\n");
  REQUIRE(r.ok());
  CHECK(r.ontology->abox.size() == 2);
  auto again = parse(serialize(*r.ontology));
  REQUIRE(again.ok());
  CHECK(same_ontology(*r.ontology, *again.ontology));
}
