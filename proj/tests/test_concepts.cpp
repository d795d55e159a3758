#include <doctest.h>

#include <algorithm>
#include <random>

#include "alcqm/concepts.hpp"
#include "alcqm/model.hpp"
#include "alcqm/ontology.hpp"
#include "alcqm/parser.hpp"
#include "test_util.hpp"

using namespace alcqm;

namespace {

// small random expressions over up to 3 atoms and 2 roles
ConceptId random_expr(ConceptPool& p, std::mt19937_64& rng, int depth) {
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  if (depth <= 1) {
    switch (pick(5)) {
      case 0:
        return p.top();
      case 1:
        return p.bottom();
      default:
        return p.atomic("A" + std::to_string(pick(3)));
    }
  }
  switch (pick(9)) {
    case 0:
      return p.atomic("A" + std::to_string(pick(3)));
    case 1:
      return p.negation(random_expr(p, rng, depth - 1));
    case 2:
      return p.conj(random_expr(p, rng, depth - 1), random_expr(p, rng, depth - 1));
    case 3:
      return p.disj(random_expr(p, rng, depth - 1), random_expr(p, rng, depth - 1));
    case 4:
      return p.forall(p.role("r" + std::to_string(pick(2))), random_expr(p, rng, depth - 1));
    case 5:
      return p.exists(p.role("r" + std::to_string(pick(2))), random_expr(p, rng, depth - 1));
    case 6:
      return p.at_least(static_cast<std::uint32_t>(pick(3)),
                        p.role("r" + std::to_string(pick(2))), random_expr(p, rng, depth - 1));
    case 7:
      return p.at_most(static_cast<std::uint32_t>(pick(3)),
                       p.role("r" + std::to_string(pick(2))), random_expr(p, rng, depth - 1));
    default:
      return p.top();
  }
}

// random interpretation over k atoms covering every name the generator uses
Interpretation random_interpretation(std::mt19937_64& rng, int k) {
  Interpretation i;
  i.sets = std::make_shared<NestedSetPool>();
  for (int e = 0; e < k; ++e) i.domain.insert(i.sets->atom("e" + std::to_string(e)));
  std::vector<SetId> elems(i.domain.begin(), i.domain.end());
  for (int c = 0; c < 3; ++c) {
    auto& ext = i.concepts["A" + std::to_string(c)];
    for (SetId e : elems)
      if (rng() % 2) ext.insert(e);
  }
  for (int r = 0; r < 2; ++r) {
    auto& pairs = i.roles["r" + std::to_string(r)];
    for (SetId a : elems)
      for (SetId b : elems)
        if (rng() % 2) pairs.emplace(a, b);
  }
  return i;
}

}  // namespace

TEST_CASE("nnf pushes negation to atoms") {
  ConceptPool p;
  ConceptId c = p.atomic("C"), d = p.atomic("D"), a = p.atomic("A");
  RoleId r = p.role("R");

  CHECK(p.nnf(p.negation(p.conj(c, d))) == p.disj(p.negation(c), p.negation(d)));
  CHECK(p.nnf(a) == a);
  CHECK(p.nnf(p.negation(p.at_most(1, r, a))) == p.at_least(2, r, a));
  CHECK(p.nnf(p.negation(p.at_least(1, r, a))) == p.at_most(0, r, a));
  CHECK(p.nnf(p.negation(p.at_least(0, r, a))) == p.bottom());
  CHECK(p.nnf(p.negation(p.top())) == p.bottom());
  CHECK(p.nnf(p.negation(p.bottom())) == p.top());
}

TEST_CASE("negate duals") {
  ConceptPool p;
  ConceptId a = p.atomic("A");
  RoleId r = p.role("R");
  CHECK(p.negate(a) == p.negation(a));
  CHECK(p.negate(p.negation(a)) == a);
  CHECK(p.negate(p.exists(r, a)) == p.forall(r, p.negation(a)));
}

TEST_CASE("internalize_tbox keeps the literal disjunction") {
  auto parsed = parse("TBOX\nRiver AND Lake SUBCLASSOF BOTTOM\nABOX\nMBOX\n");
  REQUIRE(parsed.ok());
  Ontology o = *parsed.ontology;
  auto t = internalize_tbox(o);
  REQUIRE(t.size() == 1);
  // NOT (River AND Lake) OR BOTTOM, normalized but not simplified
  auto& p = *o.pool;
  ConceptId expected =
      p.disj(p.disj(p.negation(p.atomic("River")), p.negation(p.atomic("Lake"))), p.bottom());
  CHECK(t[0] == expected);
  CHECK(p.text(t[0]) == "((NOT River) OR (NOT Lake)) OR BOTTOM");
  // the optional cleanup pass would drop the BOTTOM
  CHECK(p.text(p.simplify(t[0])) == "(NOT River) OR (NOT Lake)");
}

TEST_CASE("internalize_tbox trivial cases") {
  Ontology o;
  o.pool = std::make_shared<ConceptPool>();
  CHECK(internalize_tbox(o).empty());
  ConceptId a = o.pool->atomic("A");
  o.tbox.push_back({a, a});
  auto t = internalize_tbox(o);
  REQUIRE(t.size() == 1);
  CHECK(t[0] == o.pool->disj(o.pool->negation(a), a));
}

TEST_CASE("concepts_of_mbox enumerates ordered pairs") {
  Ontology o;
  o.pool = std::make_shared<ConceptPool>();
  auto& p = *o.pool;

  SUBCASE("empty") { CHECK(concepts_of_mbox(o).empty()); }

  SUBCASE("single axiom self-pair") {
    o.mbox.push_back({"a", "A"});
    auto cs = concepts_of_mbox(o);
    ConceptId a = p.atomic("A");
    ConceptId tautology = p.disj(a, p.negation(a));
    ConceptId diff = p.disj(p.conj(a, p.negation(a)), p.conj(a, p.negation(a)));
    REQUIRE(cs.size() == 2);
    CHECK(std::count(cs.begin(), cs.end(), tautology) == 1);
    CHECK(std::count(cs.begin(), cs.end(), diff) == 1);
  }

  SUBCASE("two axioms") {
    o.mbox.push_back({"river", "River"});
    o.mbox.push_back({"lake", "Lake"});
    auto cs = concepts_of_mbox(o);
    ConceptId river = p.atomic("River"), lake = p.atomic("Lake");
    CHECK(std::count(cs.begin(), cs.end(), p.disj(river, p.negation(lake))) == 1);
    CHECK(std::count(cs.begin(), cs.end(), p.disj(lake, p.negation(river))) == 1);
    ConceptId diff = p.disj(p.conj(river, p.negation(lake)), p.conj(lake, p.negation(river)));
    CHECK(std::count(cs.begin(), cs.end(), diff) == 1);
    CHECK(cs.size() <= 3 * o.mbox.size() * o.mbox.size());
  }
}

TEST_CASE("concepts_of_mbox size bound") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Ontology o;
    o.pool = std::make_shared<ConceptPool>();
    int n = static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i)
      o.mbox.push_back({"a" + std::to_string(rng() % 3), "A" + std::to_string(rng() % 3)});
    CHECK(concepts_of_mbox(o).size() <= 3 * o.mbox.size() * o.mbox.size());
  }
}

TEST_CASE("validate_ontology flags sort clashes") {
  CHECK(validate_ontology(testutil::load_fixture("fig3.alcqm")).empty());

  Ontology o;
  o.pool = std::make_shared<ConceptPool>();
  // "river" used both as concept and individual
  o.abox.push_back({ABoxAssertion::Kind::Concept, o.pool->atomic("river"), 0, "river", ""});
  auto diags = validate_ontology(o);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("river") != std::string::npos);
}

TEST_CASE("nnf properties over random expressions") {
  std::mt19937_64 rng(11);
  ConceptPool p;
  for (int trial = 0; trial < 300; ++trial) {
    ConceptId c = random_expr(p, rng, 4);
    ConceptId n = p.nnf(c);
    CHECK(p.is_nnf(n));
    CHECK(p.nnf(n) == n);                      // idempotent
    CHECK(p.negate(p.negate(c)) == p.nnf(c));  // double negation
  }
}

TEST_CASE("nnf preserves extensions in every small interpretation") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 120; ++trial) {
    Ontology o;
    o.pool = std::make_shared<ConceptPool>();
    ConceptId c = random_expr(*o.pool, rng, 4);
    ConceptId n = o.pool->nnf(c);
    ConceptId simplified = o.pool->simplify(c);
    for (int k = 1; k <= 3; ++k) {
      Interpretation i = random_interpretation(rng, k);
      auto lhs = concept_extension(i, o, c);
      CHECK(lhs == concept_extension(i, o, n));
      CHECK(lhs == concept_extension(i, o, simplified));
    }
  }
}
