#ifndef ALCQM_ONTOLOGY_HPP_
#define ALCQM_ONTOLOGY_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alcqm/concepts.hpp"

namespace alcqm {

struct SourceSpan {
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  int length = 0;
  bool operator==(const SourceSpan&) const = default;
};

struct Diagnostic {
  std::string message;
  std::string location;  // section/index for programmatic checks
  std::optional<SourceSpan> span;
};

struct TBoxAxiom {
  ConceptId lhs;
  ConceptId rhs;
};

struct ABoxAssertion {
  enum class Kind { Concept, Role, Equal, Different };
  Kind kind;
  ConceptId expr = 0;  // Concept
  RoleId role = 0;     // Role
  std::string a;       // subject individual
  std::string b;       // object individual (Role/Equal/Different)
};

struct MBoxAxiom {
  std::string individual;
  std::string concept_name;  // always an atomic concept name
};

struct Signature {
  std::set<std::string> concepts;
  std::set<std::string> roles;
  std::set<std::string> individuals;
};

// O = (TBox, ABox, MBox). Axioms are kept in input order; set-like
// comparisons and serialization normalize.
struct Ontology {
  ConceptPoolPtr pool;
  std::vector<TBoxAxiom> tbox;
  std::vector<ABoxAssertion> abox;
  std::vector<MBoxAxiom> mbox;

  Signature signature() const;
  // Individuals of the ABox and MBox, in first-occurrence order.
  std::vector<std::string> individuals_in_order() const;
};

// Each inclusion C SUBCLASSOF D becomes nnf(NOT C OR D); the result is the
// working TBox-as-concept-set the tbox rule feeds from. Deduplicated,
// deterministic order.
std::vector<ConceptId> internalize_tbox(const Ontology& o);

// For every ordered pair of MBox axioms a=mA, b=mB (pairs with a==b
// included) the three transfer concepts {A AND NOT B OR B AND NOT A,
// A OR NOT B, B OR NOT A}. This is the exact set the meta rules may add to
// the working TBox, so it bounds the TBox growth at runtime.
std::vector<ConceptId> concepts_of_mbox(const Ontology& o);

// Structural well-formedness: identifier sorts (concept/role/individual)
// must be pairwise disjoint. Empty result means valid.
std::vector<Diagnostic> validate_ontology(const Ontology& o);

// Structural equality up to axiom order and duplicates.
bool same_ontology(const Ontology& a, const Ontology& b);

}  // namespace alcqm

#endif  // ALCQM_ONTOLOGY_HPP_
