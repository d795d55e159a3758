#ifndef ALCQM_MODEL_HPP_
#define ALCQM_MODEL_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alcqm/nested_set.hpp"
#include "alcqm/ontology.hpp"
#include "alcqm/tableau.hpp"

namespace alcqm {

// A finite interpretation over nested-set values. The level is the least N
// such that the domain sits inside stage N of the powerset hierarchy;
// well-foundedness holds by construction of NestedSetPool values.
struct Interpretation {
  NestedSetPoolPtr sets;
  std::set<SetId> domain;
  std::map<std::string, SetId> individuals;
  std::map<std::string, std::set<SetId>> concepts;
  std::map<std::string, std::set<std::pair<SetId, SetId>>> roles;

  int level() const;
};

// Atomic-level interpretation read directly off a complete, clash-free
// tableau graph. Domain: canonical nodes that are not indirectly blocked;
// a directly blocked node borrows the out-edges of its (unblocked) blocker.
struct AtomicInterpretation {
  std::vector<NodeHandle> domain;
  std::map<std::string, NodeHandle> individuals;
  std::map<std::string, std::set<NodeHandle>> concepts;
  std::map<std::string, std::set<std::pair<NodeHandle, NodeHandle>>> roles;
};

AtomicInterpretation canonical_interpretation(const TableauGraph& g, const Ontology& o);

// y precedes x when y belongs to the extension of A, x is equivalent to a,
// and a =m A is an MBox axiom. Acyclic whenever the graph is cycle-free.
struct PrecEdge {
  NodeHandle y;
  NodeHandle x;
};
std::vector<PrecEdge> prec_relation(const TableauGraph& g, const Ontology& o);
// Empty result: well-founded. Otherwise one witness cycle of nodes.
std::optional<std::vector<NodeHandle>> prec_cycle(const std::vector<PrecEdge>& edges);

// Recursive collapse of a node to its set value: meta-modelled nodes become
// the set of their concept members' values, everything else an atom.
// Total because the precedence relation is well-founded; injective on the
// domain of a complete, clash- and cycle-free graph.
class SetOfBuilder {
 public:
  SetOfBuilder(const TableauGraph& g, const Ontology& o, NestedSetPoolPtr sets);
  SetId set_of(NodeHandle x);

 private:
  const TableauGraph& g_;
  const Ontology& o_;
  NestedSetPoolPtr sets_;
  AtomicInterpretation atomic_;
  std::map<NodeHandle, std::optional<SetId>> memo_;  // nullopt marks in-progress
};

// Full model extraction; asserts injectivity of set_of and the MBox
// equalities, and computes the level. Throws InternalError-style
// std::logic_error when an assertion fails (bug signal).
Interpretation build_model(const TableauGraph& g, const Ontology& o);

struct ModelViolation {
  std::string axiom;
  std::string detail;
};

// Semantic check of every TBox inclusion, ABox assertion and MBox equality
// against the interpretation. Empty result: the interpretation is a model.
std::vector<ModelViolation> check_model(const Interpretation& i, const Ontology& o);

// Extension of one concept expression under the interpretation.
std::set<SetId> concept_extension(const Interpretation& i, const Ontology& o, ConceptId c);

// Text form:
//   <individual> := <set-literal>
//   <Concept> := {<set-literal>, ...}
//   <role> := {(<set-literal>, <set-literal>), ...}
//   LEVEL <n>
// Lines sorted by kind (individuals, concepts, roles) then name. The domain
// is implied: individual values, concept members and role endpoints.
std::string serialize_model(const Interpretation& i, const Ontology& o);

struct ModelParseResult {
  std::optional<Interpretation> interpretation;
  std::vector<Diagnostic> errors;
};
ModelParseResult parse_model(const std::string& text, const Ontology& o);

}  // namespace alcqm

#endif  // ALCQM_MODEL_HPP_
