#ifndef ALCQM_ORACLE_HPP_
#define ALCQM_ORACLE_HPP_

#include <stdexcept>

#include "alcqm/ontology.hpp"

namespace alcqm {

// Applicability envelope for the brute-force model search. The search
// enumerates every interpretation shape up to max_domain elements: maps for
// individuals, concepts and roles are enumerated outright, while the
// nested-set identity of each element is derived from the meta-modelling
// axioms (an element named by a =m A must be exactly the set of A's
// members, everything else is a fresh atom). That derivation covers every
// well-founded model up to isomorphism at a given domain size, so the only
// real bound is max_domain.
struct OracleBounds {
  int max_domain = 4;
  int max_individuals = 6;
  int max_concepts = 4;
  int max_roles = 2;
  int max_mbox = 4;
};

struct OracleRefusal : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// True iff some interpretation within bounds satisfies the ontology
// (validated by check_model before reporting). Independent of the tableau
// machinery. Throws OracleRefusal when the ontology exceeds the bounds.
bool brute_force_consistent(const Ontology& o, const OracleBounds& bounds = {});

}  // namespace alcqm

#endif  // ALCQM_ORACLE_HPP_
