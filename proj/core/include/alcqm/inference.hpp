#ifndef ALCQM_INFERENCE_HPP_
#define ALCQM_INFERENCE_HPP_

#include <map>
#include <optional>
#include <string>

#include "alcqm/engine.hpp"
#include "alcqm/ontology.hpp"

namespace alcqm {

// Reasoning services reduced to consistency. Reductions introduce fresh
// individuals in the parser-reserved "__fresh_" namespace, so they can never
// capture ontology names.

// o entails a =m A iff adding { a != b, b =m A } for a fresh b is
// inconsistent.
bool entails_meta(const Ontology& o, const std::string& individual,
                  const std::string& concept_name, const EngineOptions& opts = {});

// o entails C(a) iff o + (NOT C)(a) is inconsistent.
bool entails_instance(const Ontology& o, ConceptId c, const std::string& individual,
                      const EngineOptions& opts = {});

// o entails C SUBCLASSOF D iff o + (C AND NOT D)(x0) is inconsistent for a
// fresh x0.
bool entails_subsumption(const Ontology& o, ConceptId c, ConceptId d,
                         const EngineOptions& opts = {});

struct MetaConceptResult {
  bool is_meta = false;
  // first witness in enumeration order: (individual, MBox concept name)
  std::optional<std::pair<std::string, std::string>> witness;
};

// C is a meta-concept iff some named individual is entailed to be in C and
// is itself entailed to correspond to a concept through meta-modelling.
// Individuals range over the ontology's named individuals, candidate
// concepts over the MBox concept names.
MetaConceptResult is_meta_concept(const Ontology& o, ConceptId c, const EngineOptions& opts = {});

struct InconsistentOntology : std::runtime_error {
  InconsistentOntology() : std::runtime_error("ontology is inconsistent") {}
};

struct HierarchyLevels {
  std::map<std::string, int> levels;  // concept name -> meta-modelling level
};

// Level 0: not a meta-concept. Level k+1: some entailed member corresponds
// through meta-modelling to a concept of level >= k. Fixpoint bounded by the
// MBox size. Throws InconsistentOntology when o has no model.
HierarchyLevels meta_hierarchy(const Ontology& o, const EngineOptions& opts = {});

}  // namespace alcqm

#endif  // ALCQM_INFERENCE_HPP_
