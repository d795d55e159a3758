#ifndef ALCQM_RANDOM_ONTOLOGY_HPP_
#define ALCQM_RANDOM_ONTOLOGY_HPP_

#include <cstdint>

#include "alcqm/ontology.hpp"

namespace alcqm {

// Size envelope for generated ontologies. The defaults keep everything at
// desk scale so the brute-force model search stays applicable.
struct GeneratorBounds {
  int max_individuals = 4;
  int max_concepts = 4;
  int max_roles = 2;
  int max_depth = 3;  // concept expression depth
  std::uint32_t max_number = 2;
  int max_mbox = 3;
  int max_tbox = 3;
  int max_abox = 6;
};

// Deterministic in (seed, bounds); always passes validate_ontology.
Ontology random_ontology(std::uint64_t seed, const GeneratorBounds& bounds = {});

}  // namespace alcqm

#endif  // ALCQM_RANDOM_ONTOLOGY_HPP_
