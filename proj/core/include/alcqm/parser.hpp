#ifndef ALCQM_PARSER_HPP_
#define ALCQM_PARSER_HPP_

#include <optional>
#include <string>
#include <vector>

#include "alcqm/ontology.hpp"

namespace alcqm {

// Textual .alcqm format. Three mandatory sections, in order:
//
//   TBOX
//   River AND Lake SUBCLASSOF BOTTOM
//   FUNCTIONAL associatedWith          # sugar for TOP SUBCLASSOF ATMOST 1 r.TOP
//   ABOX
//   River(queguay)
//   associatedWith(wetland, lake)
//   queguay != deRocha
//   MBOX
//   river =m River
//
// Concept grammar: NAME | TOP | BOTTOM | NOT C | C AND C | C OR C
//   | ALL r.C | SOME r.C | ATLEAST n r.C | ATMOST n r.C | (C)
// Precedence NOT > AND > OR; a quantifier's dot-argument extends as far
// right as possible. '#' starts a comment. Identifier sorts are inferred
// from position and may not overlap. Names starting with "__" are reserved.

struct ParseOptions {
  std::uint32_t max_number = 64;  // cap for n in ATLEAST/ATMOST
};

struct ParseResult {
  std::optional<Ontology> ontology;
  std::vector<Diagnostic> errors;
  bool ok() const { return ontology.has_value() && errors.empty(); }
};

ParseResult parse(const std::string& text, const ParseOptions& opts = {});

// Parses a single concept expression against an existing ontology's
// signature; every name must already occur in the ontology with the
// matching sort.
struct ConceptParseResult {
  std::optional<ConceptId> expr;
  std::vector<Diagnostic> errors;
};
ConceptParseResult parse_concept(const std::string& text, const Ontology& o,
                                 const ParseOptions& opts = {});

// Deterministic rendering: within each section, axiom lines are emitted in
// lexicographic order, duplicates removed, LF line endings.
// parse(serialize(o)) equals o up to axiom order and duplicates.
std::string serialize(const Ontology& o);

}  // namespace alcqm

#endif  // ALCQM_PARSER_HPP_
