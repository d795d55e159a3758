#include "alcqm/inference.hpp"

#include <algorithm>
#include <set>

namespace alcqm {

namespace {

const char* kFreshA = "__fresh_0";

void require_individual(const Ontology& o, const std::string& name) {
  Signature sig = o.signature();
  if (!sig.individuals.count(name))
    throw std::invalid_argument("unknown individual '" + name + "'");
}

void require_concept_name(const Ontology& o, const std::string& name) {
  Signature sig = o.signature();
  if (!sig.concepts.count(name))
    throw std::invalid_argument("unknown concept name '" + name + "'");
}

bool inconsistent(const Ontology& o, const EngineOptions& opts) {
  EngineOptions local = opts;
  local.trace = nullptr;  // reductions never trace
  return !check_consistency(o, local).consistent;
}

}  // namespace

bool entails_meta(const Ontology& o, const std::string& individual,
                  const std::string& concept_name, const EngineOptions& opts) {
  require_individual(o, individual);
  require_concept_name(o, concept_name);
  Ontology ext = o;
  ext.abox.push_back({ABoxAssertion::Kind::Different, 0, 0, individual, kFreshA});
  ext.mbox.push_back({kFreshA, concept_name});
  return inconsistent(ext, opts);
}

bool entails_instance(const Ontology& o, ConceptId c, const std::string& individual,
                      const EngineOptions& opts) {
  require_individual(o, individual);
  Ontology ext = o;
  ext.abox.push_back({ABoxAssertion::Kind::Concept, o.pool->negate(c), 0, individual, ""});
  return inconsistent(ext, opts);
}

bool entails_subsumption(const Ontology& o, ConceptId c, ConceptId d, const EngineOptions& opts) {
  Ontology ext = o;
  ext.abox.push_back(
      {ABoxAssertion::Kind::Concept, o.pool->conj(c, o.pool->negate(d)), 0, kFreshA, ""});
  return inconsistent(ext, opts);
}

MetaConceptResult is_meta_concept(const Ontology& o, ConceptId c, const EngineOptions& opts) {
  std::vector<std::string> mbox_concepts;
  std::set<std::string> seen;
  for (const auto& m : o.mbox) {
    if (seen.insert(m.concept_name).second) mbox_concepts.push_back(m.concept_name);
  }
  for (const auto& a : o.individuals_in_order()) {
    if (!entails_instance(o, c, a, opts)) continue;
    for (const auto& name : mbox_concepts) {
      if (entails_meta(o, a, name, opts)) return {true, std::make_pair(a, name)};
    }
  }
  return {false, std::nullopt};
}

HierarchyLevels meta_hierarchy(const Ontology& o, const EngineOptions& opts) {
  if (!check_consistency(o, opts).consistent) throw InconsistentOntology();

  Signature sig = o.signature();
  std::vector<std::string> concepts(sig.concepts.begin(), sig.concepts.end());
  std::vector<std::string> individuals = o.individuals_in_order();

  std::vector<std::string> mbox_concepts;
  std::set<std::string> seen;
  for (const auto& m : o.mbox) {
    if (seen.insert(m.concept_name).second) mbox_concepts.push_back(m.concept_name);
  }

  // facts asserted outright are entailed for free once o is known consistent
  std::set<std::pair<std::string, std::string>> asserted_meta;
  for (const auto& m : o.mbox) asserted_meta.emplace(m.individual, m.concept_name);
  std::set<std::pair<std::string, std::string>> asserted_instance;  // (concept, individual)
  for (const auto& as : o.abox) {
    if (as.kind != ABoxAssertion::Kind::Concept) continue;
    const auto& n = o.pool->node(as.expr);
    if (n.kind == ConceptKind::Atomic) asserted_instance.emplace(n.name, as.a);
  }

  // which individuals correspond to which MBox concepts
  std::map<std::string, std::vector<std::string>> meta_of;  // individual -> concepts
  for (const auto& a : individuals) {
    for (const auto& b : mbox_concepts) {
      if (asserted_meta.count({a, b}) || entails_meta(o, a, b, opts)) meta_of[a].push_back(b);
    }
  }
  // which concepts may climb a level through which targets
  std::map<std::string, std::set<std::string>> lifts;  // concept -> target concepts
  for (const auto& name : concepts) {
    ConceptId atom = o.pool->atomic(name);
    for (const auto& a : individuals) {
      auto it = meta_of.find(a);
      if (it == meta_of.end() || it->second.empty()) continue;
      if (!asserted_instance.count({name, a}) && !entails_instance(o, atom, a, opts)) continue;
      lifts[name].insert(it->second.begin(), it->second.end());
    }
  }

  HierarchyLevels out;
  for (const auto& name : concepts) out.levels[name] = 0;
  for (std::size_t round = 0; round <= o.mbox.size(); ++round) {
    bool changed = false;
    for (const auto& name : concepts) {
      int level = 0;
      auto it = lifts.find(name);
      if (it != lifts.end()) {
        for (const auto& target : it->second) level = std::max(level, out.levels[target] + 1);
      }
      if (level > out.levels[name]) {
        out.levels[name] = level;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return out;
}

}  // namespace alcqm
