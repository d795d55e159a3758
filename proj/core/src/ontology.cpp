#include "alcqm/ontology.hpp"

#include <algorithm>
#include <map>

namespace alcqm {

Signature Ontology::signature() const {
  Signature sig;
  for (const auto& ax : tbox) {
    pool->collect_atomics(ax.lhs, sig.concepts);
    pool->collect_atomics(ax.rhs, sig.concepts);
    std::set<RoleId> rs;
    pool->collect_roles(ax.lhs, rs);
    pool->collect_roles(ax.rhs, rs);
    for (RoleId r : rs) sig.roles.insert(pool->role_name(r));
  }
  for (const auto& as : abox) {
    switch (as.kind) {
      case ABoxAssertion::Kind::Concept: {
        pool->collect_atomics(as.expr, sig.concepts);
        std::set<RoleId> rs;
        pool->collect_roles(as.expr, rs);
        for (RoleId r : rs) sig.roles.insert(pool->role_name(r));
        sig.individuals.insert(as.a);
        break;
      }
      case ABoxAssertion::Kind::Role:
        sig.roles.insert(pool->role_name(as.role));
        sig.individuals.insert(as.a);
        sig.individuals.insert(as.b);
        break;
      case ABoxAssertion::Kind::Equal:
      case ABoxAssertion::Kind::Different:
        sig.individuals.insert(as.a);
        sig.individuals.insert(as.b);
        break;
    }
  }
  for (const auto& m : mbox) {
    sig.individuals.insert(m.individual);
    sig.concepts.insert(m.concept_name);
  }
  return sig;
}

std::vector<std::string> Ontology::individuals_in_order() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto add = [&](const std::string& n) {
    if (seen.insert(n).second) out.push_back(n);
  };
  for (const auto& as : abox) {
    switch (as.kind) {
      case ABoxAssertion::Kind::Concept:
        add(as.a);
        break;
      default:
        add(as.a);
        add(as.b);
        break;
    }
  }
  for (const auto& m : mbox) add(m.individual);
  return out;
}

std::vector<ConceptId> internalize_tbox(const Ontology& o) {
  std::vector<ConceptId> out;
  std::set<ConceptId> seen;
  for (const auto& ax : o.tbox) {
    ConceptId c = o.pool->nnf(o.pool->disj(o.pool->negation(ax.lhs), ax.rhs));
    if (seen.insert(c).second) out.push_back(c);
  }
  return out;
}

std::vector<ConceptId> concepts_of_mbox(const Ontology& o) {
  auto& p = *o.pool;
  std::vector<ConceptId> out;
  std::set<ConceptId> seen;
  auto add = [&](ConceptId c) {
    if (seen.insert(c).second) out.push_back(c);
  };
  for (const auto& m1 : o.mbox) {
    for (const auto& m2 : o.mbox) {
      ConceptId a = p.atomic(m1.concept_name);
      ConceptId b = p.atomic(m2.concept_name);
      ConceptId na = p.negation(a);
      ConceptId nb = p.negation(b);
      add(p.disj(p.conj(a, nb), p.conj(b, na)));
      add(p.disj(a, nb));
      add(p.disj(b, na));
    }
  }
  return out;
}

std::vector<Diagnostic> validate_ontology(const Ontology& o) {
  std::vector<Diagnostic> diags;
  enum Sort { kConcept = 1, kRole = 2, kIndividual = 4 };
  std::map<std::string, int> sorts;
  std::map<std::string, std::string> first_loc;

  auto use = [&](const std::string& name, Sort s, const std::string& loc) {
    int& mask = sorts[name];
    if (mask == 0) first_loc[name] = loc;
    if (mask != 0 && !(mask & s)) {
      diags.push_back({"name '" + name + "' used in more than one sort (first seen at " +
                           first_loc[name] + ")",
                       loc, std::nullopt});
    }
    mask |= s;
  };

  auto use_concept_expr = [&](ConceptId c, const std::string& loc) {
    std::set<std::string> atoms;
    o.pool->collect_atomics(c, atoms);
    for (const auto& a : atoms) use(a, kConcept, loc);
    std::set<RoleId> rs;
    o.pool->collect_roles(c, rs);
    for (RoleId r : rs) use(o.pool->role_name(r), kRole, loc);
  };

  for (std::size_t i = 0; i < o.tbox.size(); ++i) {
    std::string loc = "tbox[" + std::to_string(i) + "]";
    use_concept_expr(o.tbox[i].lhs, loc);
    use_concept_expr(o.tbox[i].rhs, loc);
  }
  for (std::size_t i = 0; i < o.abox.size(); ++i) {
    std::string loc = "abox[" + std::to_string(i) + "]";
    const auto& as = o.abox[i];
    switch (as.kind) {
      case ABoxAssertion::Kind::Concept:
        use_concept_expr(as.expr, loc);
        use(as.a, kIndividual, loc);
        break;
      case ABoxAssertion::Kind::Role:
        use(o.pool->role_name(as.role), kRole, loc);
        use(as.a, kIndividual, loc);
        use(as.b, kIndividual, loc);
        break;
      default:
        use(as.a, kIndividual, loc);
        use(as.b, kIndividual, loc);
        break;
    }
  }
  for (std::size_t i = 0; i < o.mbox.size(); ++i) {
    std::string loc = "mbox[" + std::to_string(i) + "]";
    use(o.mbox[i].individual, kIndividual, loc);
    use(o.mbox[i].concept_name, kConcept, loc);
  }
  return diags;
}

namespace {

std::vector<std::string> axiom_keys(const Ontology& o) {
  std::vector<std::string> keys;
  for (const auto& ax : o.tbox)
    keys.push_back("T " + o.pool->text(ax.lhs) + " <= " + o.pool->text(ax.rhs));
  for (const auto& as : o.abox) {
    switch (as.kind) {
      case ABoxAssertion::Kind::Concept:
        keys.push_back("A " + o.pool->text(as.expr) + "(" + as.a + ")");
        break;
      case ABoxAssertion::Kind::Role:
        keys.push_back("A " + o.pool->role_name(as.role) + "(" + as.a + "," + as.b + ")");
        break;
      case ABoxAssertion::Kind::Equal:
        keys.push_back("A " + as.a + " = " + as.b);
        break;
      case ABoxAssertion::Kind::Different:
        keys.push_back("A " + as.a + " != " + as.b);
        break;
    }
  }
  for (const auto& m : o.mbox) keys.push_back("M " + m.individual + " =m " + m.concept_name);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

}  // namespace

bool same_ontology(const Ontology& a, const Ontology& b) { return axiom_keys(a) == axiom_keys(b); }

}  // namespace alcqm
