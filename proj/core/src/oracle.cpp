#include "alcqm/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "alcqm/model.hpp"
#include "alcqm/nested_set.hpp"

namespace alcqm {

namespace {

using Tri = int;  // 1 true, 0 false, -1 unknown

class OracleSearch {
 public:
  OracleSearch(const Ontology& o, int m) : o_(o), m_(m) {
    Signature sig = o.signature();
    inds_.assign(sig.individuals.begin(), sig.individuals.end());
    cons_.assign(sig.concepts.begin(), sig.concepts.end());
    for (const auto& r : sig.roles) roles_.push_back(o.pool->role(r));
    for (std::size_t i = 0; i < inds_.size(); ++i) ind_index_[inds_[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < cons_.size(); ++i) con_index_[cons_[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < roles_.size(); ++i) role_index_[roles_[i]] = static_cast<int>(i);
    ind_val_.assign(inds_.size(), -1);
    conc_.assign(cons_.size(), std::vector<Tri>(static_cast<std::size_t>(m), -1));
    succ_.assign(roles_.size(), std::vector<int>(static_cast<std::size_t>(m), -1));
  }

  bool run() {
    if (m_ == 0 && !inds_.empty()) return false;
    if (!consistent_so_far()) return false;
    return assign_individual(0);
  }

 private:
  Tri tri_not(Tri a) const { return a < 0 ? -1 : 1 - a; }
  Tri tri_and(Tri a, Tri b) const {
    if (a == 0 || b == 0) return 0;
    if (a == 1 && b == 1) return 1;
    return -1;
  }
  Tri tri_or(Tri a, Tri b) const { return tri_not(tri_and(tri_not(a), tri_not(b))); }

  Tri eval(ConceptId c, int e) const {
    const auto& n = o_.pool->node(c);
    switch (n.kind) {
      case ConceptKind::Atomic:
        return conc_[static_cast<std::size_t>(con_index_.at(n.name))][static_cast<std::size_t>(e)];
      case ConceptKind::Top:
        return 1;
      case ConceptKind::Bottom:
        return 0;
      case ConceptKind::Not:
        return tri_not(eval(n.left, e));
      case ConceptKind::And:
        return tri_and(eval(n.left, e), eval(n.right, e));
      case ConceptKind::Or:
        return tri_or(eval(n.left, e), eval(n.right, e));
      case ConceptKind::Forall: {
        int mask = succ_mask(n.role, e);
        if (mask < 0) return -1;
        Tri acc = 1;
        for (int y = 0; y < m_; ++y) {
          if (!(mask & (1 << y))) continue;
          acc = tri_and(acc, eval(n.left, y));
          if (acc == 0) return 0;
        }
        return acc;
      }
      case ConceptKind::Exists: {
        int mask = succ_mask(n.role, e);
        if (mask < 0) return -1;
        Tri acc = 0;
        for (int y = 0; y < m_; ++y) {
          if (!(mask & (1 << y))) continue;
          acc = tri_or(acc, eval(n.left, y));
          if (acc == 1) return 1;
        }
        return acc;
      }
      case ConceptKind::AtLeast:
      case ConceptKind::AtMost: {
        bool least = n.kind == ConceptKind::AtLeast;
        int mask = succ_mask(n.role, e);
        if (mask < 0) return least && n.number == 0 ? 1 : -1;
        int sure = 0, open = 0;
        for (int y = 0; y < m_; ++y) {
          if (!(mask & (1 << y))) continue;
          Tri t = eval(n.left, y);
          if (t == 1) ++sure;
          if (t == -1) ++open;
        }
        int want = static_cast<int>(n.number);
        if (least) {
          if (sure >= want) return 1;
          if (sure + open < want) return 0;
          return -1;
        }
        if (sure > want) return 0;
        if (sure + open <= want) return 1;
        return -1;
      }
    }
    return -1;
  }

  int succ_mask(RoleId r, int e) const {
    auto it = role_index_.find(r);
    if (it == role_index_.end()) return 0;  // role never mentioned: empty
    return succ_[static_cast<std::size_t>(it->second)][static_cast<std::size_t>(e)];
  }

  // No definite violation in the current partial assignment.
  bool consistent_so_far() const {
    for (const auto& ax : o_.tbox) {
      for (int e = 0; e < m_; ++e) {
        if (eval(ax.lhs, e) == 1 && eval(ax.rhs, e) == 0) return false;
      }
    }
    for (const auto& as : o_.abox) {
      int va = ind_val_[static_cast<std::size_t>(ind_index_.at(as.a))];
      switch (as.kind) {
        case ABoxAssertion::Kind::Concept:
          if (va >= 0 && eval(as.expr, va) == 0) return false;
          break;
        case ABoxAssertion::Kind::Role: {
          int vb = ind_val_[static_cast<std::size_t>(ind_index_.at(as.b))];
          if (va < 0 || vb < 0) break;
          int mask = succ_mask(as.role, va);
          if (mask >= 0 && !(mask & (1 << vb))) return false;
          break;
        }
        case ABoxAssertion::Kind::Equal: {
          int vb = ind_val_[static_cast<std::size_t>(ind_index_.at(as.b))];
          if (va >= 0 && vb >= 0 && va != vb) return false;
          break;
        }
        case ABoxAssertion::Kind::Different: {
          int vb = ind_val_[static_cast<std::size_t>(ind_index_.at(as.b))];
          if (va >= 0 && vb >= 0 && va == vb) return false;
          break;
        }
      }
    }
    return true;
  }

  // A successor-set slot with no viable value at all (with everything else
  // unknown) dooms every extension of the current prefix.
  bool every_slot_feasible() {
    for (std::size_t r = 0; r < roles_.size(); ++r) {
      for (int e = 0; e < m_; ++e) {
        bool feasible = false;
        for (int mask = 0; mask < (1 << m_) && !feasible; ++mask) {
          succ_[r][static_cast<std::size_t>(e)] = mask;
          feasible = consistent_so_far();
        }
        succ_[r][static_cast<std::size_t>(e)] = -1;
        if (!feasible) return false;
      }
    }
    return true;
  }

  bool assign_individual(std::size_t k) {
    if (k == inds_.size()) {
      if (!every_slot_feasible()) return false;
      return assign_concept_bit(0);
    }
    // elements are interchangeable until anything refers to them, so the
    // k-th individual only needs the already-used prefix plus one element
    int used = 0;
    for (std::size_t i = 0; i < k; ++i) used = std::max(used, ind_val_[i] + 1);
    int limit = std::min(m_ - 1, used);
    for (int e = 0; e <= limit; ++e) {
      ind_val_[k] = e;
      if (consistent_so_far() && assign_individual(k + 1)) return true;
    }
    ind_val_[k] = -1;
    return false;
  }

  bool assign_concept_bit(std::size_t idx) {
    if (idx == cons_.size() * static_cast<std::size_t>(m_)) {
      if (!mbox_shape_ok()) return false;
      return assign_role_set(0);
    }
    std::size_t c = idx / static_cast<std::size_t>(m_);
    std::size_t e = idx % static_cast<std::size_t>(m_);
    for (Tri v : {1, 0}) {
      conc_[c][e] = v;
      if (consistent_so_far() && assign_concept_bit(idx + 1)) return true;
    }
    conc_[c][e] = -1;
    return false;
  }

  // Derived nested-set identities must be coherent, well-founded and
  // pairwise distinct. Depends only on individual and concept assignments.
  bool mbox_shape_ok() const {
    std::map<int, std::set<int>> members;  // element -> members of its set value
    for (const auto& m : o_.mbox) {
      int e = ind_val_[static_cast<std::size_t>(ind_index_.at(m.individual))];
      std::set<int> ext;
      std::size_t c = static_cast<std::size_t>(con_index_.at(m.concept_name));
      for (int f = 0; f < m_; ++f)
        if (conc_[c][static_cast<std::size_t>(f)] == 1) ext.insert(f);
      auto [it, inserted] = members.emplace(e, ext);
      if (!inserted && it->second != ext) return false;  // one element, two extensions
    }
    // distinct set-valued elements may not share a member set
    for (auto a = members.begin(); a != members.end(); ++a) {
      for (auto b = std::next(a); b != members.end(); ++b) {
        if (a->second == b->second) return false;
      }
    }
    // membership chains must terminate
    std::map<int, int> color;
    std::function<bool(int)> cyclic = [&](int e) {
      color[e] = 1;
      for (int f : members.at(e)) {
        if (!members.count(f)) continue;  // atoms end every chain
        if (color[f] == 1) return true;
        if (color[f] == 0 && cyclic(f)) return true;
      }
      color[e] = 2;
      return false;
    };
    for (const auto& [e, ms] : members) {
      (void)ms;
      if (color[e] == 0 && cyclic(e)) return false;
    }
    return true;
  }

  bool assign_role_set(std::size_t idx) {
    if (idx == roles_.size() * static_cast<std::size_t>(m_)) return finalize();
    std::size_t r = idx / static_cast<std::size_t>(m_);
    std::size_t e = idx % static_cast<std::size_t>(m_);
    for (int mask = 0; mask < (1 << m_); ++mask) {
      succ_[r][e] = mask;
      if (consistent_so_far() && assign_role_set(idx + 1)) return true;
    }
    succ_[r][e] = -1;
    return false;
  }

  bool finalize() {
    Interpretation interp;
    interp.sets = std::make_shared<NestedSetPool>();
    // derive element values (well-founded by mbox_shape_ok)
    std::map<int, std::set<int>> members;
    for (const auto& m : o_.mbox) {
      int e = ind_val_[static_cast<std::size_t>(ind_index_.at(m.individual))];
      std::set<int> ext;
      std::size_t c = static_cast<std::size_t>(con_index_.at(m.concept_name));
      for (int f = 0; f < m_; ++f)
        if (conc_[c][static_cast<std::size_t>(f)] == 1) ext.insert(f);
      members.emplace(e, std::move(ext));
    }
    std::map<int, SetId> value;
    std::function<SetId(int)> val = [&](int e) -> SetId {
      auto it = value.find(e);
      if (it != value.end()) return it->second;
      SetId s;
      auto mt = members.find(e);
      if (mt != members.end()) {
        std::vector<SetId> ms;
        for (int f : mt->second) ms.push_back(val(f));
        s = interp.sets->make_set(std::move(ms));
      } else {
        s = interp.sets->atom("e" + std::to_string(e));
      }
      value.emplace(e, s);
      return s;
    };
    for (int e = 0; e < m_; ++e) interp.domain.insert(val(e));
    for (std::size_t i = 0; i < inds_.size(); ++i)
      interp.individuals.emplace(inds_[i], val(ind_val_[i]));
    for (std::size_t c = 0; c < cons_.size(); ++c) {
      auto& ext = interp.concepts[cons_[c]];
      for (int e = 0; e < m_; ++e)
        if (conc_[c][static_cast<std::size_t>(e)] == 1) ext.insert(val(e));
    }
    for (std::size_t r = 0; r < roles_.size(); ++r) {
      auto& pairs = interp.roles[o_.pool->role_name(roles_[r])];
      for (int e = 0; e < m_; ++e) {
        int mask = succ_[r][static_cast<std::size_t>(e)];
        for (int y = 0; y < m_; ++y)
          if (mask & (1 << y)) pairs.emplace(val(e), val(y));
      }
    }
    if (!check_model(interp, o_).empty())
      throw std::logic_error("oracle: candidate passed pruning but fails check_model");
    return true;
  }

  const Ontology& o_;
  int m_;
  std::vector<std::string> inds_, cons_;
  std::vector<RoleId> roles_;
  std::map<std::string, int> ind_index_, con_index_;
  std::map<RoleId, int> role_index_;
  std::vector<int> ind_val_;
  std::vector<std::vector<Tri>> conc_;
  std::vector<std::vector<int>> succ_;
};

}  // namespace

bool brute_force_consistent(const Ontology& o, const OracleBounds& bounds) {
  Signature sig = o.signature();
  if (static_cast<int>(sig.individuals.size()) > bounds.max_individuals ||
      static_cast<int>(sig.concepts.size()) > bounds.max_concepts ||
      static_cast<int>(sig.roles.size()) > bounds.max_roles ||
      static_cast<int>(o.mbox.size()) > bounds.max_mbox) {
    throw OracleRefusal("ontology exceeds the declared brute-force bounds");
  }
  for (int m = 0; m <= bounds.max_domain; ++m) {
    OracleSearch search(o, m);
    if (search.run()) return true;
  }
  return false;
}

}  // namespace alcqm
