#include "alcqm/tableau.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace alcqm {

void dep_merge(DepSet& into, const DepSet& from) {
  if (from.empty()) return;
  DepSet out;
  out.reserve(into.size() + from.size());
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out));
  into = std::move(out);
}

DepSet dep_union(const DepSet& a, const DepSet& b) {
  DepSet out = a;
  dep_merge(out, b);
  return out;
}

bool dep_contains(const DepSet& d, std::uint32_t id) {
  return std::binary_search(d.begin(), d.end(), id);
}

std::string Clash::describe(const TableauGraph& g, const ConceptPool& pool) const {
  std::ostringstream out;
  switch (kind) {
    case Kind::AtomPair:
      if (pool.node(atom).kind == ConceptKind::Bottom) {
        out << "BOTTOM in label of " << g.display(node);
      } else {
        out << pool.text(atom) << " and NOT " << pool.text(atom) << " in label of "
            << g.display(node);
      }
      break;
    case Kind::EqNeq:
      out << g.display(node) << " and " << g.display(other)
          << " are both equated and made different";
      break;
    case Kind::AtMostViolation: {
      out << pool.text(restriction) << " in label of " << g.display(node) << " but "
          << witnesses.size() << " pairwise-different witnesses:";
      for (NodeHandle w : witnesses) out << " " << g.display(w);
      break;
    }
  }
  return out.str();
}

std::string CycleWitness::describe(const TableauGraph& g, const std::vector<MBoxEntry>& mbox) const {
  std::ostringstream out;
  out << "cycle through meta-modelling axioms:";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& e = mbox[steps[i].axiom_index];
    const auto& next = mbox[steps[(i + 1) % steps.size()].axiom_index];
    out << " (" << e.individual << " =m " << e.concept_name << ") holds " << next.concept_name
        << " in label of " << g.display(steps[i].node) << ";";
  }
  return out.str();
}

NodeHandle TableauGraph::add_individual(const std::string& name, const DepSet& dep) {
  auto it = individual_index_.find(name);
  if (it != individual_index_.end()) return it->second;
  NodeHandle h = static_cast<NodeHandle>(nodes_.size());
  nodes_.push_back(NodeData{true, name, 0, true, {}, dep});
  parent_.push_back(h);
  members_.push_back({h});
  class_dep_.push_back({});
  individual_index_.emplace(name, h);
  return h;
}

NodeHandle TableauGraph::add_variable(std::uint32_t ordinal, const DepSet& dep) {
  NodeHandle h = static_cast<NodeHandle>(nodes_.size());
  nodes_.push_back(NodeData{false, "", ordinal, true, {}, dep});
  parent_.push_back(h);
  members_.push_back({h});
  class_dep_.push_back({});
  if (trail_ptr_.p) trail_ptr_.p->push_back({TrailAction::Kind::NodeAdd, h, 0, 0, 0, nullptr});
  return h;
}

std::optional<NodeHandle> TableauGraph::individual(const std::string& name) const {
  auto it = individual_index_.find(name);
  if (it == individual_index_.end()) return std::nullopt;
  return it->second;
}

std::string TableauGraph::display(NodeHandle h) const {
  const auto& d = nodes_.at(h);
  return d.is_individual ? d.name : "v" + std::to_string(d.ordinal);
}

NodeHandle TableauGraph::canonical_rep(NodeHandle h) const {
  if (h >= nodes_.size()) throw std::out_of_range("canonical_rep: unknown node");
  return parent_[h];
}

namespace {

TableauGraph::Label::const_iterator label_find(const TableauGraph::Label& l, ConceptId c) {
  auto it = std::lower_bound(l.begin(), l.end(), c,
                             [](const auto& e, ConceptId v) { return e.first < v; });
  return it != l.end() && it->first == c ? it : l.end();
}

}  // namespace

bool TableauGraph::has_label(NodeHandle x, ConceptId c) const {
  const auto& l = nodes_[find(x)].label;
  return label_find(l, c) != l.end();
}

const TableauGraph::Label& TableauGraph::label(NodeHandle x) const {
  const NodeData& d = nodes_[find(x)];
  assert(d.label_defined);
  return d.label;
}

const DepSet& TableauGraph::label_dep(NodeHandle x, ConceptId c) const {
  const auto& l = nodes_[find(x)].label;
  auto it = label_find(l, c);
  if (it == l.end()) throw std::out_of_range("label_dep: concept not in label");
  return it->second;
}

bool TableauGraph::add_label(NodeHandle x, ConceptId c, const DepSet& dep) {
  NodeHandle r = find(x);
  NodeData& d = nodes_[r];
  auto it = std::lower_bound(d.label.begin(), d.label.end(), c,
                             [](const auto& e, ConceptId v) { return e.first < v; });
  if (it != d.label.end() && it->first == c) return false;
  d.label.emplace(it, c, dep_union(dep, d.node_dep));
  if (trail_ptr_.p)
    trail_ptr_.p->push_back({TrailAction::Kind::LabelAdd, r, 0, c, 0, nullptr});
  if (trace_ && pool_) emit("LABEL " + display(r) + " += " + pool_->text(c));
  return true;
}

void TableauGraph::add_edge(NodeHandle x, NodeHandle y, RoleId r, const DepSet& dep) {
  NodeHandle rx = find(x), ry = find(y);
  redges_.emplace(ry, rx);
  auto& roles = edges_[{rx, ry}];
  for (const auto& [role, d] : roles) {
    (void)d;
    if (role == r) return;
  }
  roles.emplace_back(r, dep_union(dep, dep_union(nodes_[rx].node_dep, nodes_[ry].node_dep)));
  if (trail_ptr_.p)
    trail_ptr_.p->push_back({TrailAction::Kind::EdgeAdd, rx, ry, 0, r, nullptr});
  if (trace_ && pool_) emit("EDGE " + display(rx) + " " + display(ry) + " += " + pool_->role_name(r));
}

bool TableauGraph::has_edge_role(NodeHandle x, NodeHandle y, RoleId r) const {
  return edge_dep(x, y, r) != nullptr;
}

const DepSet* TableauGraph::edge_dep(NodeHandle x, NodeHandle y, RoleId r) const {
  auto it = edges_.find({find(x), find(y)});
  if (it == edges_.end()) return nullptr;
  for (const auto& [role, d] : it->second) {
    if (role == r) return &d;
  }
  return nullptr;
}

std::vector<NodeHandle> TableauGraph::successors(NodeHandle x) const {
  NodeHandle r = find(x);
  std::vector<NodeHandle> out;
  for (auto it = edges_.lower_bound({r, 0}); it != edges_.end() && it->first.first == r; ++it) {
    if (!it->second.empty()) out.push_back(it->first.second);
  }
  return out;
}

std::vector<std::pair<NodeHandle, const TableauGraph::RoleSet*>> TableauGraph::out_edges(
    NodeHandle x) const {
  NodeHandle r = find(x);
  std::vector<std::pair<NodeHandle, const RoleSet*>> out;
  for (auto it = edges_.lower_bound({r, 0}); it != edges_.end() && it->first.first == r; ++it) {
    if (!it->second.empty()) out.emplace_back(it->first.second, &it->second);
  }
  return out;
}

std::pair<TableauGraph::EdgeMap::const_iterator, TableauGraph::EdgeMap::const_iterator>
TableauGraph::edge_range(NodeHandle x) const {
  NodeHandle r = find(x);
  return {edges_.lower_bound({r, 0}),
          edges_.lower_bound({r + 1, 0})};
}

std::vector<NodeHandle> TableauGraph::predecessors(NodeHandle x) const {
  NodeHandle r = find(x);
  std::vector<NodeHandle> out;
  for (auto it = redges_.lower_bound({r, 0}); it != redges_.end() && it->first == r; ++it)
    out.push_back(it->second);
  return out;
}

// Def-style merge: the canonical node absorbs the other class's label,
// edges and inequalities; preference individual over variable, then lower
// name / ordinal, so merges are reproducible.
void TableauGraph::equate(NodeHandle x, NodeHandle y, const DepSet& dep) {
  NodeHandle rx = find(x), ry = find(y);
  if (rx == ry) return;

  const NodeData& dx = nodes_[rx];
  const NodeData& dy = nodes_[ry];
  bool x_canon;
  if (dx.is_individual != dy.is_individual) {
    x_canon = dx.is_individual;
  } else if (dx.is_individual) {
    x_canon = dx.name < dy.name;
  } else {
    x_canon = dx.ordinal < dy.ordinal;
  }
  NodeHandle canon = x_canon ? rx : ry;
  NodeHandle merged = x_canon ? ry : rx;

  if (trail_ptr_.p) {
    auto undo = std::make_unique<MergeUndo>();
    undo->canon = canon;
    undo->merged = merged;
    undo->edges_before = edges_;
    undo->redges_before = redges_;
    undo->neq_before = neq_;
    undo->canon_label_before = nodes_[canon].label;
    undo->merged_label_before = nodes_[merged].label;
    undo->canon_members_before = members_[canon];
    undo->merged_members_before = members_[merged];
    undo->canon_class_dep_before = class_dep_[canon];
    trail_ptr_.p->push_back({TrailAction::Kind::Merge, canon, merged, 0, 0, std::move(undo)});
  }

  if (trace_) emit("EQUATE " + display(rx) + " " + display(ry) + " -> " + display(canon));

  // 1. fold the label
  for (auto& [cid, d] : nodes_[merged].label) {
    auto& lc = nodes_[canon].label;
    auto it = std::lower_bound(lc.begin(), lc.end(), cid,
                               [](const auto& e, ConceptId v) { return e.first < v; });
    if (it == lc.end() || it->first != cid) lc.emplace(it, cid, dep_union(d, dep));
  }
  nodes_[merged].label.clear();
  nodes_[merged].label_defined = false;

  // 2/4. move edges, 5. re-point inequalities
  rekey_after_merge(merged, canon, dep);

  // 3/6. union-find bookkeeping; flat parents keep find() O(1)
  for (NodeHandle m : members_[merged]) parent_[m] = canon;
  auto& mm = members_[merged];
  members_[canon].insert(members_[canon].end(), mm.begin(), mm.end());
  mm.clear();
  dep_merge(class_dep_[canon], class_dep_[merged]);
  dep_merge(class_dep_[canon], dep);
}

void TableauGraph::rekey_after_merge(NodeHandle merged, NodeHandle canon, const DepSet& merge_dep) {
  EdgeMap new_edges;
  for (auto& [key, roles] : edges_) {
    auto nk = key;
    if (nk.first == merged) nk.first = canon;
    if (nk.second == merged) nk.second = canon;
    bool touched = nk != key;
    auto& slot = new_edges[nk];
    for (auto& [role, d] : roles) {
      bool present = false;
      for (const auto& [prole, pd] : slot) {
        (void)pd;
        if (prole == role) {
          present = true;
          break;
        }
      }
      if (!present) slot.emplace_back(role, touched ? dep_union(d, merge_dep) : d);
    }
  }
  edges_ = std::move(new_edges);
  redges_.clear();
  for (const auto& [key, roles] : edges_) {
    if (!roles.empty()) redges_.emplace(key.second, key.first);
  }

  std::map<std::pair<NodeHandle, NodeHandle>, DepSet> new_neq;
  for (auto& [key, d] : neq_) {
    auto nk = key;
    if (nk.first == merged) nk.first = canon;
    if (nk.second == merged) nk.second = canon;
    if (nk.first > nk.second) std::swap(nk.first, nk.second);
    bool touched = nk != key;
    new_neq.emplace(nk, touched ? dep_union(d, merge_dep) : d);
  }
  neq_ = std::move(new_neq);
}

void TableauGraph::make_different(NodeHandle x, NodeHandle y, const DepSet& dep) {
  NodeHandle rx = find(x), ry = find(y);
  if (rx > ry) std::swap(rx, ry);
  auto [it, inserted] = neq_.emplace(std::make_pair(rx, ry), dep);
  (void)it;
  if (inserted && trail_ptr_.p)
    trail_ptr_.p->push_back({TrailAction::Kind::NeqAdd, rx, ry, 0, 0, nullptr});
  if (trace_) emit("NEQ " + display(rx) + " " + display(ry));
}

bool TableauGraph::are_different(NodeHandle x, NodeHandle y) const {
  return different_dep(x, y) != nullptr;
}

const DepSet* TableauGraph::different_dep(NodeHandle x, NodeHandle y) const {
  NodeHandle rx = find(x), ry = find(y);
  if (rx > ry) std::swap(rx, ry);
  auto it = neq_.find({rx, ry});
  return it == neq_.end() ? nullptr : &it->second;
}

std::vector<NodeHandle> TableauGraph::canonical_nodes() const {
  std::vector<NodeHandle> out;
  for (NodeHandle h = 0; h < nodes_.size(); ++h) {
    if (nodes_[h].label_defined) out.push_back(h);
  }
  return out;
}

std::vector<NodeHandle> TableauGraph::descendants(NodeHandle x) const {
  std::set<NodeHandle> seen;
  std::deque<NodeHandle> queue{find(x)};
  std::set<NodeHandle> visited{find(x)};
  while (!queue.empty()) {
    NodeHandle cur = queue.front();
    queue.pop_front();
    for (NodeHandle s : successors(cur)) {
      if (nodes_[s].is_individual) continue;
      if (seen.insert(s).second && visited.insert(s).second) queue.push_back(s);
    }
  }
  return {seen.begin(), seen.end()};
}

// Ancestors via variable chains, nearest first.
std::vector<NodeHandle> TableauGraph::ancestors(NodeHandle x) const {
  std::vector<NodeHandle> order;
  std::set<NodeHandle> visited{find(x)};
  std::deque<NodeHandle> queue{find(x)};
  while (!queue.empty()) {
    NodeHandle cur = queue.front();
    queue.pop_front();
    std::vector<NodeHandle> preds = predecessors(cur);
    std::sort(preds.begin(), preds.end());
    for (NodeHandle p : preds) {
      if (!visited.insert(p).second) continue;
      order.push_back(p);
      if (!nodes_[p].is_individual) queue.push_back(p);
    }
  }
  return order;
}

std::optional<NodeHandle> TableauGraph::direct_subset_blocker(NodeHandle x) const {
  const auto& lx = nodes_[x].label;
  for (NodeHandle y : ancestors(x)) {
    if (y == x) continue;
    const auto& ly = nodes_[y].label;
    // both sorted by concept id
    bool subset = true;
    auto jt = ly.begin();
    for (const auto& [cid, d] : lx) {
      (void)d;
      while (jt != ly.end() && jt->first < cid) ++jt;
      if (jt == ly.end() || jt->first != cid) {
        subset = false;
        break;
      }
    }
    if (subset) return y;
  }
  return std::nullopt;
}

TableauGraph::BlockInfo TableauGraph::block_status(NodeHandle x) const {
  NodeHandle r = find(x);
  if (nodes_[r].is_individual) return {BlockInfo::Kind::Unblocked, 0};
  // A blocked ancestor shadows the node's own subset blocker: the node then
  // counts as indirectly blocked and takes no part in the extracted model.
  for (NodeHandle z : ancestors(r)) {
    if (nodes_[z].is_individual) continue;
    if (auto b = direct_subset_blocker(z)) return {BlockInfo::Kind::Indirect, *b};
  }
  if (auto b = direct_subset_blocker(r)) return {BlockInfo::Kind::Direct, *b};
  return {BlockInfo::Kind::Unblocked, 0};
}

std::optional<NodeHandle> TableauGraph::is_blocked(NodeHandle x) const {
  BlockInfo info = block_status(x);
  if (info.kind == BlockInfo::Kind::Unblocked) return std::nullopt;
  return info.blocker;
}

std::optional<std::vector<NodeHandle>> TableauGraph::pairwise_distinct(
    const std::vector<NodeHandle>& candidates, std::size_t k) const {
  if (k == 0) return std::vector<NodeHandle>{};
  std::vector<NodeHandle> chosen;
  // candidates are few at desk scale; plain backtracking
  std::function<bool(std::size_t)> extend = [&](std::size_t from) {
    if (chosen.size() == k) return true;
    for (std::size_t i = from; i < candidates.size(); ++i) {
      NodeHandle c = candidates[i];
      bool ok = true;
      for (NodeHandle p : chosen) {
        if (!are_different(p, c)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      chosen.push_back(c);
      if (extend(i + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  if (extend(0)) return chosen;
  return std::nullopt;
}

std::optional<Clash> TableauGraph::has_contradiction() const {
  const ConceptPool& pool = *pool_;
  for (NodeHandle x = 0; x < nodes_.size(); ++x) {
    const NodeData& d = nodes_[x];
    if (!d.label_defined) continue;

    for (const auto& [cid, dep] : d.label) {
      const ConceptNode& n = pool.node(cid);
      if (n.kind == ConceptKind::Bottom) {
        Clash c{Clash::Kind::AtomPair, x, cid, 0, 0, {}, dep};
        dep_merge(c.dep, d.node_dep);
        return c;
      }
      if (n.kind == ConceptKind::Not && pool.node(n.left).kind == ConceptKind::Atomic) {
        auto pos = label_find(d.label, n.left);
        if (pos != d.label.end()) {
          Clash c{Clash::Kind::AtomPair, x, n.left, 0, 0, {}, dep_union(dep, pos->second)};
          dep_merge(c.dep, d.node_dep);
          return c;
        }
      }
    }

    for (const auto& [key, dep] : neq_) {
      if (key.first == x && key.second == x) {
        Clash c{Clash::Kind::EqNeq, x, 0, x, 0, {}, dep};
        dep_merge(c.dep, class_dep_[x]);
        return c;
      }
    }

    for (const auto& [cid, dep] : d.label) {
      (void)dep;
      if (pool.node(cid).kind != ConceptKind::AtMost) continue;
      if (auto c = check_at_most_entry(x, cid)) return c;
    }
  }
  return std::nullopt;
}

std::optional<Clash> TableauGraph::check_at_most_entry(NodeHandle x, ConceptId restriction) const {
  const ConceptNode& n = pool_->node(restriction);
  std::vector<NodeHandle> ys;
  for (NodeHandle y : successors(x)) {
    if (has_edge_role(x, y, n.role) && has_label(y, n.left)) ys.push_back(y);
  }
  if (ys.size() < n.number + 1) return std::nullopt;
  auto witnesses = pairwise_distinct(ys, n.number + 1);
  if (!witnesses) return std::nullopt;
  Clash c{Clash::Kind::AtMostViolation, x, 0, 0, restriction, *witnesses,
          label_dep(x, restriction)};
  for (NodeHandle w : *witnesses) {
    dep_merge(c.dep, *edge_dep(x, w, n.role));
    dep_merge(c.dep, label_dep(w, n.left));
    for (NodeHandle v : *witnesses) {
      if (w < v) {
        if (const DepSet* nd = different_dep(w, v)) dep_merge(c.dep, *nd);
      }
    }
  }
  return c;
}

std::optional<Clash> TableauGraph::clash_on_label_add(NodeHandle x, ConceptId cid) const {
  x = find(x);
  const ConceptNode& n = pool_->node(cid);
  const NodeData& d = nodes_[x];

  if (n.kind == ConceptKind::Bottom) {
    Clash c{Clash::Kind::AtomPair, x, cid, 0, 0, {}, label_dep(x, cid)};
    return c;
  }
  if (n.kind == ConceptKind::Atomic) {
    if (auto neg = pool_->find_negation(cid)) {
      auto it = label_find(d.label, *neg);
      if (it != d.label.end())
        return Clash{Clash::Kind::AtomPair, x, cid, 0, 0, {},
                     dep_union(label_dep(x, cid), it->second)};
    }
  }
  if (n.kind == ConceptKind::Not) {
    auto it = label_find(d.label, n.left);
    if (it != d.label.end())
      return Clash{Clash::Kind::AtomPair, x, n.left, 0, 0, {},
                   dep_union(label_dep(x, cid), it->second)};
  }
  if (n.kind == ConceptKind::AtMost) {
    if (auto c = check_at_most_entry(x, cid)) return c;
  }
  // the new concept may complete an at-most violation one edge upstream
  for (NodeHandle p : predecessors(x)) {
    for (const auto& [pcid, pdep] : nodes_[p].label) {
      (void)pdep;
      const ConceptNode& pn = pool_->node(pcid);
      if (pn.kind != ConceptKind::AtMost || pn.left != cid) continue;
      if (!has_edge_role(p, x, pn.role)) continue;
      if (auto c = check_at_most_entry(p, pcid)) return c;
    }
  }
  return std::nullopt;
}

std::optional<Clash> TableauGraph::clash_on_new_edges(NodeHandle x) const {
  x = find(x);
  for (const auto& [cid, dep] : nodes_[x].label) {
    (void)dep;
    if (pool_->node(cid).kind != ConceptKind::AtMost) continue;
    if (auto c = check_at_most_entry(x, cid)) return c;
  }
  return std::nullopt;
}

std::optional<CycleWitness> TableauGraph::has_cycle(const std::vector<MBoxEntry>& mbox) const {
  const std::size_t n = mbox.size();
  // edge i -> j iff concept of axiom j is in the label of axiom i's node
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    NodeHandle rep = find(mbox[i].node);
    for (std::size_t j = 0; j < n; ++j) {
      if (has_label(rep, mbox[j].concept_atom)) adj[i].push_back(j);
    }
  }
  // DFS with colors; the first back edge closes the witness cycle
  std::vector<int> color(n, 0);
  std::vector<std::size_t> stack;
  std::function<std::optional<std::vector<std::size_t>>(std::size_t)> visit =
      [&](std::size_t i) -> std::optional<std::vector<std::size_t>> {
    color[i] = 1;
    stack.push_back(i);
    for (std::size_t j : adj[i]) {
      if (color[j] == 1) {
        auto it = std::find(stack.begin(), stack.end(), j);
        return std::vector<std::size_t>(it, stack.end());
      }
      if (color[j] == 0) {
        if (auto cyc = visit(j)) return cyc;
      }
    }
    stack.pop_back();
    color[i] = 2;
    return std::nullopt;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (color[i] != 0) continue;
    if (auto cyc = visit(i)) {
      CycleWitness w;
      for (std::size_t k = 0; k < cyc->size(); ++k) {
        std::size_t i_cur = (*cyc)[k];
        std::size_t i_next = (*cyc)[(k + 1) % cyc->size()];
        NodeHandle rep = find(mbox[i_cur].node);
        w.steps.push_back({i_cur, rep});
        dep_merge(w.dep, label_dep(rep, mbox[i_next].concept_atom));
        dep_merge(w.dep, class_dep_[rep]);
      }
      return w;
    }
  }
  return std::nullopt;
}

void TableauGraph::validate_invariants() const {
  for (NodeHandle h = 0; h < nodes_.size(); ++h) {
    NodeHandle r = find(h);
    if (find(r) != r) throw std::logic_error("union-find not flat");
    if (!nodes_[r].label_defined) throw std::logic_error("class representative lost its label");
    if (h != r && nodes_[h].label_defined)
      throw std::logic_error("non-representative with defined label");
  }
  for (NodeHandle r = 0; r < nodes_.size(); ++r) {
    if (!nodes_[r].label_defined) continue;
    std::size_t defined = 0;
    for (NodeHandle m : members_[r]) {
      if (nodes_[m].label_defined) ++defined;
      if (find(m) != r) throw std::logic_error("member list out of sync");
    }
    if (defined != 1) throw std::logic_error("class must have exactly one defined label");
  }
  for (const auto& [key, roles] : edges_) {
    (void)roles;
    if (find(key.first) != key.first || find(key.second) != key.second)
      throw std::logic_error("edge endpoint is not canonical");
  }
  for (const auto& [key, dep] : neq_) {
    (void)dep;
    if (find(key.first) != key.first || find(key.second) != key.second)
      throw std::logic_error("inequality endpoint is not canonical");
    if (key.first > key.second) throw std::logic_error("inequality pair not normalized");
  }
}

void TableauGraph::undo(TrailAction& action) {
  switch (action.kind) {
    case TrailAction::Kind::LabelAdd: {
      auto& l = nodes_[action.a].label;
      auto it = std::lower_bound(l.begin(), l.end(), action.cid,
                                 [](const auto& e, ConceptId v) { return e.first < v; });
      assert(it != l.end() && it->first == action.cid);
      l.erase(it);
      return;
    }
    case TrailAction::Kind::EdgeAdd: {
      auto it = edges_.find({action.a, action.b});
      assert(it != edges_.end());
      auto& roles = it->second;
      for (auto jt = roles.begin(); jt != roles.end(); ++jt) {
        if (jt->first == action.role) {
          roles.erase(jt);
          break;
        }
      }
      if (roles.empty()) {
        redges_.erase({action.b, action.a});
        edges_.erase(it);
      }
      return;
    }
    case TrailAction::Kind::NeqAdd:
      neq_.erase({action.a, action.b});
      return;
    case TrailAction::Kind::NodeAdd:
      assert(action.a + 1 == nodes_.size() && !nodes_.back().is_individual);
      nodes_.pop_back();
      parent_.pop_back();
      members_.pop_back();
      class_dep_.pop_back();
      return;
    case TrailAction::Kind::Merge: {
      MergeUndo& u = *action.merge;
      edges_ = std::move(u.edges_before);
      redges_ = std::move(u.redges_before);
      neq_ = std::move(u.neq_before);
      nodes_[u.canon].label = std::move(u.canon_label_before);
      nodes_[u.merged].label = std::move(u.merged_label_before);
      nodes_[u.merged].label_defined = true;
      for (NodeHandle m : u.merged_members_before) parent_[m] = u.merged;
      members_[u.canon] = std::move(u.canon_members_before);
      members_[u.merged] = std::move(u.merged_members_before);
      class_dep_[u.canon] = std::move(u.canon_class_dep_before);
      return;
    }
  }
}

void TableauGraph::emit(const std::string& line) const {
  if (trace_ && *trace_) (*trace_)(line);
}

TableauGraph initialize(const Ontology& o, const TraceSink* trace) {
  TableauGraph g(o.pool);
  g.set_trace(trace);
  for (const auto& name : o.individuals_in_order()) g.add_individual(name, {});
  auto handle = [&](const std::string& name) { return *g.individual(name); };

  for (const auto& as : o.abox) {
    if (as.kind == ABoxAssertion::Kind::Concept)
      g.add_label(handle(as.a), o.pool->nnf(as.expr), {});
  }
  for (const auto& as : o.abox) {
    if (as.kind == ABoxAssertion::Kind::Role) g.add_edge(handle(as.a), handle(as.b), as.role, {});
  }
  for (const auto& as : o.abox) {
    if (as.kind == ABoxAssertion::Kind::Different) g.make_different(handle(as.a), handle(as.b), {});
  }
  for (const auto& as : o.abox) {
    if (as.kind == ABoxAssertion::Kind::Equal) g.equate(handle(as.a), handle(as.b), {});
  }
  return g;
}

std::vector<MBoxEntry> compile_mbox(const Ontology& o, const TableauGraph& g) {
  std::vector<MBoxEntry> out;
  for (const auto& m : o.mbox) {
    auto h = g.individual(m.individual);
    if (!h) throw std::logic_error("meta-modelling individual missing from graph");
    out.push_back({m.individual, m.concept_name, o.pool->atomic(m.concept_name), *h});
  }
  return out;
}

}  // namespace alcqm
