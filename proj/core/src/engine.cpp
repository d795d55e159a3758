#include "alcqm/engine.hpp"

#include <algorithm>
#include <cassert>
#include <future>
#include <sstream>

namespace alcqm {

const char* rule_name(RuleTag tag) {
  switch (tag) {
    case RuleTag::Conj:
      return "and";
    case RuleTag::Disj:
      return "or";
    case RuleTag::Exists:
      return "some";
    case RuleTag::Forall:
      return "all";
    case RuleTag::TBox:
      return "tbox";
    case RuleTag::AtLeast:
      return "atleast";
    case RuleTag::Choose:
      return "choose";
    case RuleTag::AtMost:
      return "atmost";
    case RuleTag::MEq:
      return "meta-eq";
    case RuleTag::MNeq:
      return "meta-neq";
    case RuleTag::Close:
      return "close";
  }
  return "?";
}

int RuleInstance::branch_count() const {
  switch (tag) {
    case RuleTag::Disj:
      return 2;
    case RuleTag::Choose:
      return 2;
    case RuleTag::Close:
      return 2;
    case RuleTag::AtMost:
      return static_cast<int>(merge_pairs.size());
    default:
      return 1;
  }
}

Verdict check_consistency(const Ontology& o, const EngineOptions& opts) {
  Reasoner r(o, opts);
  return r.check();
}

Reasoner::Reasoner(Ontology o, EngineOptions opts) : onto_(std::move(o)), opts_(std::move(opts)) {
  if (!validate_ontology(onto_).empty())
    throw std::invalid_argument("ontology failed validation; cannot reason over it");

  tbox0_ = internalize_tbox(onto_);
  std::vector<ConceptId> mc = concepts_of_mbox(onto_);
  allowed_tbox_.insert(tbox0_.begin(), tbox0_.end());
  allowed_tbox_.insert(mc.begin(), mc.end());

  // Pre-intern every concept the rules can ask for (subconcepts and their
  // NNF negations), so the search itself never grows the pool.
  std::set<ConceptId> closure;
  for (ConceptId c : tbox0_) onto_.pool->collect_subconcepts(c, closure);
  for (ConceptId c : mc) onto_.pool->collect_subconcepts(c, closure);
  for (const auto& as : onto_.abox) {
    if (as.kind == ABoxAssertion::Kind::Concept)
      onto_.pool->collect_subconcepts(onto_.pool->nnf(as.expr), closure);
  }
  for (const auto& m : onto_.mbox) closure.insert(onto_.pool->atomic(m.concept_name));
  std::vector<ConceptId> todo(closure.begin(), closure.end());
  while (!todo.empty()) {
    ConceptId c = todo.back();
    todo.pop_back();
    std::set<ConceptId> subs;
    onto_.pool->collect_subconcepts(onto_.pool->negate(c), subs);
    for (ConceptId s : subs) {
      if (closure.insert(s).second) todo.push_back(s);
    }
  }

  initial_graph_ = initialize(onto_);
  mbox_ = compile_mbox(onto_, initial_graph_);
  for (const auto& e : mbox_) mbox_atoms_.insert(e.concept_atom);

  auto& p = *onto_.pool;
  meta_pairs_.resize(mbox_.size());
  for (std::size_t i = 0; i < mbox_.size(); ++i) {
    meta_pairs_[i].resize(mbox_.size());
    for (std::size_t j = 0; j < mbox_.size(); ++j) {
      ConceptId a = mbox_[i].concept_atom, b = mbox_[j].concept_atom;
      meta_pairs_[i][j] = {p.disj(a, p.negation(b)), p.disj(b, p.negation(a)),
                           p.disj(p.conj(a, p.negation(b)), p.conj(b, p.negation(a)))};
    }
  }
  negation_cache_.assign(p.size(), 0);
  for (ConceptId c = 0; c < negation_cache_.size(); ++c) {
    if (p.node(c).kind == ConceptKind::AtMost) negation_cache_[c] = p.negate(p.node(c).left);
  }
  gen_weight_.assign(p.size(), 0);
  for (ConceptId c = 0; c < gen_weight_.size(); ++c) {
    const auto& n = p.node(c);
    switch (n.kind) {
      case ConceptKind::Exists:
        gen_weight_[c] = 1 + gen_weight_[n.left];
        break;
      case ConceptKind::AtLeast:
        gen_weight_[c] = static_cast<int>(n.number) + gen_weight_[n.left];
        break;
      case ConceptKind::And:
      case ConceptKind::Or:
        gen_weight_[c] = gen_weight_[n.left] + gen_weight_[n.right];
        break;
      case ConceptKind::Not:
      case ConceptKind::Forall:
      case ConceptKind::AtMost:
        gen_weight_[c] = gen_weight_[n.left];
        break;
      default:
        break;
    }
  }
}

SearchState Reasoner::initial_state() const {
  SearchState s;
  s.graph = initialize(onto_, opts_.trace ? &opts_.trace : nullptr);
  for (ConceptId c : tbox0_) s.working_tbox.emplace(c, DepSet{});
  s.fresh_counter = 1;
  return s;
}

void Reasoner::emit(const std::string& line) const {
  if (opts_.trace) opts_.trace(line);
}

void Reasoner::count_step(SearchState& s) const {
  std::uint64_t n = steps_.fetch_add(1) + 1;
  if (n > opts_.step_cap) throw StepCapExceeded(opts_.step_cap);
  ++s.step_count;
}

namespace {

// Pairwise-different witnesses are rare; gather C-successors once.
std::vector<NodeHandle> concept_successors(const TableauGraph& g, NodeHandle x, RoleId role,
                                           ConceptId c) {
  std::vector<NodeHandle> ys;
  for (NodeHandle y : g.successors(x)) {
    if (g.has_edge_role(x, y, role) && g.has_label(y, c)) ys.push_back(y);
  }
  return ys;
}

}  // namespace

void Reasoner::enumerate(const SearchState& s, RuleTag tag, bool first_only,
                         std::vector<RuleInstance>& out) const {
  const TableauGraph& g = s.graph;
  auto& pool = *onto_.pool;
  std::size_t before = out.size();
  auto done = [&] { return first_only && out.size() > before; };

  std::map<NodeHandle, bool> blocked_memo;
  auto blocked = [&](NodeHandle x) {
    auto it = blocked_memo.find(x);
    if (it != blocked_memo.end()) return it->second;
    bool b = g.is_blocked(x).has_value();
    blocked_memo.emplace(x, b);
    return b;
  };
  auto each_node = [&](auto&& body) {
    for (NodeHandle x = 0; x < g.node_count(); ++x) {
      if (!g.data(x).label_defined) continue;
      if (!body(x)) return;
    }
  };
  // role-matching out-edges of x, without materializing successor vectors
  auto each_edge = [&](NodeHandle x, RoleId role, auto&& body) {
    auto [it, end] = g.edge_range(x);
    for (; it != end; ++it) {
      for (const auto& [r, d] : it->second) {
        if (r == role) {
          if (!body(it->first.second, d)) return false;
          break;
        }
      }
    }
    return true;
  };

  switch (tag) {
    case RuleTag::Conj:
      each_node([&](NodeHandle x) {
        for (const auto& [cid, dep] : g.label(x)) {
          const auto& n = pool.node(cid);
          if (n.kind != ConceptKind::And) continue;
          if (g.has_label(x, n.left) && g.has_label(x, n.right)) continue;
          out.push_back({tag, x, 0, cid, 0, 0, {}, dep});
          if (done()) return false;
        }
        return true;
      });
      return;

    case RuleTag::Disj:
      each_node([&](NodeHandle x) {
        for (const auto& [cid, dep] : g.label(x)) {
          const auto& n = pool.node(cid);
          if (n.kind != ConceptKind::Or) continue;
          if (g.has_label(x, n.left) || g.has_label(x, n.right)) continue;
          RuleInstance inst{tag, x, 0, cid, 0, 0, {}, dep};
          inst.swap_branches = gen_weight_[n.left] > gen_weight_[n.right];
          out.push_back(std::move(inst));
          if (done()) return false;
        }
        return true;
      });
      return;

    case RuleTag::Exists:
      each_node([&](NodeHandle x) {
        for (const auto& [cid, dep] : g.label(x)) {
          const auto& n = pool.node(cid);
          if (n.kind != ConceptKind::Exists) continue;
          if (blocked(x)) continue;
          bool witnessed = false;
          each_edge(x, n.role, [&](NodeHandle y, const DepSet&) {
            if (g.has_label(y, n.left)) {
              witnessed = true;
              return false;
            }
            return true;
          });
          if (witnessed) continue;
          out.push_back({tag, x, 0, cid, 0, 0, {}, dep});
          if (done()) return false;
        }
        return true;
      });
      return;

    case RuleTag::Forall:
      each_node([&](NodeHandle x) {
        for (const auto& [cid, dep] : g.label(x)) {
          const auto& n = pool.node(cid);
          if (n.kind != ConceptKind::Forall) continue;
          bool stop = false;
          each_edge(x, n.role, [&](NodeHandle y, const DepSet& edep) {
            if (g.has_label(y, n.left)) return true;
            out.push_back({tag, x, y, cid, 0, 0, {}, dep_union(dep, edep)});
            if (done()) {
              stop = true;
              return false;
            }
            return true;
          });
          if (stop) return false;
        }
        return true;
      });
      return;

    case RuleTag::TBox:
      each_node([&](NodeHandle x) {
        for (const auto& [cid, dep] : s.working_tbox) {
          if (g.has_label(x, cid)) continue;
          out.push_back({tag, x, 0, cid, 0, 0, {}, dep});
          if (done()) return false;
        }
        return true;
      });
      return;

    case RuleTag::AtLeast:
      each_node([&](NodeHandle x) {
        for (const auto& [cid, dep] : g.label(x)) {
          const auto& n = pool.node(cid);
          if (n.kind != ConceptKind::AtLeast || n.number == 0) continue;
          if (blocked(x)) continue;
          auto ys = concept_successors(g, x, n.role, n.left);
          if (g.pairwise_distinct(ys, n.number)) continue;  // already satisfied
          out.push_back({tag, x, 0, cid, 0, 0, {}, dep});
          if (done()) return false;
        }
        return true;
      });
      return;

    case RuleTag::Choose:
      each_node([&](NodeHandle x) {
        for (const auto& [cid, dep] : g.label(x)) {
          const auto& n = pool.node(cid);
          if (n.kind != ConceptKind::AtMost) continue;
          ConceptId neg = negation_cache_[cid];
          bool stop = false;
          each_edge(x, n.role, [&](NodeHandle y, const DepSet& edep) {
            if (g.has_label(y, n.left) || g.has_label(y, neg)) return true;
            out.push_back({tag, x, y, cid, 0, 0, {}, dep_union(dep, edep)});
            if (done()) {
              stop = true;
              return false;
            }
            return true;
          });
          if (stop) return false;
        }
        return true;
      });
      return;

    case RuleTag::AtMost:
      each_node([&](NodeHandle x) {
        for (const auto& [cid, dep] : g.label(x)) {
          const auto& n = pool.node(cid);
          if (n.kind != ConceptKind::AtMost) continue;
          auto ys = concept_successors(g, x, n.role, n.left);
          if (ys.size() < static_cast<std::size_t>(n.number) + 1) continue;
          RuleInstance inst{tag, x, 0, cid, 0, 0, {}, dep};
          for (std::size_t i = 0; i < ys.size(); ++i) {
            dep_merge(inst.guard_dep, *g.edge_dep(x, ys[i], n.role));
            dep_merge(inst.guard_dep, g.label_dep(ys[i], n.left));
            for (std::size_t j = i + 1; j < ys.size(); ++j) {
              if (!g.are_different(ys[i], ys[j])) inst.merge_pairs.emplace_back(ys[i], ys[j]);
            }
          }
          if (inst.merge_pairs.empty()) continue;  // all pairs differ: that is a clash
          out.push_back(std::move(inst));
          if (done()) return false;
        }
        return true;
      });
      return;

    case RuleTag::MEq:
      for (std::size_t i = 0; i < mbox_.size(); ++i) {
        for (std::size_t j = i + 1; j < mbox_.size(); ++j) {
          if (!g.same_class(mbox_[i].node, mbox_[j].node)) continue;
          const MetaPair& mp = meta_pairs_[i][j];
          if (s.working_tbox.count(mp.or_ab) && s.working_tbox.count(mp.or_ba)) continue;
          out.push_back({tag, 0, 0, 0, i, j, {}, g.class_dep(mbox_[i].node)});
          if (done()) return;
        }
      }
      return;

    case RuleTag::MNeq:
      for (std::size_t i = 0; i < mbox_.size(); ++i) {
        for (std::size_t j = i + 1; j < mbox_.size(); ++j) {
          const DepSet* nd = g.different_dep(mbox_[i].node, mbox_[j].node);
          if (!nd) continue;
          ConceptId w = meta_pairs_[i][j].diff;
          bool present = false;
          each_node([&](NodeHandle z) {
            if (g.has_label(z, w)) {
              present = true;
              return false;
            }
            return true;
          });
          if (present) continue;
          out.push_back({tag, 0, 0, w, i, j, {}, *nd});
          if (done()) return;
        }
      }
      return;

    case RuleTag::Close:
      for (std::size_t i = 0; i < mbox_.size(); ++i) {
        for (std::size_t j = i + 1; j < mbox_.size(); ++j) {
          NodeHandle rx = g.find(mbox_[i].node), ry = g.find(mbox_[j].node);
          if (rx == ry) continue;
          if (g.are_different(rx, ry)) continue;
          out.push_back({tag, rx, ry, 0, i, j, {},
                         dep_union(g.class_dep(rx), g.class_dep(ry))});
          if (done()) return;
        }
      }
      return;
  }
}

std::vector<RuleInstance> Reasoner::applicable_rules(const SearchState& s) const {
  static constexpr RuleTag kAll[] = {RuleTag::Conj,   RuleTag::Disj,  RuleTag::Exists,
                                     RuleTag::Forall, RuleTag::TBox,  RuleTag::AtLeast,
                                     RuleTag::Choose, RuleTag::AtMost, RuleTag::MEq,
                                     RuleTag::MNeq,   RuleTag::Close};
  std::vector<RuleInstance> out;
  for (RuleTag t : kAll) enumerate(s, t, false, out);
  return out;
}

std::optional<RuleInstance> Reasoner::select_instance(const SearchState& s) const {
  // Deterministic rules first, then branching, then node-generating rules;
  // with prioritized off, plain rule-tag order. The dfs loop saturates the
  // deterministic class before calling this, so the prioritized order can
  // start at the branching class.
  static constexpr RuleTag kPriority[] = {RuleTag::Disj,   RuleTag::Choose, RuleTag::Close,
                                          RuleTag::AtMost, RuleTag::Exists, RuleTag::AtLeast};
  static constexpr RuleTag kFair[] = {RuleTag::Conj,   RuleTag::Disj,  RuleTag::Exists,
                                      RuleTag::Forall, RuleTag::TBox,  RuleTag::AtLeast,
                                      RuleTag::Choose, RuleTag::AtMost, RuleTag::MEq,
                                      RuleTag::MNeq,   RuleTag::Close};
  std::vector<RuleInstance> out;
  auto scan = [&](const RuleTag* tags, std::size_t n) -> std::optional<RuleInstance> {
    for (std::size_t i = 0; i < n; ++i) {
      enumerate(s, tags[i], true, out);
      if (!out.empty()) return std::move(out.front());
    }
    return std::nullopt;
  };
  if (opts_.prioritized) return scan(kPriority, std::size(kPriority));
  return scan(kFair, std::size(kFair));
}

void Reasoner::apply_branch(SearchState& s, const RuleInstance& r, int branch,
                            std::optional<std::uint32_t> bp, Effects* fx,
                            EngineTrail* trail) const {
  count_step(s);
  auto& pool = *onto_.pool;
  TableauGraph& g = s.graph;
  DepSet eff = r.guard_dep;
  if (bp) dep_merge(eff, DepSet{*bp});

  Effects scratch;
  Effects& out = fx ? *fx : scratch;
  auto added = [&](NodeHandle x, ConceptId c, bool inserted) {
    if (!inserted) return;
    out.label_adds.emplace_back(g.find(x), c);
    if (mbox_atoms_.count(c)) out.check_cycle = true;
  };

  switch (r.tag) {
    case RuleTag::Conj: {
      const auto& n = pool.node(r.expr);
      added(r.x, n.left, g.add_label(r.x, n.left, eff));
      added(r.x, n.right, g.add_label(r.x, n.right, eff));
      return;
    }
    case RuleTag::Disj: {
      const auto& n = pool.node(r.expr);
      bool first = (branch == 0) != r.swap_branches;
      ConceptId c = first ? n.left : n.right;
      added(r.x, c, g.add_label(r.x, c, eff));
      return;
    }
    case RuleTag::Exists: {
      const auto& n = pool.node(r.expr);
      NodeHandle v = g.add_variable(s.fresh_counter++, eff);
      g.add_edge(r.x, v, n.role, eff);
      added(v, n.left, g.add_label(v, n.left, eff));
      out.edge_sources.push_back(g.find(r.x));
      return;
    }
    case RuleTag::Forall: {
      const auto& n = pool.node(r.expr);
      added(r.y, n.left, g.add_label(r.y, n.left, eff));
      return;
    }
    case RuleTag::TBox:
      added(r.x, r.expr, g.add_label(r.x, r.expr, eff));
      return;
    case RuleTag::AtLeast: {
      const auto& n = pool.node(r.expr);
      std::vector<NodeHandle> fresh;
      for (std::uint32_t i = 0; i < n.number; ++i) {
        NodeHandle v = g.add_variable(s.fresh_counter++, eff);
        g.add_edge(r.x, v, n.role, eff);
        added(v, n.left, g.add_label(v, n.left, eff));
        fresh.push_back(v);
      }
      for (std::size_t i = 0; i < fresh.size(); ++i)
        for (std::size_t j = i + 1; j < fresh.size(); ++j)
          g.make_different(fresh[i], fresh[j], eff);
      out.edge_sources.push_back(g.find(r.x));
      return;
    }
    case RuleTag::Choose: {
      const auto& n = pool.node(r.expr);
      ConceptId c = branch == 0 ? n.left : negation_cache_[r.expr];
      added(r.y, c, g.add_label(r.y, c, eff));
      return;
    }
    case RuleTag::AtMost: {
      auto [u, v] = r.merge_pairs.at(static_cast<std::size_t>(branch));
      g.equate(u, v, eff);
      out.full_clash = true;
      out.check_cycle = true;
      return;
    }
    case RuleTag::MEq: {
      const MetaPair& mp = meta_pairs_[r.mbox_i][r.mbox_j];
      for (ConceptId c : {mp.or_ab, mp.or_ba}) {
        if (!allowed_tbox_.count(c))
          throw InternalError("working TBox left its termination bound");
        if (s.working_tbox.emplace(c, eff).second && trail) trail->tbox_adds.push_back(c);
      }
      return;
    }
    case RuleTag::MNeq: {
      NodeHandle z = g.add_variable(s.fresh_counter++, eff);
      added(z, r.expr, g.add_label(z, r.expr, eff));
      return;
    }
    case RuleTag::Close: {
      if (branch == 0) {
        g.equate(mbox_[r.mbox_i].node, mbox_[r.mbox_j].node, eff);
        out.check_cycle = true;
      } else {
        g.make_different(mbox_[r.mbox_i].node, mbox_[r.mbox_j].node, eff);
      }
      out.full_clash = true;
      return;
    }
  }
}

// Guards can go stale inside a saturation batch; cheap re-validation.
bool Reasoner::still_applicable(const SearchState& s, const RuleInstance& r) const {
  const TableauGraph& g = s.graph;
  const auto& pool = *onto_.pool;
  switch (r.tag) {
    case RuleTag::Conj: {
      const auto& n = pool.node(r.expr);
      return !(g.has_label(r.x, n.left) && g.has_label(r.x, n.right));
    }
    case RuleTag::Forall:
      return !g.has_label(r.y, pool.node(r.expr).left);
    case RuleTag::TBox:
      return !g.has_label(r.x, r.expr);
    case RuleTag::MEq: {
      const MetaPair& mp = meta_pairs_[r.mbox_i][r.mbox_j];
      return !(s.working_tbox.count(mp.or_ab) && s.working_tbox.count(mp.or_ba));
    }
    case RuleTag::MNeq: {
      for (NodeHandle z = 0; z < g.node_count(); ++z) {
        if (g.data(z).label_defined && g.has_label(z, r.expr)) return false;
      }
      return true;
    }
    default:
      return true;
  }
}

std::optional<Clash> Reasoner::delta_clash(const SearchState& s, const Effects& fx) const {
  if (fx.full_clash) return s.graph.has_contradiction();
  for (const auto& [x, cid] : fx.label_adds) {
    if (auto c = s.graph.clash_on_label_add(x, cid)) return c;
  }
  for (NodeHandle x : fx.edge_sources) {
    if (auto c = s.graph.clash_on_new_edges(x)) return c;
  }
  return std::nullopt;
}

std::vector<SearchState> Reasoner::apply_rule(const SearchState& s, const RuleInstance& r) const {
  std::vector<RuleInstance> candidates;
  enumerate(s, r.tag, false, candidates);
  bool found = false;
  for (const auto& c : candidates) {
    if (c.x == r.x && c.y == r.y && c.expr == r.expr && c.mbox_i == r.mbox_i &&
        c.mbox_j == r.mbox_j && c.merge_pairs == r.merge_pairs) {
      found = true;
      break;
    }
  }
  if (!found) throw std::invalid_argument("apply_rule: instance is not applicable in this state");

  std::vector<SearchState> out;
  for (int i = 0; i < r.branch_count(); ++i) {
    SearchState child = s;
    apply_branch(child, r, i, std::nullopt, nullptr, nullptr);
    out.push_back(std::move(child));
  }
  return out;
}

ClosureInfo Reasoner::closure_from(const Clash& clash, const SearchState& s) const {
  ClosureInfo info;
  info.kind = ClosureInfo::Kind::Clash;
  info.clash_kind = clash.kind;
  info.description = clash.describe(s.graph, *onto_.pool);
  if (clash.kind == Clash::Kind::AtomPair) info.clash_atom = onto_.pool->text(clash.atom);
  info.clash_node = s.graph.display(clash.node);
  return info;
}

ClosureInfo Reasoner::closure_from(const CycleWitness& cyc, const SearchState& s) const {
  ClosureInfo info;
  info.kind = ClosureInfo::Kind::Cycle;
  info.description = cyc.describe(s.graph, mbox_);
  for (const auto& step : cyc.steps) {
    info.cycle_axioms.emplace_back(mbox_[step.axiom_index].individual,
                                   mbox_[step.axiom_index].concept_name);
  }
  return info;
}

// Apply deterministic rules to exhaustion; a closure result if the state
// closed along the way.
std::optional<Reasoner::DfsResult> Reasoner::saturate_deterministic(SearchState& s,
                                                                    EngineTrail& trail) const {
  static constexpr RuleTag kDeterministic[] = {RuleTag::Conj, RuleTag::Forall, RuleTag::TBox,
                                               RuleTag::MEq, RuleTag::MNeq};
  std::vector<RuleInstance> batch;
  for (;;) {
    batch.clear();
    for (RuleTag t : kDeterministic) enumerate(s, t, false, batch);
    if (batch.empty()) return std::nullopt;
    for (const auto& inst : batch) {
      if (!still_applicable(s, inst)) continue;
      emit("RULE " + std::string(rule_name(inst.tag)) + " @ " + s.graph.display(inst.x));
      Effects fx;
      apply_branch(s, inst, 0, std::nullopt, &fx, &trail);
      if (auto clash = delta_clash(s, fx)) {
        emit("CLOSE clash");
        return DfsResult{false, std::nullopt, {closure_from(*clash, s)}, clash->dep};
      }
      if (fx.check_cycle) {
        if (auto cyc = s.graph.has_cycle(mbox_)) {
          emit("CLOSE cycle");
          return DfsResult{false, std::nullopt, {closure_from(*cyc, s)}, cyc->dep};
        }
      }
    }
  }
}

Reasoner::Mark Reasoner::mark(const SearchState& s, const EngineTrail& trail) {
  return {trail.graph.size(), trail.tbox_adds.size(), s.fresh_counter, s.step_count};
}

void Reasoner::rollback(SearchState& s, EngineTrail& trail, const Mark& m) {
  while (trail.graph.size() > m.graph) {
    s.graph.undo(trail.graph.back());
    trail.graph.pop_back();
  }
  while (trail.tbox_adds.size() > m.tbox) {
    s.working_tbox.erase(trail.tbox_adds.back());
    trail.tbox_adds.pop_back();
  }
  s.fresh_counter = m.fresh;
  s.step_count = m.steps;
}

// Entry checks plus the search loop; dfs itself assumes an open state.
Reasoner::DfsResult Reasoner::run_checked(SearchState& s, EngineTrail& trail,
                                          std::uint32_t depth) const {
  if (auto clash = s.graph.has_contradiction()) {
    emit("CLOSE clash");
    return {false, std::nullopt, {closure_from(*clash, s)}, clash->dep};
  }
  if (auto cyc = s.graph.has_cycle(mbox_)) {
    emit("CLOSE cycle");
    return {false, std::nullopt, {closure_from(*cyc, s)}, cyc->dep};
  }
  return dfs(s, trail, depth);
}

Reasoner::DfsResult Reasoner::dfs(SearchState& s, EngineTrail& trail, std::uint32_t) const {
  // Iterative search: branch points live on an explicit stack, so path depth
  // is bounded by memory, not the call stack. The entry state must be open.
  struct Frame {
    RuleInstance inst;
    int next_branch = 0;
    Mark mark;
    DfsResult agg;
  };
  std::vector<Frame> stack;

  // a closed sub-result travelling up the stack
  std::optional<DfsResult> closed;

  for (;;) {
    if (!closed) {
      // the state is open: expand it
      bool state_closed = false;
      for (;;) {
        if (opts_.prioritized) {
          if (auto c = saturate_deterministic(s, trail)) {
            closed = std::move(*c);
            state_closed = true;
            break;
          }
        }
        auto inst = select_instance(s);
        if (!inst) {
          // complete: the ontology is consistent and s is the witness
          return {true, std::nullopt, {}, {}};
        }
        if (inst->branch_count() == 1) {
          emit("RULE " + std::string(rule_name(inst->tag)) + " @ " + s.graph.display(inst->x));
          Effects fx;
          apply_branch(s, *inst, 0, std::nullopt, &fx, &trail);
          if (auto clash = delta_clash(s, fx)) {
            emit("CLOSE clash");
            closed = DfsResult{false, std::nullopt, {closure_from(*clash, s)}, clash->dep};
            state_closed = true;
            break;
          }
          if (fx.check_cycle) {
            if (auto cyc = s.graph.has_cycle(mbox_)) {
              emit("CLOSE cycle");
              closed = DfsResult{false, std::nullopt, {closure_from(*cyc, s)}, cyc->dep};
              state_closed = true;
              break;
            }
          }
          continue;
        }
        emit("RULE " + std::string(rule_name(inst->tag)) + " @ " + s.graph.display(inst->x));
        Frame f;
        f.inst = std::move(*inst);
        f.mark = mark(s, trail);
        stack.push_back(std::move(f));
        break;
      }
      if (state_closed) continue;  // propagate the closure below
    }

    if (closed) {
      // unwind: fold the closure into the innermost open branch point
      if (stack.empty()) return std::move(*closed);
      Frame& top = stack.back();
      rollback(s, trail, top.mark);
      if (top.agg.closures.empty() || opts_.explain_all) {
        for (auto& c : closed->closures) {
          if (top.agg.closures.empty() || opts_.explain_all)
            top.agg.closures.push_back(std::move(c));
        }
      }
      std::uint32_t bp = static_cast<std::uint32_t>(stack.size()) - 1;
      if (opts_.backjump && !dep_contains(closed->deps, bp)) {
        // this choice never mattered for the refutation: skip the siblings
        DfsResult out;
        out.closures = std::move(top.agg.closures);
        out.deps = std::move(closed->deps);
        stack.pop_back();
        closed = std::move(out);
        continue;
      }
      dep_merge(top.agg.deps, closed->deps);
      closed.reset();
      if (top.next_branch == top.inst.branch_count()) {
        DfsResult out = std::move(top.agg);
        out.deps.erase(std::remove(out.deps.begin(), out.deps.end(), bp), out.deps.end());
        stack.pop_back();
        closed = std::move(out);
        continue;
      }
    }

    // try the next branch of the innermost branch point
    Frame& top = stack.back();
    int i = top.next_branch++;
    std::uint32_t bp = static_cast<std::uint32_t>(stack.size()) - 1;
    emit("BRANCH " + std::to_string(i + 1) + "/" + std::to_string(top.inst.branch_count()));
    Effects fx;
    apply_branch(s, top.inst, i, bp, &fx, &trail);
    if (auto clash = delta_clash(s, fx)) {
      emit("CLOSE clash");
      closed = DfsResult{false, std::nullopt, {closure_from(*clash, s)}, clash->dep};
      continue;
    }
    if (fx.check_cycle) {
      if (auto cyc = s.graph.has_cycle(mbox_)) {
        emit("CLOSE cycle");
        closed = DfsResult{false, std::nullopt, {closure_from(*cyc, s)}, cyc->dep};
        continue;
      }
    }
    // open again: expand
  }
}

Verdict Reasoner::check() {
  steps_ = 0;
  SearchState s0 = initial_state();

  DfsResult r;
  if (opts_.jobs <= 1) {
    EngineTrail trail;
    s0.graph.attach_trail(&trail.graph);
    r = run_checked(s0, trail, 0);
    if (r.consistent) {
      s0.graph.attach_trail(nullptr);
      r.state = std::move(s0);
    }
  } else {
    // Sequential prefix, then one parallel fan-out at the first branch point.
    SearchState s = std::move(s0);
    bool resolved = false;
    bool checked_entry = false;
    for (;;) {
      if (!checked_entry) {
        checked_entry = true;
        if (auto clash = s.graph.has_contradiction()) {
          r = {false, std::nullopt, {closure_from(*clash, s)}, clash->dep};
          resolved = true;
          break;
        }
        if (auto cyc = s.graph.has_cycle(mbox_)) {
          r = {false, std::nullopt, {closure_from(*cyc, s)}, cyc->dep};
          resolved = true;
          break;
        }
      }
      EngineTrail scratch;  // the prefix never backtracks
      if (opts_.prioritized) {
        if (auto closed = saturate_deterministic(s, scratch)) {
          r = std::move(*closed);
          resolved = true;
          break;
        }
      }
      auto inst = select_instance(s);
      if (!inst) {
        r = {true, std::move(s), {}, {}};
        resolved = true;
        break;
      }
      if (inst->branch_count() == 1) {
        Effects fx;
        apply_branch(s, *inst, 0, std::nullopt, &fx, nullptr);
        if (auto clash = delta_clash(s, fx)) {
          r = {false, std::nullopt, {closure_from(*clash, s)}, clash->dep};
          resolved = true;
          break;
        }
        if (fx.check_cycle) {
          if (auto cyc = s.graph.has_cycle(mbox_)) {
            r = {false, std::nullopt, {closure_from(*cyc, s)}, cyc->dep};
            resolved = true;
            break;
          }
        }
        continue;
      }
      int k = inst->branch_count();
      std::vector<std::future<DfsResult>> futures;
      for (int i = 0; i < k; ++i) {
        SearchState child = s;
        apply_branch(child, *inst, i, 0, nullptr, nullptr);
        futures.push_back(std::async(std::launch::async, [this, c = std::move(child)]() mutable {
          EngineTrail trail;
          c.graph.attach_trail(&trail.graph);
          DfsResult out = run_checked(c, trail, 1);
          if (out.consistent) {
            c.graph.attach_trail(nullptr);
            out.state = std::move(c);
          }
          return out;
        }));
      }
      DfsResult agg;
      bool ok = false;
      for (auto& f : futures) {
        DfsResult br = f.get();
        if (br.consistent && !ok) {
          agg = std::move(br);
          ok = true;
        } else if (!ok) {
          for (auto& c : br.closures) {
            if (agg.closures.empty() || opts_.explain_all) agg.closures.push_back(std::move(c));
          }
        }
      }
      if (ok) agg.consistent = true;
      r = std::move(agg);
      resolved = true;
      break;
    }
    assert(resolved);
    (void)resolved;
  }

  Verdict v;
  v.consistent = r.consistent;
  v.state = std::move(r.state);
  v.closures = std::move(r.closures);
  v.steps = steps_.load();
  return v;
}

}  // namespace alcqm
