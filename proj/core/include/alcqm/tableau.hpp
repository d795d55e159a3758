#ifndef ALCQM_TABLEAU_HPP_
#define ALCQM_TABLEAU_HPP_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alcqm/concepts.hpp"
#include "alcqm/ontology.hpp"
#include "alcqm/trace.hpp"

namespace alcqm {

using NodeHandle = std::uint32_t;

// Branch-point dependency set, used for dependency-directed backtracking.
// Sorted, duplicate-free, usually tiny.
using DepSet = std::vector<std::uint32_t>;

void dep_merge(DepSet& into, const DepSet& from);
DepSet dep_union(const DepSet& a, const DepSet& b);
bool dep_contains(const DepSet& d, std::uint32_t id);

class TableauGraph;

struct Clash {
  enum class Kind { AtomPair, EqNeq, AtMostViolation };
  Kind kind;
  NodeHandle node = 0;
  // AtomPair: the atomic concept (or BOTTOM, which clashes on its own).
  ConceptId atom = 0;
  NodeHandle other = 0;  // EqNeq
  ConceptId restriction = 0;
  std::vector<NodeHandle> witnesses;
  DepSet dep;

  std::string describe(const TableauGraph& g, const ConceptPool& pool) const;
};

// One meta-modelling axiom as seen by the graph.
struct MBoxEntry {
  std::string individual;
  std::string concept_name;
  ConceptId concept_atom;
  NodeHandle node;
};

// A directed cycle through the MBox: for consecutive steps i -> i+1 (mod n),
// concept_atom of step i+1 is in the label of step i's canonical node, and
// that node is equivalent to step i's individual.
struct CycleWitness {
  struct Step {
    std::size_t axiom_index;
    NodeHandle node;
  };
  std::vector<Step> steps;
  DepSet dep;

  std::string describe(const TableauGraph& g, const std::vector<MBoxEntry>& mbox) const;
};

// Labelled graph over individual and variable nodes with concept labels
// L(x), role labels L(x,y), an equivalence ~ with one canonical (label
// defined) node per class, and a symmetric difference relation. Plain value
// type: copy at a branch point yields an independent graph.
class TableauGraph {
 public:
  TableauGraph() = default;
  explicit TableauGraph(ConceptPoolPtr pool) : pool_(std::move(pool)) {}

  // Labels are flat vectors sorted by concept id: cheap to copy at branch
  // points and cache-friendly to scan.
  using Label = std::vector<std::pair<ConceptId, DepSet>>;
  using RoleSet = std::vector<std::pair<RoleId, DepSet>>;

  struct NodeData {
    bool is_individual;
    std::string name;        // individuals
    std::uint32_t ordinal;   // variables
    bool label_defined;
    Label label;
    DepSet node_dep;  // branch points the node's existence depends on
  };

  struct BlockInfo {
    enum class Kind { Unblocked, Direct, Indirect };
    Kind kind = Kind::Unblocked;
    NodeHandle blocker = 0;
  };

  NodeHandle add_individual(const std::string& name, const DepSet& dep);
  NodeHandle add_variable(std::uint32_t ordinal, const DepSet& dep);
  std::optional<NodeHandle> individual(const std::string& name) const;

  std::size_t node_count() const { return nodes_.size(); }
  const NodeData& data(NodeHandle h) const { return nodes_.at(h); }
  std::string display(NodeHandle h) const;

  NodeHandle find(NodeHandle h) const { return parent_[h]; }
  NodeHandle canonical_rep(NodeHandle h) const;
  bool same_class(NodeHandle a, NodeHandle b) const { return find(a) == find(b); }
  const DepSet& class_dep(NodeHandle h) const { return class_dep_[find(h)]; }
  const std::vector<NodeHandle>& class_members(NodeHandle h) const { return members_[find(h)]; }

  bool has_label(NodeHandle x, ConceptId c) const;
  const Label& label(NodeHandle x) const;
  const DepSet& label_dep(NodeHandle x, ConceptId c) const;
  // Returns false when the concept was already present.
  bool add_label(NodeHandle x, ConceptId c, const DepSet& dep);

  void add_edge(NodeHandle x, NodeHandle y, RoleId r, const DepSet& dep);
  bool has_edge_role(NodeHandle x, NodeHandle y, RoleId r) const;
  const DepSet* edge_dep(NodeHandle x, NodeHandle y, RoleId r) const;
  // Canonical targets with a non-empty role set, ascending.
  std::vector<NodeHandle> successors(NodeHandle x) const;
  std::vector<NodeHandle> predecessors(NodeHandle x) const;
  std::vector<std::pair<NodeHandle, const RoleSet*>> out_edges(NodeHandle x) const;
  // Alloc-free iteration over the out-edges of x's class.
  using EdgeMap = std::map<std::pair<NodeHandle, NodeHandle>, RoleSet>;
  std::pair<EdgeMap::const_iterator, EdgeMap::const_iterator> edge_range(NodeHandle x) const;

  void equate(NodeHandle x, NodeHandle y, const DepSet& dep);
  void make_different(NodeHandle x, NodeHandle y, const DepSet& dep);
  bool are_different(NodeHandle x, NodeHandle y) const;
  const DepSet* different_dep(NodeHandle x, NodeHandle y) const;

  std::vector<NodeHandle> canonical_nodes() const;

  // Variables reachable from x through chains of variable successors.
  std::vector<NodeHandle> descendants(NodeHandle x) const;
  BlockInfo block_status(NodeHandle x) const;
  std::optional<NodeHandle> is_blocked(NodeHandle x) const;

  // First clash under the documented scan order: nodes ascending, per node
  // AtomPair (label scan by concept id), then EqNeq, then AtMostViolation.
  std::optional<Clash> has_contradiction() const;
  std::optional<CycleWitness> has_cycle(const std::vector<MBoxEntry>& mbox) const;

  // Targeted re-checks after a monotone addition; complete for the delta.
  std::optional<Clash> clash_on_label_add(NodeHandle x, ConceptId c) const;
  std::optional<Clash> clash_on_new_edges(NodeHandle x) const;

  // Among `candidates`, k nodes that are pairwise different. Deterministic.
  std::optional<std::vector<NodeHandle>> pairwise_distinct(const std::vector<NodeHandle>& candidates,
                                                           std::size_t k) const;

  void validate_invariants() const;

  // Undo trail: when attached, every mutation pushes one record; popping
  // records in reverse restores the graph exactly. Merges snapshot the
  // structures they rewrite (they are rare). A copied graph starts without
  // a trail.
  struct MergeUndo {
    NodeHandle canon, merged;
    EdgeMap edges_before;
    std::set<std::pair<NodeHandle, NodeHandle>> redges_before;
    std::map<std::pair<NodeHandle, NodeHandle>, DepSet> neq_before;
    Label canon_label_before;
    Label merged_label_before;
    std::vector<NodeHandle> canon_members_before;
    std::vector<NodeHandle> merged_members_before;
    DepSet canon_class_dep_before;
  };
  struct TrailAction {
    enum class Kind { LabelAdd, EdgeAdd, NeqAdd, NodeAdd, Merge };
    Kind kind;
    NodeHandle a = 0, b = 0;
    ConceptId cid = 0;
    RoleId role = 0;
    std::unique_ptr<MergeUndo> merge;
  };
  using Trail = std::vector<TrailAction>;

  void attach_trail(Trail* t) { trail_ptr_.p = t; }
  void undo(TrailAction& action);

  void set_trace(const TraceSink* sink) { trace_ = sink; }
  const ConceptPoolPtr& pool() const { return pool_; }

 private:
  void emit(const std::string& line) const;
  void rekey_after_merge(NodeHandle merged, NodeHandle canon, const DepSet& merge_dep);
  std::vector<NodeHandle> ancestors(NodeHandle x) const;
  std::optional<NodeHandle> direct_subset_blocker(NodeHandle x) const;
  std::optional<Clash> check_at_most_entry(NodeHandle x, ConceptId restriction) const;

  // Detached automatically on copy/move: a new graph value never aliases
  // another search's undo history.
  struct TrailPtr {
    Trail* p = nullptr;
    TrailPtr() = default;
    TrailPtr(const TrailPtr&) {}
    TrailPtr(TrailPtr&&) noexcept {}
    TrailPtr& operator=(const TrailPtr&) { p = nullptr; return *this; }
    TrailPtr& operator=(TrailPtr&&) noexcept { p = nullptr; return *this; }
  };

  ConceptPoolPtr pool_;
  TrailPtr trail_ptr_;
  std::vector<NodeData> nodes_;
  std::vector<NodeHandle> parent_;  // flat: always points at the class root
  std::vector<std::vector<NodeHandle>> members_;
  std::vector<DepSet> class_dep_;
  std::map<std::string, NodeHandle> individual_index_;
  EdgeMap edges_;
  std::set<std::pair<NodeHandle, NodeHandle>> redges_;  // (target, source) mirror
  std::map<std::pair<NodeHandle, NodeHandle>, DepSet> neq_;
  const TraceSink* trace_ = nullptr;
};

// Initial tableau: one node per ABox/MBox individual, ABox facts folded in
// (concept assertions in NNF), inequalities set, equalities merged.
TableauGraph initialize(const Ontology& o, const TraceSink* trace = nullptr);

// MBox axioms resolved against the graph's individual nodes.
std::vector<MBoxEntry> compile_mbox(const Ontology& o, const TableauGraph& g);

}  // namespace alcqm

#endif  // ALCQM_TABLEAU_HPP_
