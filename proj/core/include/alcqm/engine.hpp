#ifndef ALCQM_ENGINE_HPP_
#define ALCQM_ENGINE_HPP_

#include <atomic>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "alcqm/ontology.hpp"
#include "alcqm/tableau.hpp"
#include "alcqm/trace.hpp"

namespace alcqm {

enum class RuleTag : std::uint8_t {
  Conj,
  Disj,
  Exists,
  Forall,
  TBox,
  AtLeast,
  Choose,
  AtMost,
  MEq,   // transfers a ~ b to the TBox
  MNeq,  // witnesses a difference between meta-modelled concepts
  Close, // decides a ~ b vs a != b for meta-modelled individuals
};

const char* rule_name(RuleTag tag);

struct RuleInstance {
  RuleTag tag;
  NodeHandle x = 0;
  NodeHandle y = 0;     // Forall / Choose target
  ConceptId expr = 0;   // focus concept
  std::size_t mbox_i = 0, mbox_j = 0;
  std::vector<std::pair<NodeHandle, NodeHandle>> merge_pairs;  // AtMost branches
  DepSet guard_dep;
  // Disjunction branch order: try the disjunct that creates fewer successor
  // nodes first. Pure exploration order, both branches are always covered.
  bool swap_branches = false;

  int branch_count() const;
};

struct SearchState {
  // Working TBox as a concept set; grows only through the MEq rule and stays
  // inside internalize_tbox(o) + concepts_of_mbox(o).
  std::map<ConceptId, DepSet> working_tbox;
  TableauGraph graph;
  std::uint32_t fresh_counter = 0;
  std::uint64_t step_count = 0;
};

// Rendered at closure time; the closing branch's graph does not outlive the
// backtrack.
struct ClosureInfo {
  enum class Kind { Clash, Cycle };
  Kind kind;
  std::string description;
  // Clash details
  std::optional<Clash::Kind> clash_kind;
  std::string clash_atom;  // atomic concept text, or "BOTTOM"
  std::string clash_node;
  // Cycle details: the (individual, concept) axioms along the cycle
  std::vector<std::pair<std::string, std::string>> cycle_axioms;
};

struct Verdict {
  bool consistent = false;
  std::optional<SearchState> state;   // set when consistent
  std::vector<ClosureInfo> closures;  // set when inconsistent
  std::uint64_t steps = 0;
};

struct EngineOptions {
  bool prioritized = true;  // apply generating rules last, branching rules in between
  bool backjump = true;     // dependency-directed backtracking
  bool explain_all = false;
  std::uint64_t step_cap = 1000000;
  int jobs = 1;
  TraceSink trace;
};

struct StepCapExceeded : std::runtime_error {
  explicit StepCapExceeded(std::uint64_t cap)
      : std::runtime_error("step cap of " + std::to_string(cap) +
                           " rule applications exceeded; this is a bug signal, not a verdict") {}
};

struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

class Reasoner {
 public:
  Reasoner(Ontology o, EngineOptions opts = {});

  SearchState initial_state() const;

  // Every rule instance whose guard holds, grouped by rule tag in the order
  // of RuleTag, each group sorted by (node, concept, target).
  std::vector<RuleInstance> applicable_rules(const SearchState& s) const;

  // All successor states of one rule application. Throws std::invalid_argument
  // if the instance is not applicable in s.
  std::vector<SearchState> apply_rule(const SearchState& s, const RuleInstance& r) const;

  Verdict check();

  const std::vector<MBoxEntry>& mbox() const { return mbox_; }
  const Ontology& ontology() const { return onto_; }
  std::uint64_t steps() const { return steps_.load(); }

 private:
  friend struct RuleEnumerator;

  struct DfsResult {
    bool consistent = false;
    std::optional<SearchState> state;
    std::vector<ClosureInfo> closures;
    DepSet deps;
  };

  // What one application changed, for targeted clash / cycle re-checks.
  struct Effects {
    bool full_clash = false;
    bool check_cycle = false;
    std::vector<std::pair<NodeHandle, ConceptId>> label_adds;
    std::vector<NodeHandle> edge_sources;
  };

  // Search mutates one state in place; the trail rewinds it at branch points.
  struct EngineTrail {
    TableauGraph::Trail graph;
    std::vector<ConceptId> tbox_adds;
  };
  struct Mark {
    std::size_t graph, tbox;
    std::uint32_t fresh;
    std::uint64_t steps;
  };

  std::optional<RuleInstance> select_instance(const SearchState& s) const;
  void enumerate(const SearchState& s, RuleTag tag, bool first_only,
                 std::vector<RuleInstance>& out) const;
  void apply_branch(SearchState& s, const RuleInstance& r, int branch,
                    std::optional<std::uint32_t> bp, Effects* fx, EngineTrail* trail) const;
  bool still_applicable(const SearchState& s, const RuleInstance& r) const;
  std::optional<Clash> delta_clash(const SearchState& s, const Effects& fx) const;
  std::optional<DfsResult> saturate_deterministic(SearchState& s, EngineTrail& trail) const;
  static Mark mark(const SearchState& s, const EngineTrail& trail);
  static void rollback(SearchState& s, EngineTrail& trail, const Mark& m);
  DfsResult run_checked(SearchState& s, EngineTrail& trail, std::uint32_t depth) const;
  DfsResult dfs(SearchState& s, EngineTrail& trail, std::uint32_t depth) const;
  ClosureInfo closure_from(const Clash& clash, const SearchState& s) const;
  ClosureInfo closure_from(const CycleWitness& cyc, const SearchState& s) const;
  void count_step(SearchState& s) const;
  void emit(const std::string& line) const;

  Ontology onto_;
  EngineOptions opts_;
  // per MBox pair (i, j): the two transfer disjunctions and the difference
  // witness concept, interned once up front
  struct MetaPair {
    ConceptId or_ab, or_ba, diff;
  };
  std::vector<std::vector<MetaPair>> meta_pairs_;
  std::vector<ConceptId> negation_cache_;  // by concept id; 0 = not cached
  std::vector<int> gen_weight_;            // node-creating quantifiers per concept
  std::vector<ConceptId> tbox0_;
  std::set<ConceptId> allowed_tbox_;  // tbox0 + concepts_of_mbox
  std::set<ConceptId> mbox_atoms_;    // only these can open new cycles
  TableauGraph initial_graph_;
  std::vector<MBoxEntry> mbox_;
  mutable std::atomic<std::uint64_t> steps_{0};
};

Verdict check_consistency(const Ontology& o, const EngineOptions& opts = {});

}  // namespace alcqm

#endif  // ALCQM_ENGINE_HPP_
