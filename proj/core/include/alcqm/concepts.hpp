#ifndef ALCQM_CONCEPTS_HPP_
#define ALCQM_CONCEPTS_HPP_

#include <cstdint>
#include <deque>
#include <optional>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace alcqm {

// Concept expressions are interned: each structurally distinct expression
// gets one ConceptId per pool, so labels are cheap ordered sets of ids and
// equality is id equality. Ids are assigned in intern order, which is
// deterministic for a given input; all ordered scans use id order.
using ConceptId = std::uint32_t;
using RoleId = std::uint32_t;

enum class ConceptKind : std::uint8_t {
  Atomic,
  Top,
  Bottom,
  Not,
  And,
  Or,
  Forall,
  Exists,
  AtLeast,
  AtMost,
};

struct ConceptNode {
  ConceptKind kind;
  std::uint32_t number = 0;  // n of AtLeast/AtMost
  RoleId role = 0;           // Forall/Exists/AtLeast/AtMost
  ConceptId left = 0;        // child / lhs
  ConceptId right = 0;       // rhs of And/Or
  std::string name;          // Atomic concept name
  std::string text;          // canonical rendering, fixed at intern time
};

class ConceptPool {
 public:
  ConceptPool();

  ConceptId atomic(const std::string& name);
  ConceptId top() const { return top_; }
  ConceptId bottom() const { return bottom_; }
  ConceptId negation(ConceptId c);
  ConceptId conj(ConceptId a, ConceptId b);
  ConceptId disj(ConceptId a, ConceptId b);
  ConceptId forall(RoleId r, ConceptId c);
  ConceptId exists(RoleId r, ConceptId c);
  ConceptId at_least(std::uint32_t n, RoleId r, ConceptId c);
  ConceptId at_most(std::uint32_t n, RoleId r, ConceptId c);

  RoleId role(const std::string& name);
  const std::string& role_name(RoleId r) const { return role_names_[r]; }
  std::size_t role_count() const { return role_names_.size(); }

  const ConceptNode& node(ConceptId c) const { return nodes_[c]; }
  const std::string& text(ConceptId c) const { return nodes_[c].text; }
  std::size_t size() const { return nodes_.size(); }

  // Lookup without interning: the negation of c, if it has ever been built.
  std::optional<ConceptId> find_negation(ConceptId c) const;

  // Negation normal form: every Not wraps an Atomic. Equivalence-preserving;
  // does not simplify connectives with Top/Bottom (see simplify()).
  ConceptId nnf(ConceptId c);
  // nnf(Not(c)).
  ConceptId negate(ConceptId c);
  bool is_nnf(ConceptId c) const;

  // Optional cleanup pass: drops Top/Bottom units from And/Or. Not applied
  // anywhere by default so that traces show the axioms as written.
  ConceptId simplify(ConceptId c);

  // All subexpressions of c, including c itself.
  void collect_subconcepts(ConceptId c, std::set<ConceptId>& out) const;

  // Atomic concept names occurring in c.
  void collect_atomics(ConceptId c, std::set<std::string>& out) const;
  void collect_roles(ConceptId c, std::set<RoleId>& out) const;

  int depth(ConceptId c) const;

 private:
  ConceptId intern(ConceptNode&& n);

  struct Key {
    ConceptKind kind;
    std::uint32_t number;
    RoleId role;
    ConceptId left, right;
    std::string name;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  std::vector<ConceptNode> nodes_;
  std::unordered_map<Key, ConceptId, KeyHash> index_;
  std::unordered_map<std::string, RoleId> role_index_;
  std::deque<std::string> role_names_;
  std::unordered_map<ConceptId, ConceptId> nnf_memo_;
  std::unordered_map<ConceptId, ConceptId> neg_memo_;
  ConceptId top_, bottom_;
  mutable std::mutex mu_;
};

using ConceptPoolPtr = std::shared_ptr<ConceptPool>;

}  // namespace alcqm

#endif  // ALCQM_CONCEPTS_HPP_
