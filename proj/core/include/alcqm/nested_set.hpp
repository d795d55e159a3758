#ifndef ALCQM_NESTED_SET_HPP_
#define ALCQM_NESTED_SET_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace alcqm {

// Hereditarily finite, well-founded set values: an atom or a finite set of
// other values. Hash-consed: one id per extensionally distinct value, so
// extensional equality is id equality.
using SetId = std::uint32_t;

class NestedSetPool {
 public:
  SetId atom(const std::string& name);
  // Members are deduplicated; order does not matter.
  SetId make_set(std::vector<SetId> members);

  bool is_atom(SetId s) const { return nodes_[s].is_atom; }
  const std::string& atom_name(SetId s) const { return nodes_[s].name; }
  const std::vector<SetId>& members(SetId s) const { return nodes_[s].members; }
  // Atom: 0. Set: one more than the deepest member (empty set: 1). This is
  // the least n with the value inside the n-th stage of the cumulative
  // powerset hierarchy over the atoms.
  int depth(SetId s) const { return nodes_[s].depth; }
  const std::string& text(SetId s) const { return nodes_[s].text; }

 private:
  struct Node {
    bool is_atom;
    std::string name;
    std::vector<SetId> members;  // sorted by member text
    int depth;
    std::string text;
  };
  std::vector<Node> nodes_;
  std::map<std::string, SetId> atom_index_;
  std::map<std::vector<SetId>, SetId> set_index_;  // key: sorted member ids
};

using NestedSetPoolPtr = std::shared_ptr<NestedSetPool>;

}  // namespace alcqm

#endif  // ALCQM_NESTED_SET_HPP_
