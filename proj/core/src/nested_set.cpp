#include "alcqm/nested_set.hpp"

#include <algorithm>

namespace alcqm {

SetId NestedSetPool::atom(const std::string& name) {
  auto it = atom_index_.find(name);
  if (it != atom_index_.end()) return it->second;
  SetId id = static_cast<SetId>(nodes_.size());
  nodes_.push_back({true, name, {}, 0, name});
  atom_index_.emplace(name, id);
  return id;
}

SetId NestedSetPool::make_set(std::vector<SetId> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  auto it = set_index_.find(members);
  if (it != set_index_.end()) return it->second;

  std::vector<SetId> key = members;
  // presentation order: by member text, so rendering is stable
  std::sort(members.begin(), members.end(),
            [&](SetId a, SetId b) { return nodes_[a].text < nodes_[b].text; });
  int d = 1;
  std::string text = "{";
  for (std::size_t i = 0; i < members.size(); ++i) {
    d = std::max(d, nodes_[members[i]].depth + 1);
    if (i) text += ", ";
    text += nodes_[members[i]].text;
  }
  text += "}";

  SetId id = static_cast<SetId>(nodes_.size());
  nodes_.push_back({false, "", std::move(members), d, std::move(text)});
  set_index_.emplace(std::move(key), id);
  return id;
}

}  // namespace alcqm
