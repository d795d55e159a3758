#include "alcqm/concepts.hpp"

#include <cassert>
#include <stdexcept>

namespace alcqm {

namespace {

// FNV-1a, fixed so hashes (and nothing that depends on them) vary across
// platforms or runs.
std::size_t fnv1a(const void* data, std::size_t len, std::size_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::size_t h = seed ? seed : 1469598103934665603ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

bool needs_parens(ConceptKind k) {
  return k != ConceptKind::Atomic && k != ConceptKind::Top && k != ConceptKind::Bottom;
}

}  // namespace

std::size_t ConceptPool::KeyHash::operator()(const Key& k) const {
  std::size_t h = fnv1a(&k.kind, sizeof(k.kind), 0);
  h = fnv1a(&k.number, sizeof(k.number), h);
  h = fnv1a(&k.role, sizeof(k.role), h);
  h = fnv1a(&k.left, sizeof(k.left), h);
  h = fnv1a(&k.right, sizeof(k.right), h);
  h = fnv1a(k.name.data(), k.name.size(), h);
  return h;
}

ConceptPool::ConceptPool() {
  ConceptNode t;
  t.kind = ConceptKind::Top;
  t.text = "TOP";
  top_ = intern(std::move(t));
  ConceptNode b;
  b.kind = ConceptKind::Bottom;
  b.text = "BOTTOM";
  bottom_ = intern(std::move(b));
}

ConceptId ConceptPool::intern(ConceptNode&& n) {
  std::lock_guard<std::mutex> lock(mu_);
  Key key{n.kind, n.number, n.role, n.left, n.right, n.name};
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  auto id = static_cast<ConceptId>(nodes_.size());
  nodes_.push_back(std::move(n));
  index_.emplace(std::move(key), id);
  return id;
}

// Sub-expressions are wrapped in parentheses unless atomic, so the rendered
// text re-parses to the same tree regardless of context.
ConceptId ConceptPool::atomic(const std::string& name) {
  ConceptNode n;
  n.kind = ConceptKind::Atomic;
  n.name = name;
  n.text = name;
  return intern(std::move(n));
}

static std::string wrapped(const ConceptPool& p, ConceptId c) {
  const auto& n = p.node(c);
  if (needs_parens(n.kind)) return "(" + n.text + ")";
  return n.text;
}

ConceptId ConceptPool::negation(ConceptId c) {
  ConceptNode n;
  n.kind = ConceptKind::Not;
  n.left = c;
  n.text = "NOT " + wrapped(*this, c);
  return intern(std::move(n));
}

ConceptId ConceptPool::conj(ConceptId a, ConceptId b) {
  ConceptNode n;
  n.kind = ConceptKind::And;
  n.left = a;
  n.right = b;
  n.text = wrapped(*this, a) + " AND " + wrapped(*this, b);
  return intern(std::move(n));
}

ConceptId ConceptPool::disj(ConceptId a, ConceptId b) {
  ConceptNode n;
  n.kind = ConceptKind::Or;
  n.left = a;
  n.right = b;
  n.text = wrapped(*this, a) + " OR " + wrapped(*this, b);
  return intern(std::move(n));
}

ConceptId ConceptPool::forall(RoleId r, ConceptId c) {
  ConceptNode n;
  n.kind = ConceptKind::Forall;
  n.role = r;
  n.left = c;
  n.text = "ALL " + role_names_[r] + "." + wrapped(*this, c);
  return intern(std::move(n));
}

ConceptId ConceptPool::exists(RoleId r, ConceptId c) {
  ConceptNode n;
  n.kind = ConceptKind::Exists;
  n.role = r;
  n.left = c;
  n.text = "SOME " + role_names_[r] + "." + wrapped(*this, c);
  return intern(std::move(n));
}

ConceptId ConceptPool::at_least(std::uint32_t k, RoleId r, ConceptId c) {
  ConceptNode n;
  n.kind = ConceptKind::AtLeast;
  n.number = k;
  n.role = r;
  n.left = c;
  n.text = "ATLEAST " + std::to_string(k) + " " + role_names_[r] + "." + wrapped(*this, c);
  return intern(std::move(n));
}

ConceptId ConceptPool::at_most(std::uint32_t k, RoleId r, ConceptId c) {
  ConceptNode n;
  n.kind = ConceptKind::AtMost;
  n.number = k;
  n.role = r;
  n.left = c;
  n.text = "ATMOST " + std::to_string(k) + " " + role_names_[r] + "." + wrapped(*this, c);
  return intern(std::move(n));
}

std::optional<ConceptId> ConceptPool::find_negation(ConceptId c) const {
  std::lock_guard<std::mutex> lock(mu_);
  Key key{ConceptKind::Not, 0, 0, c, 0, ""};
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

RoleId ConceptPool::role(const std::string& name) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = role_index_.find(name);
  if (it != role_index_.end()) return it->second;
  auto id = static_cast<RoleId>(role_names_.size());
  role_names_.push_back(name);
  role_index_.emplace(name, id);
  return id;
}

bool ConceptPool::is_nnf(ConceptId c) const {
  const auto& n = node(c);
  switch (n.kind) {
    case ConceptKind::Atomic:
    case ConceptKind::Top:
    case ConceptKind::Bottom:
      return true;
    case ConceptKind::Not:
      return node(n.left).kind == ConceptKind::Atomic;
    case ConceptKind::And:
    case ConceptKind::Or:
      return is_nnf(n.left) && is_nnf(n.right);
    case ConceptKind::Forall:
    case ConceptKind::Exists:
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost:
      return is_nnf(n.left);
  }
  return false;
}

ConceptId ConceptPool::nnf(ConceptId c) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = nnf_memo_.find(c);
    if (it != nnf_memo_.end()) return it->second;
  }
  const ConceptNode n = node(c);
  ConceptId out;
  switch (n.kind) {
    case ConceptKind::Atomic:
    case ConceptKind::Top:
    case ConceptKind::Bottom:
      out = c;
      break;
    case ConceptKind::Not:
      out = negate(n.left);
      break;
    case ConceptKind::And:
      out = conj(nnf(n.left), nnf(n.right));
      break;
    case ConceptKind::Or:
      out = disj(nnf(n.left), nnf(n.right));
      break;
    case ConceptKind::Forall:
      out = forall(n.role, nnf(n.left));
      break;
    case ConceptKind::Exists:
      out = exists(n.role, nnf(n.left));
      break;
    case ConceptKind::AtLeast:
      out = at_least(n.number, n.role, nnf(n.left));
      break;
    case ConceptKind::AtMost:
      out = at_most(n.number, n.role, nnf(n.left));
      break;
    default:
      throw std::logic_error("nnf: bad kind");
  }
  std::lock_guard<std::mutex> lock(mu_);
  nnf_memo_.emplace(c, out);
  return out;
}

ConceptId ConceptPool::negate(ConceptId c) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = neg_memo_.find(c);
    if (it != neg_memo_.end()) return it->second;
  }
  const ConceptNode n = node(c);
  ConceptId out;
  switch (n.kind) {
    case ConceptKind::Atomic:
      out = negation(c);
      break;
    case ConceptKind::Top:
      out = bottom_;
      break;
    case ConceptKind::Bottom:
      out = top_;
      break;
    case ConceptKind::Not:
      out = nnf(n.left);
      break;
    case ConceptKind::And:
      out = disj(negate(n.left), negate(n.right));
      break;
    case ConceptKind::Or:
      out = conj(negate(n.left), negate(n.right));
      break;
    case ConceptKind::Forall:
      out = exists(n.role, negate(n.left));
      break;
    case ConceptKind::Exists:
      out = forall(n.role, negate(n.left));
      break;
    case ConceptKind::AtLeast:
      // NOT (ATLEAST 0 r.C) is unsatisfiable.
      out = n.number == 0 ? bottom_ : at_most(n.number - 1, n.role, nnf(n.left));
      break;
    case ConceptKind::AtMost:
      out = at_least(n.number + 1, n.role, nnf(n.left));
      break;
    default:
      throw std::logic_error("negate: bad kind");
  }
  std::lock_guard<std::mutex> lock(mu_);
  neg_memo_.emplace(c, out);
  return out;
}

ConceptId ConceptPool::simplify(ConceptId c) {
  const ConceptNode n = node(c);
  switch (n.kind) {
    case ConceptKind::Atomic:
    case ConceptKind::Top:
    case ConceptKind::Bottom:
      return c;
    case ConceptKind::Not: {
      ConceptId s = simplify(n.left);
      if (s == top_) return bottom_;
      if (s == bottom_) return top_;
      return negation(s);
    }
    case ConceptKind::And: {
      ConceptId a = simplify(n.left), b = simplify(n.right);
      if (a == bottom_ || b == bottom_) return bottom_;
      if (a == top_) return b;
      if (b == top_) return a;
      return conj(a, b);
    }
    case ConceptKind::Or: {
      ConceptId a = simplify(n.left), b = simplify(n.right);
      if (a == top_ || b == top_) return top_;
      if (a == bottom_) return b;
      if (b == bottom_) return a;
      return disj(a, b);
    }
    case ConceptKind::Forall:
      return forall(n.role, simplify(n.left));
    case ConceptKind::Exists:
      return exists(n.role, simplify(n.left));
    case ConceptKind::AtLeast:
      return at_least(n.number, n.role, simplify(n.left));
    case ConceptKind::AtMost:
      return at_most(n.number, n.role, simplify(n.left));
  }
  return c;
}

void ConceptPool::collect_subconcepts(ConceptId c, std::set<ConceptId>& out) const {
  if (!out.insert(c).second) return;
  const auto& n = node(c);
  switch (n.kind) {
    case ConceptKind::Atomic:
    case ConceptKind::Top:
    case ConceptKind::Bottom:
      return;
    case ConceptKind::And:
    case ConceptKind::Or:
      collect_subconcepts(n.left, out);
      collect_subconcepts(n.right, out);
      return;
    default:
      collect_subconcepts(n.left, out);
      return;
  }
}

void ConceptPool::collect_atomics(ConceptId c, std::set<std::string>& out) const {
  const auto& n = node(c);
  switch (n.kind) {
    case ConceptKind::Atomic:
      out.insert(n.name);
      return;
    case ConceptKind::Top:
    case ConceptKind::Bottom:
      return;
    case ConceptKind::And:
    case ConceptKind::Or:
      collect_atomics(n.left, out);
      collect_atomics(n.right, out);
      return;
    default:
      collect_atomics(n.left, out);
      return;
  }
}

void ConceptPool::collect_roles(ConceptId c, std::set<RoleId>& out) const {
  const auto& n = node(c);
  switch (n.kind) {
    case ConceptKind::Forall:
    case ConceptKind::Exists:
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost:
      out.insert(n.role);
      collect_roles(n.left, out);
      return;
    case ConceptKind::And:
    case ConceptKind::Or:
      collect_roles(n.left, out);
      collect_roles(n.right, out);
      return;
    case ConceptKind::Not:
      collect_roles(n.left, out);
      return;
    default:
      return;
  }
}

int ConceptPool::depth(ConceptId c) const {
  const auto& n = node(c);
  switch (n.kind) {
    case ConceptKind::Atomic:
    case ConceptKind::Top:
    case ConceptKind::Bottom:
      return 1;
    case ConceptKind::And:
    case ConceptKind::Or:
      return 1 + std::max(depth(n.left), depth(n.right));
    default:
      return 1 + depth(n.left);
  }
}

}  // namespace alcqm
