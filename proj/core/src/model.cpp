#include "alcqm/model.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace alcqm {

int Interpretation::level() const {
  int n = 0;
  for (SetId s : domain) n = std::max(n, sets->depth(s));
  return n;
}

namespace {

std::string model_atom_name(const TableauGraph& g, NodeHandle x) {
  const auto& d = g.data(x);
  // Variables use the reserved namespace so they can never collide with
  // ontology individuals in a model file.
  return d.is_individual ? d.name : "__v" + std::to_string(d.ordinal);
}

}  // namespace

AtomicInterpretation canonical_interpretation(const TableauGraph& g, const Ontology& o) {
  if (g.has_contradiction())
    throw std::logic_error("canonical_interpretation: graph has a contradiction");

  AtomicInterpretation out;
  std::map<NodeHandle, TableauGraph::BlockInfo> block;
  for (NodeHandle x : g.canonical_nodes()) block.emplace(x, g.block_status(x));

  std::set<NodeHandle> domain;
  for (auto& [x, info] : block) {
    if (info.kind != TableauGraph::BlockInfo::Kind::Indirect) domain.insert(x);
  }
  out.domain.assign(domain.begin(), domain.end());

  Signature sig = o.signature();
  for (const auto& name : sig.individuals) {
    auto h = g.individual(name);
    if (!h) continue;  // individual of a query concept never added to the graph
    out.individuals.emplace(name, g.find(*h));
  }
  for (const auto& name : sig.concepts) {
    ConceptId a = o.pool->atomic(name);
    auto& ext = out.concepts[name];
    for (NodeHandle x : out.domain) {
      if (g.has_label(x, a)) ext.insert(x);
    }
  }
  for (const auto& name : sig.roles) {
    RoleId r = o.pool->role(name);
    auto& pairs = out.roles[name];
    for (NodeHandle x : out.domain) {
      const auto& info = block.at(x);
      NodeHandle source = x;
      if (info.kind == TableauGraph::BlockInfo::Kind::Direct) source = info.blocker;
      for (auto& [y, roles] : g.out_edges(source)) {
        bool present = false;
        for (const auto& [role, dep] : *roles) {
          (void)dep;
          if (role == r) {
            present = true;
            break;
          }
        }
        if (!present) continue;
        if (!domain.count(y))
          throw std::logic_error("canonical_interpretation: edge into an excluded node");
        pairs.emplace(x, y);
      }
    }
  }
  return out;
}

std::vector<PrecEdge> prec_relation(const TableauGraph& g, const Ontology& o) {
  AtomicInterpretation ic = canonical_interpretation(g, o);
  std::vector<PrecEdge> edges;
  for (const auto& m : o.mbox) {
    auto h = g.individual(m.individual);
    if (!h) continue;
    NodeHandle x = g.find(*h);
    for (NodeHandle y : ic.concepts.at(m.concept_name)) edges.push_back({y, x});
  }
  return edges;
}

std::optional<std::vector<NodeHandle>> prec_cycle(const std::vector<PrecEdge>& edges) {
  // arcs x -> y: the value of x depends on the value of y
  std::map<NodeHandle, std::vector<NodeHandle>> adj;
  for (const auto& e : edges) adj[e.x].push_back(e.y);
  std::map<NodeHandle, int> color;
  std::vector<NodeHandle> stack;
  std::function<std::optional<std::vector<NodeHandle>>(NodeHandle)> visit =
      [&](NodeHandle n) -> std::optional<std::vector<NodeHandle>> {
    color[n] = 1;
    stack.push_back(n);
    for (NodeHandle next : adj[n]) {
      if (color[next] == 1) {
        auto it = std::find(stack.begin(), stack.end(), next);
        return std::vector<NodeHandle>(it, stack.end());
      }
      if (color[next] == 0) {
        if (auto c = visit(next)) return c;
      }
    }
    stack.pop_back();
    color[n] = 2;
    return std::nullopt;
  };
  for (const auto& [n, targets] : adj) {
    (void)targets;
    if (color[n] == 0) {
      if (auto c = visit(n)) return c;
    }
  }
  return std::nullopt;
}

SetOfBuilder::SetOfBuilder(const TableauGraph& g, const Ontology& o, NestedSetPoolPtr sets)
    : g_(g), o_(o), sets_(std::move(sets)), atomic_(canonical_interpretation(g, o)) {}

SetId SetOfBuilder::set_of(NodeHandle x) {
  x = g_.find(x);
  auto it = memo_.find(x);
  if (it != memo_.end()) {
    if (!it->second) throw std::logic_error("set_of: precedence relation is not well-founded");
    return *it->second;
  }
  memo_.emplace(x, std::nullopt);

  const std::string* ext_concept = nullptr;
  for (const auto& m : o_.mbox) {
    auto h = g_.individual(m.individual);
    if (!h || g_.find(*h) != x) continue;
    if (ext_concept) {
      // Several axioms collapse onto one node: their extensions must agree.
      if (atomic_.concepts.at(*ext_concept) != atomic_.concepts.at(m.concept_name))
        throw std::logic_error("set_of: conflicting meta-modelling extensions on one node");
      continue;
    }
    ext_concept = &m.concept_name;
  }

  SetId result;
  if (ext_concept) {
    std::vector<SetId> members;
    for (NodeHandle y : atomic_.concepts.at(*ext_concept)) members.push_back(set_of(y));
    result = sets_->make_set(std::move(members));
  } else {
    result = sets_->atom(model_atom_name(g_, x));
  }
  memo_[x] = result;
  return result;
}

Interpretation build_model(const TableauGraph& g, const Ontology& o) {
  AtomicInterpretation ic = canonical_interpretation(g, o);
  if (auto cycle = prec_cycle(prec_relation(g, o)))
    throw std::logic_error("build_model: precedence relation has a cycle");

  Interpretation out;
  out.sets = std::make_shared<NestedSetPool>();
  SetOfBuilder builder(g, o, out.sets);

  std::map<SetId, NodeHandle> inverse;
  std::map<NodeHandle, SetId> value;
  for (NodeHandle x : ic.domain) {
    SetId s = builder.set_of(x);
    auto [it, inserted] = inverse.emplace(s, x);
    if (!inserted && it->second != x)
      throw std::logic_error("build_model: set_of is not injective on the domain");
    value.emplace(x, s);
    out.domain.insert(s);
  }
  for (const auto& [name, x] : ic.individuals) out.individuals.emplace(name, value.at(x));
  for (const auto& [name, ext] : ic.concepts) {
    auto& target = out.concepts[name];
    for (NodeHandle x : ext) target.insert(value.at(x));
  }
  for (const auto& [name, pairs] : ic.roles) {
    auto& target = out.roles[name];
    for (const auto& [x, y] : pairs) target.emplace(value.at(x), value.at(y));
  }

  for (const auto& m : o.mbox) {
    const auto& ext = out.concepts.at(m.concept_name);
    SetId expected = out.sets->make_set({ext.begin(), ext.end()});
    if (out.individuals.at(m.individual) != expected)
      throw std::logic_error("build_model: meta-modelling equality broken for " + m.individual);
  }
  return out;
}

namespace {

class Evaluator {
 public:
  Evaluator(const Interpretation& i, const Ontology& o) : i_(i), o_(o) {}

  const std::set<SetId>& ext(ConceptId c) {
    auto it = memo_.find(c);
    if (it != memo_.end()) return it->second;
    std::set<SetId> result;
    const auto& n = o_.pool->node(c);
    switch (n.kind) {
      case ConceptKind::Atomic: {
        auto jt = i_.concepts.find(n.name);
        if (jt != i_.concepts.end()) result = jt->second;
        break;
      }
      case ConceptKind::Top:
        result = i_.domain;
        break;
      case ConceptKind::Bottom:
        break;
      case ConceptKind::Not: {
        const auto& inner = ext(n.left);
        for (SetId d : i_.domain)
          if (!inner.count(d)) result.insert(d);
        break;
      }
      case ConceptKind::And: {
        const auto& a = ext(n.left);
        const auto& b = ext(n.right);
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                              std::inserter(result, result.end()));
        break;
      }
      case ConceptKind::Or: {
        const auto& a = ext(n.left);
        const auto& b = ext(n.right);
        std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                       std::inserter(result, result.end()));
        break;
      }
      case ConceptKind::Forall: {
        const auto& inner = ext(n.left);
        for (SetId d : i_.domain) {
          bool all = true;
          for (SetId y : successors(n.role, d)) {
            if (!inner.count(y)) {
              all = false;
              break;
            }
          }
          if (all) result.insert(d);
        }
        break;
      }
      case ConceptKind::Exists: {
        const auto& inner = ext(n.left);
        for (SetId d : i_.domain) {
          for (SetId y : successors(n.role, d)) {
            if (inner.count(y)) {
              result.insert(d);
              break;
            }
          }
        }
        break;
      }
      case ConceptKind::AtLeast:
      case ConceptKind::AtMost: {
        const auto& inner = ext(n.left);
        for (SetId d : i_.domain) {
          std::size_t count = 0;
          for (SetId y : successors(n.role, d))
            if (inner.count(y)) ++count;
          bool in = n.kind == ConceptKind::AtLeast ? count >= n.number : count <= n.number;
          if (in) result.insert(d);
        }
        break;
      }
    }
    return memo_.emplace(c, std::move(result)).first->second;
  }

  const std::set<SetId>& successors(RoleId role, SetId d) {
    auto key = std::make_pair(role, d);
    auto it = succ_memo_.find(key);
    if (it != succ_memo_.end()) return it->second;
    std::set<SetId> out;
    auto jt = i_.roles.find(o_.pool->role_name(role));
    if (jt != i_.roles.end()) {
      for (const auto& [a, b] : jt->second)
        if (a == d) out.insert(b);
    }
    return succ_memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  const Interpretation& i_;
  const Ontology& o_;
  std::map<ConceptId, std::set<SetId>> memo_;
  std::map<std::pair<RoleId, SetId>, std::set<SetId>> succ_memo_;
};

}  // namespace

std::set<SetId> concept_extension(const Interpretation& i, const Ontology& o, ConceptId c) {
  Evaluator eval(i, o);
  return eval.ext(c);
}

std::vector<ModelViolation> check_model(const Interpretation& i, const Ontology& o) {
  std::vector<ModelViolation> out;
  const auto& p = *o.pool;

  for (const auto& [name, v] : i.individuals) {
    if (!i.domain.count(v))
      out.push_back({"individual " + name, "value outside the domain"});
  }
  for (const auto& [name, ext] : i.concepts) {
    for (SetId d : ext)
      if (!i.domain.count(d)) out.push_back({"concept " + name, "member outside the domain"});
  }
  for (const auto& [name, pairs] : i.roles) {
    for (const auto& [a, b] : pairs)
      if (!i.domain.count(a) || !i.domain.count(b))
        out.push_back({"role " + name, "pair endpoint outside the domain"});
  }

  Signature sig = o.signature();
  for (const auto& name : sig.individuals) {
    if (!i.individuals.count(name))
      out.push_back({"individual " + name, "no value assigned"});
  }
  if (!out.empty()) return out;

  Evaluator eval(i, o);
  for (const auto& ax : o.tbox) {
    const auto& lhs = eval.ext(ax.lhs);
    const auto& rhs = eval.ext(ax.rhs);
    for (SetId d : lhs) {
      if (!rhs.count(d)) {
        out.push_back({p.text(ax.lhs) + " SUBCLASSOF " + p.text(ax.rhs),
                       "element " + i.sets->text(d) + " is in the left side only"});
        break;
      }
    }
  }
  for (const auto& as : o.abox) {
    switch (as.kind) {
      case ABoxAssertion::Kind::Concept: {
        SetId v = i.individuals.at(as.a);
        if (!eval.ext(as.expr).count(v))
          out.push_back({p.text(as.expr) + "(" + as.a + ")", "assertion does not hold"});
        break;
      }
      case ABoxAssertion::Kind::Role: {
        SetId va = i.individuals.at(as.a), vb = i.individuals.at(as.b);
        const auto& pairs = i.roles.count(p.role_name(as.role))
                                ? i.roles.at(p.role_name(as.role))
                                : std::set<std::pair<SetId, SetId>>{};
        if (!pairs.count({va, vb}))
          out.push_back({p.role_name(as.role) + "(" + as.a + ", " + as.b + ")",
                         "pair missing from the role"});
        break;
      }
      case ABoxAssertion::Kind::Equal:
        if (i.individuals.at(as.a) != i.individuals.at(as.b))
          out.push_back({as.a + " = " + as.b, "values differ"});
        break;
      case ABoxAssertion::Kind::Different:
        if (i.individuals.at(as.a) == i.individuals.at(as.b))
          out.push_back({as.a + " != " + as.b, "values coincide"});
        break;
    }
  }
  for (const auto& m : o.mbox) {
    const auto& ext = eval.ext(o.pool->atomic(m.concept_name));
    SetId expected = i.sets->make_set({ext.begin(), ext.end()});
    if (i.individuals.at(m.individual) != expected)
      out.push_back({m.individual + " =m " + m.concept_name,
                     "individual value " + i.sets->text(i.individuals.at(m.individual)) +
                         " differs from concept extension " + i.sets->text(expected)});
  }
  return out;
}

std::string serialize_model(const Interpretation& i, const Ontology& o) {
  (void)o;
  std::ostringstream out;
  for (const auto& [name, v] : i.individuals) out << name << " := " << i.sets->text(v) << "\n";
  for (const auto& [name, ext] : i.concepts) {
    std::vector<std::string> members;
    for (SetId d : ext) members.push_back(i.sets->text(d));
    std::sort(members.begin(), members.end());
    out << name << " := {";
    for (std::size_t k = 0; k < members.size(); ++k) out << (k ? ", " : "") << members[k];
    out << "}\n";
  }
  for (const auto& [name, pairs] : i.roles) {
    std::vector<std::string> rendered;
    for (const auto& [a, b] : pairs)
      rendered.push_back("(" + i.sets->text(a) + ", " + i.sets->text(b) + ")");
    std::sort(rendered.begin(), rendered.end());
    out << name << " := {";
    for (std::size_t k = 0; k < rendered.size(); ++k) out << (k ? ", " : "") << rendered[k];
    out << "}\n";
  }
  out << "LEVEL " << i.level() << "\n";
  return out.str();
}

namespace {

// Minimal reader for the model format above.
class ModelReader {
 public:
  ModelReader(const std::string& line, int line_no) : s_(line), line_no_(line_no) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eof() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  bool try_char(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  SourceSpan here() const { return {line_no_, static_cast<int>(pos_) + 1, 1}; }

  std::optional<std::string> ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) return std::nullopt;
    return s_.substr(start, pos_ - start);
  }

  std::optional<SetId> set_literal(NestedSetPool& pool, std::vector<Diagnostic>& errors) {
    skip_ws();
    if (try_char('{')) {
      std::vector<SetId> members;
      skip_ws();
      if (!try_char('}')) {
        for (;;) {
          auto m = set_literal(pool, errors);
          if (!m) return std::nullopt;
          members.push_back(*m);
          if (try_char(',')) continue;
          if (try_char('}')) break;
          errors.push_back({"expected ',' or '}' in set literal", "", here()});
          return std::nullopt;
        }
      }
      return pool.make_set(std::move(members));
    }
    auto name = ident();
    if (!name) {
      errors.push_back({"expected atom name or '{'", "", here()});
      return std::nullopt;
    }
    return pool.atom(*name);
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
  int line_no_;
};

}  // namespace

ModelParseResult parse_model(const std::string& text, const Ontology& o) {
  ModelParseResult result;
  Interpretation interp;
  interp.sets = std::make_shared<NestedSetPool>();
  Signature sig = o.signature();
  std::optional<int> declared_level;
  std::set<std::string> defined;

  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    ModelReader r(line, line_no);
    if (r.eof()) continue;
    auto name = r.ident();
    if (!name) {
      result.errors.push_back({"expected a name", "", r.here()});
      continue;
    }
    if (*name == "LEVEL") {
      auto n = r.ident();
      if (!n) {
        result.errors.push_back({"expected level number", "", r.here()});
        continue;
      }
      declared_level = std::atoi(n->c_str());
      continue;
    }
    if (!r.try_char(':') || !r.try_char('=')) {
      result.errors.push_back({"expected ':=' after '" + *name + "'", "", r.here()});
      continue;
    }
    if (!defined.insert(*name).second) {
      result.errors.push_back({"duplicate definition of '" + *name + "'", "", r.here()});
      continue;
    }
    if (sig.individuals.count(*name)) {
      auto v = r.set_literal(*interp.sets, result.errors);
      if (v) interp.individuals.emplace(*name, *v);
    } else if (sig.concepts.count(*name)) {
      if (!r.try_char('{')) {
        result.errors.push_back({"expected '{' for concept extension", "", r.here()});
        continue;
      }
      auto& ext = interp.concepts[*name];
      if (!r.try_char('}')) {
        for (;;) {
          auto v = r.set_literal(*interp.sets, result.errors);
          if (!v) break;
          ext.insert(*v);
          if (r.try_char(',')) continue;
          if (r.try_char('}')) break;
          result.errors.push_back({"expected ',' or '}'", "", r.here()});
          break;
        }
      }
    } else if (sig.roles.count(*name)) {
      if (!r.try_char('{')) {
        result.errors.push_back({"expected '{' for role pairs", "", r.here()});
        continue;
      }
      auto& pairs = interp.roles[*name];
      if (!r.try_char('}')) {
        for (;;) {
          if (!r.try_char('(')) {
            result.errors.push_back({"expected '('", "", r.here()});
            break;
          }
          auto a = r.set_literal(*interp.sets, result.errors);
          if (!a || !r.try_char(',')) {
            result.errors.push_back({"expected ',' in role pair", "", r.here()});
            break;
          }
          auto b = r.set_literal(*interp.sets, result.errors);
          if (!b || !r.try_char(')')) {
            result.errors.push_back({"expected ')'", "", r.here()});
            break;
          }
          pairs.emplace(*a, *b);
          if (r.try_char(',')) continue;
          if (r.try_char('}')) break;
          result.errors.push_back({"expected ',' or '}'", "", r.here()});
          break;
        }
      }
    } else {
      result.errors.push_back({"'" + *name + "' is not a name of this ontology", "", r.here()});
    }
  }

  // implied domain
  for (const auto& [n, v] : interp.individuals) {
    (void)n;
    interp.domain.insert(v);
  }
  for (const auto& [n, ext] : interp.concepts) {
    (void)n;
    interp.domain.insert(ext.begin(), ext.end());
  }
  for (const auto& [n, pairs] : interp.roles) {
    (void)n;
    for (const auto& [a, b] : pairs) {
      interp.domain.insert(a);
      interp.domain.insert(b);
    }
  }

  if (declared_level && result.errors.empty() && *declared_level != interp.level()) {
    result.errors.push_back({"declared LEVEL " + std::to_string(*declared_level) +
                                 " does not match computed level " +
                                 std::to_string(interp.level()),
                             "", SourceSpan{line_no, 1, 0}});
  }
  if (result.errors.empty()) result.interpretation = std::move(interp);
  return result;
}

}  // namespace alcqm
