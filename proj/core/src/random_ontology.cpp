#include "alcqm/random_ontology.hpp"

#include <functional>
#include <random>

namespace alcqm {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : rng_(seed) {}
  // std::mt19937_64 output is fully specified, so results are stable across
  // platforms; distributions are hand-rolled for the same reason.
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
  int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
  bool chance(int percent) { return range(1, 100) <= percent; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

Ontology random_ontology(std::uint64_t seed, const GeneratorBounds& b) {
  Rng rng(seed);
  Ontology o;
  o.pool = std::make_shared<ConceptPool>();
  auto& p = *o.pool;

  int nc = rng.range(1, b.max_concepts);
  int nr = rng.range(0, b.max_roles);
  int ni = rng.range(0, b.max_individuals);

  auto concept_name = [&](int i) { return "C" + std::to_string(i); };
  auto role_name = [&](int i) { return "r" + std::to_string(i); };
  auto ind_name = [&](int i) { return "a" + std::to_string(i); };

  std::function<ConceptId(int)> gen = [&](int depth) -> ConceptId {
    int max_kind = (depth <= 1 || nr == 0) ? 2 : 9;
    switch (rng.range(0, max_kind)) {
      case 0:
      case 1:
        return p.atomic(concept_name(rng.range(0, nc - 1)));
      case 2:
        return rng.chance(50) ? p.top() : p.bottom();
      case 3:
        return p.negation(gen(depth - 1));
      case 4:
        return p.conj(gen(depth - 1), gen(depth - 1));
      case 5:
        return p.disj(gen(depth - 1), gen(depth - 1));
      case 6:
        return p.forall(p.role(role_name(rng.range(0, nr - 1))), gen(depth - 1));
      case 7:
        return p.exists(p.role(role_name(rng.range(0, nr - 1))), gen(depth - 1));
      case 8:
        return p.at_least(static_cast<std::uint32_t>(rng.range(0, static_cast<int>(b.max_number))),
                          p.role(role_name(rng.range(0, nr - 1))), gen(depth - 1));
      default:
        return p.at_most(static_cast<std::uint32_t>(rng.range(0, static_cast<int>(b.max_number))),
                         p.role(role_name(rng.range(0, nr - 1))), gen(depth - 1));
    }
  };

  int ntbox = rng.range(0, b.max_tbox);
  for (int i = 0; i < ntbox; ++i) {
    o.tbox.push_back({gen(b.max_depth), gen(b.max_depth)});
  }

  if (ni > 0) {
    int nabox = rng.range(0, b.max_abox);
    for (int i = 0; i < nabox; ++i) {
      int kind = rng.range(0, nr > 0 ? 3 : 2);
      std::string a = ind_name(rng.range(0, ni - 1));
      std::string c = ind_name(rng.range(0, ni - 1));
      switch (kind) {
        case 0:
          o.abox.push_back({ABoxAssertion::Kind::Concept, gen(rng.range(1, b.max_depth)), 0, a, ""});
          break;
        case 1:
          o.abox.push_back({ABoxAssertion::Kind::Equal, 0, 0, a, c});
          break;
        case 2:
          o.abox.push_back({ABoxAssertion::Kind::Different, 0, 0, a, c});
          break;
        default:
          o.abox.push_back({ABoxAssertion::Kind::Role, 0,
                            p.role(role_name(rng.range(0, nr - 1))), a, c});
          break;
      }
    }
    int nmbox = rng.range(0, b.max_mbox);
    for (int i = 0; i < nmbox; ++i) {
      o.mbox.push_back({ind_name(rng.range(0, ni - 1)), concept_name(rng.range(0, nc - 1))});
    }
  }
  return o;
}

}  // namespace alcqm
