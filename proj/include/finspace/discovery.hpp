#ifndef FINSPACE_DISCOVERY_HPP_
#define FINSPACE_DISCOVERY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "finspace/causal.hpp"
#include "finspace/finite_space.hpp"
#include "finspace/graphs.hpp"
#include "finspace/homotopy.hpp"

namespace finspace {

struct InterventionFamily {
  std::vector<std::vector<std::string>> sets;
};

/// Multiset of observed event-subsets with occurrence counts.
struct GenotypeDataset {
  std::vector<std::string> events;
  std::vector<std::pair<std::set<std::string>, std::size_t>> genotypes;
};

struct LearnedPoset {
  FiniteSpace space;  // transitively closed T0 relation
  // Evidence per recorded ancestor pair (above, below).
  std::map<std::pair<std::string, std::string>, std::string> provenance;
  std::size_t interventions_performed = 0;
  std::vector<std::string> warnings;
};

struct OracleMode {
  bool sampled = false;
  std::size_t num_samples = 20000;
  double alpha = 0.01;
  std::uint64_t seed = 1;

  static OracleMode exact() { return OracleMode{}; }
  static OracleMode sampled_mode(std::size_t n, double alpha,
                                 std::uint64_t seed = 1) {
    return OracleMode{true, n, alpha, seed};
  }
};

namespace detail {

// Regularized upper incomplete gamma Q(a, x), series/continued-fraction
// split at x = a + 1.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw input_error("gamma_q domain error");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    double sum = 1.0 / a, term = sum, ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double chi_squared_upper_tail(double stat, std::size_t df) {
  if (df == 0) return 1.0;
  return gamma_q(df / 2.0, stat / 2.0);
}

/// G-test p-value for independence in an r-by-c contingency table.
inline double g_test_p_value(const std::vector<std::vector<std::uint64_t>>& obs) {
  std::size_t rows = obs.size(), cols = rows ? obs[0].size() : 0;
  std::vector<double> row_total(rows, 0.0), col_total(cols, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      row_total[r] += obs[r][c];
      col_total[c] += obs[r][c];
      total += obs[r][c];
    }
  if (total == 0.0) return 1.0;
  double g = 0.0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (obs[r][c] == 0) continue;
      double expected = row_total[r] * col_total[c] / total;
      g += 2.0 * obs[r][c] * std::log(obs[r][c] / expected);
    }
  std::size_t df = (rows > 1 && cols > 1) ? (rows - 1) * (cols - 1) : 0;
  return chi_squared_upper_tail(g, df);
}

/// Space from a transitively-closed strict "above" relation. above[x] is
/// the mask of elements strictly below x (x's descendants), so
/// min_open(x) = descendants(x) | {x}.
inline FiniteSpace space_from_descendants(const std::vector<std::string>& names,
                                          std::vector<Mask> descendants) {
  std::vector<Mask> opens(names.size());
  for (std::size_t x = 0; x < names.size(); ++x)
    opens[x] = descendants[x] | bit(x);
  return FiniteSpace::from_min_open(names, std::move(opens));
}

inline void transitive_close(std::vector<Mask>& rel) {
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t x = 0; x < rel.size(); ++x) {
      Mask m = rel[x];
      for_each_bit(rel[x], [&](std::size_t y) { m |= rel[y]; });
      if (m != rel[x]) { rel[x] = m; grew = true; }
    }
  }
}

/// Marginal dependence oracle for one post-interventional model. Exact
/// mode answers from d-separation on the intervened space; sampled mode
/// forward-samples once and G-tests pairwise tables at the supplied
/// per-test significance.
class DependenceOracle {
 public:
  DependenceOracle(const DiscreteCausalModel& intervened,
                   const OracleMode& mode, double per_test_alpha,
                   std::mt19937_64& rng)
      : model_(intervened), mode_(mode), per_test_alpha_(per_test_alpha) {
    if (mode_.sampled) {
      samples_.reserve(mode_.num_samples);
      for (std::size_t i = 0; i < mode_.num_samples; ++i)
        samples_.push_back(model_.sample(rng));
    }
  }

  bool dependent(const std::string& a, const std::string& b) const {
    if (!mode_.sampled)
      return !tci(model_.space(), {a}, {b}, {});
    std::size_t ia = model_.space().index_of(a);
    std::size_t ib = model_.space().index_of(b);
    std::vector<std::vector<std::uint64_t>> obs(
        model_.domain(ia).size(),
        std::vector<std::uint64_t>(model_.domain(ib).size(), 0));
    for (const auto& s : samples_) ++obs[s[ia]][s[ib]];
    return g_test_p_value(obs) < per_test_alpha_;
  }

 private:
  const DiscreteCausalModel& model_;
  OracleMode mode_;
  double per_test_alpha_;
  std::vector<std::vector<std::size_t>> samples_;
};

}  // namespace detail

/// The closed topogenous rows F_x = {x} + ancestors(x) of a T0 space, one
/// per element. Intervening on F_x leaves every cause-to-descendant path
/// out of x intact, which is what makes exact recovery possible.
inline InterventionFamily ancestral_intervention_family(const FiniteSpace& s) {
  InterventionFamily family;
  for (std::size_t x = 0; x < s.size(); ++x)
    family.sets.push_back(s.names_of(s.min_closed_mask(x)));
  return family;
}

/// Poset discovery from interventions (one per family set) and a marginal
/// dependence oracle. Dependence of f on an intervened e is evidence that
/// f is a descendant of e; the recorded relation is transitively closed.
/// The sampled oracle splits alpha across all tests of the run (Bonferroni)
/// so that alpha bounds the family-wise false-positive rate.
inline LearnedPoset learn_poset_interventional(const DiscreteCausalModel& truth,
                                               const InterventionFamily& family,
                                               const OracleMode& mode) {
  const FiniteSpace& space = truth.space();
  LearnedPoset out;
  if (!is_separating_system(family.sets, space.elements()))
    out.warnings.push_back(
        "intervention family is not a separating system; recovery may be "
        "partial");

  std::size_t num_tests = 0;
  for (const auto& g : family.sets) {
    if (g.empty()) throw input_error("empty intervention set");
    num_tests += g.size() * (space.size() - g.size());
  }
  double per_test_alpha =
      num_tests > 0 ? mode.alpha / static_cast<double>(num_tests) : mode.alpha;

  std::mt19937_64 rng(mode.seed);
  std::vector<Mask> descendants(space.size(), 0);
  for (const auto& g : family.sets) {
    DiscreteCausalModel intervened = intervene(truth, randomize_uniform(truth, g));
    detail::DependenceOracle oracle(intervened, mode, per_test_alpha, rng);
    ++out.interventions_performed;
    Mask g_mask = space.mask_of(g);
    for (const auto& e : g) {
      std::size_t ie = space.index_of(e);
      for (std::size_t f = 0; f < space.size(); ++f) {
        if (contains(g_mask, f)) continue;
        if (oracle.dependent(e, space.element(f))) {
          descendants[ie] |= bit(f);
          out.provenance[{e, space.element(f)}] =
              "dependent under intervention on {" + [&] {
                std::string s;
                for (const auto& m : g) s += (s.empty() ? "" : ",") + m;
                return s;
              }() + "}";
        }
      }
    }
  }
  detail::transitive_close(descendants);

  // Sampling noise can create mutual pairs; quotient them away.
  bool antisymmetric = true;
  for (std::size_t x = 0; x < space.size() && antisymmetric; ++x)
    for_each_bit(descendants[x], [&](std::size_t y) {
      if (contains(descendants[y], x)) antisymmetric = false;
    });
  FiniteSpace learned =
      detail::space_from_descendants(space.elements(), descendants);
  if (!antisymmetric) {
    out.warnings.push_back("cyclic evidence found; merged by T0 quotient");
    learned = t0_quotient(learned).first;
  }
  out.space = std::move(learned);
  return out;
}

/// Observable-DAG discovery by intervening on each level antichain of the
/// true order (supplied by the truth model). Returns the transitive
/// reduction of the recorded descendant pairs.
inline std::pair<Dag, std::size_t> learn_dag_antichain(
    const DiscreteCausalModel& truth, const OracleMode& mode) {
  const FiniteSpace& space = truth.space();
  auto levels = antichain_partition(space);
  std::size_t num_tests = 0;
  for (const auto& level : levels)
    num_tests += level.size() * (space.size() - level.size());
  double per_test_alpha =
      num_tests > 0 ? mode.alpha / static_cast<double>(num_tests) : mode.alpha;

  std::mt19937_64 rng(mode.seed);
  Dag recorded;
  recorded.vertices = space.elements();
  std::size_t interventions = 0;
  for (const auto& level : levels) {
    DiscreteCausalModel intervened =
        intervene(truth, randomize_uniform(truth, level));
    detail::DependenceOracle oracle(intervened, mode, per_test_alpha, rng);
    ++interventions;
    Mask level_mask = space.mask_of(level);
    for (const auto& x : level)
      for (std::size_t y = 0; y < space.size(); ++y)
        if (!contains(level_mask, y) && oracle.dependent(x, space.element(y)))
          recorded.edges.emplace(x, space.element(y));
  }
  return {transitive_reduction(recorded), interventions};
}

/// Observational poset fit: e is placed above f iff every support genotype
/// containing f also contains e. Events with identical occurrence patterns
/// merge into one class named after the lexicographically smallest member.
inline LearnedPoset learn_poset_genotypes(const GenotypeDataset& data) {
  if (data.genotypes.empty()) throw input_error("empty genotype support");
  const std::size_t n = data.events.size();
  if (n > kMaxElements) throw input_error("too many events (cap 64)");
  std::vector<Mask> below(n, 0);  // below[e] = events e is above
  for (std::size_t e = 0; e < n; ++e) {
    for (std::size_t f = 0; f < n; ++f) {
      if (e == f) continue;
      bool prerequisite = true;
      for (const auto& [genotype, count] : data.genotypes) {
        if (genotype.count(data.events[f]) &&
            !genotype.count(data.events[e])) {
          prerequisite = false;
          break;
        }
      }
      if (prerequisite) below[e] |= bit(f);
    }
  }
  detail::transitive_close(below);

  LearnedPoset out;
  for (std::size_t e = 0; e < n; ++e)
    for_each_bit(below[e], [&](std::size_t f) {
      if (!contains(below[f], e))
        out.provenance[{data.events[e], data.events[f]}] =
            "every genotype with " + data.events[f] + " contains " +
            data.events[e];
    });

  FiniteSpace preorder = detail::space_from_descendants(data.events, below);
  out.space = is_t0(preorder) ? preorder : t0_quotient(preorder).first;
  return out;
}

/// Event pairs no support genotype separates; empty iff the induced event
/// topology is T0.
inline std::vector<std::pair<std::string, std::string>> separability_check(
    const GenotypeDataset& data) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t e = 0; e < data.events.size(); ++e) {
    for (std::size_t f = e + 1; f < data.events.size(); ++f) {
      bool separated = false;
      for (const auto& [genotype, count] : data.genotypes) {
        if (genotype.count(data.events[e]) != genotype.count(data.events[f])) {
          separated = true;
          break;
        }
      }
      if (!separated) out.emplace_back(data.events[e], data.events[f]);
    }
  }
  return out;
}

enum class FamilyLabel {
  trivial,
  singleton_closed,
  partition,
  strongly_separating,
  separating,
  other
};

inline const char* to_string(FamilyLabel l) {
  switch (l) {
    case FamilyLabel::trivial: return "trivial";
    case FamilyLabel::singleton_closed: return "singleton_closed";
    case FamilyLabel::partition: return "partition";
    case FamilyLabel::strongly_separating: return "strongly_separating";
    case FamilyLabel::separating: return "separating";
    case FamilyLabel::other: return "other";
  }
  return "?";
}

struct FamilyClassification {
  FamilyLabel label = FamilyLabel::other;
  bool trivial = false;
  bool partition = false;
  bool singleton_closed = false;
  bool separating = false;
  bool strongly_separating = false;
};

/// Classifies an intervention family per the separation structure it
/// imposes; the most specific flag becomes the label.
inline FamilyClassification classify_intervention_topology(
    const InterventionFamily& family,
    const std::vector<std::string>& universe) {
  auto masks = detail::family_masks(family.sets, universe);
  Mask all = universe.size() == kMaxElements
                 ? ~Mask{0}
                 : (Mask{1} << universe.size()) - 1;
  FamilyClassification c;
  c.trivial = true;
  for (Mask m : masks)
    if (m != 0 && m != all) c.trivial = false;

  c.partition = !masks.empty();
  for (Mask m : masks) {
    if (std::find(masks.begin(), masks.end(), all & ~m) == masks.end()) {
      c.partition = false;
      break;
    }
  }

  Mask covered = 0;
  c.singleton_closed = !masks.empty();
  for (Mask m : masks) {
    if (popcount(m) != 1) c.singleton_closed = false;
    covered |= m;
  }
  if (covered != all) c.singleton_closed = false;

  c.separating = is_separating_system(family.sets, universe);
  c.strongly_separating = is_strongly_separating(family.sets, universe);

  if (c.trivial) c.label = FamilyLabel::trivial;
  else if (c.singleton_closed) c.label = FamilyLabel::singleton_closed;
  else if (c.partition) c.label = FamilyLabel::partition;
  else if (c.strongly_separating) c.label = FamilyLabel::strongly_separating;
  else if (c.separating) c.label = FamilyLabel::separating;
  else c.label = FamilyLabel::other;
  return c;
}

}  // namespace finspace

#endif  // FINSPACE_DISCOVERY_HPP_
