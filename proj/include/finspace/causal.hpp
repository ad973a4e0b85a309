#ifndef FINSPACE_CAUSAL_HPP_
#define FINSPACE_CAUSAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "finspace/finite_space.hpp"
#include "finspace/graphs.hpp"
#include "finspace/homotopy.hpp"

namespace finspace {

inline constexpr double kCptRowTolerance = 1e-12;
inline constexpr double kDefaultCiTolerance = 1e-9;
inline constexpr std::size_t kMaxJointEntries = 10'000'000;

/// Conditional probability table of one variable. Parents are stored as
/// ascending element indices; `table` holds one row per parent assignment
/// (mixed radix, first parent most significant), each row a distribution
/// over the variable's domain.
struct Cpt {
  std::vector<std::size_t> parents;
  std::vector<std::vector<double>> table;
};

/// Finite-domain structural causal model over a T0 space. The mechanism of
/// each variable conditions exactly on its Hasse parents (covers above it
/// under the descendant order), the direct causes.
class DiscreteCausalModel {
 public:
  DiscreteCausalModel(FiniteSpace space,
                      std::map<std::string, std::vector<std::string>> domains,
                      std::map<std::string, Cpt> mechanisms)
      : space_(std::move(space)) {
    if (!is_t0(space_)) throw input_error("model space must be T0");
    domains_.resize(space_.size());
    cpts_.resize(space_.size());
    for (std::size_t v = 0; v < space_.size(); ++v) {
      auto dit = domains.find(space_.element(v));
      if (dit == domains.end() || dit->second.empty())
        throw input_error("missing domain for " + space_.element(v));
      domains_[v] = dit->second;
      auto mit = mechanisms.find(space_.element(v));
      if (mit == mechanisms.end())
        throw input_error("missing mechanism for " + space_.element(v));
      cpts_[v] = mit->second;
      validate_cpt(v);
    }
  }

  const FiniteSpace& space() const { return space_; }
  std::size_t num_vars() const { return space_.size(); }
  const std::vector<std::string>& domain(std::size_t v) const {
    return domains_[v];
  }
  const Cpt& cpt(std::size_t v) const { return cpts_[v]; }

  std::size_t value_index(std::size_t v, const std::string& value) const {
    for (std::size_t i = 0; i < domains_[v].size(); ++i)
      if (domains_[v][i] == value) return i;
    throw input_error("value " + value + " not in domain of " +
                      space_.element(v));
  }

  /// P(var = value-index | parent values), parent values drawn from a full
  /// assignment.
  double mechanism_prob(std::size_t v,
                        const std::vector<std::size_t>& assignment,
                        std::size_t value) const {
    const Cpt& c = cpts_[v];
    std::size_t row = 0;
    for (std::size_t p : c.parents)
      row = row * domains_[p].size() + assignment[p];
    return c.table[row][value];
  }

  /// Variables ordered causes-first (every Hasse parent precedes its child).
  std::vector<std::size_t> causal_order() const {
    std::vector<std::size_t> order;
    std::vector<bool> done(num_vars(), false);
    auto visit = [&](auto&& self, std::size_t v) -> void {
      if (done[v]) return;
      done[v] = true;
      for (std::size_t p : cpts_[v].parents) self(self, p);
      order.push_back(v);
    };
    for (std::size_t v = 0; v < num_vars(); ++v) visit(visit, v);
    return order;
  }

  /// Ancestral forward sample; returns value indices per variable.
  std::vector<std::size_t> sample(std::mt19937_64& rng) const {
    std::vector<std::size_t> order = causal_order();
    std::vector<std::size_t> assignment(num_vars(), 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t v : order) {
      double r = unit(rng);
      double acc = 0.0;
      std::size_t value = domains_[v].size() - 1;
      for (std::size_t k = 0; k < domains_[v].size(); ++k) {
        acc += mechanism_prob(v, assignment, k);
        if (r < acc) { value = k; break; }
      }
      assignment[v] = value;
    }
    return assignment;
  }

 private:
  void validate_cpt(std::size_t v) {
    Cpt& c = cpts_[v];
    std::sort(c.parents.begin(), c.parents.end());
    Mask parent_mask = 0;
    for (std::size_t p : c.parents) {
      if (p >= num_vars()) throw input_error("parent index out of range");
      parent_mask |= bit(p);
    }
    if (parent_mask != detail::covers_above(space_, v))
      throw input_error("mechanism of " + space_.element(v) +
                        " must condition exactly on its direct causes");
    std::size_t rows = 1;
    for (std::size_t p : c.parents) rows *= domains_[p].size();
    if (c.table.size() != rows)
      throw input_error("CPT of " + space_.element(v) +
                        " has wrong number of rows");
    for (const auto& row : c.table) {
      if (row.size() != domains_[v].size())
        throw input_error("CPT row width mismatch for " + space_.element(v));
      double sum = 0.0;
      for (double p : row) {
        if (p < 0.0) throw input_error("negative CPT entry");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kCptRowTolerance)
        throw input_error("CPT row of " + space_.element(v) +
                          " does not sum to 1");
    }
  }

  FiniteSpace space_;
  std::vector<std::vector<std::string>> domains_;
  std::vector<Cpt> cpts_;
};

/// Exact distribution over all variables, assignment-indexed in
/// lexicographic order (variable 0 most significant).
struct JointDistribution {
  std::vector<std::string> vars;
  std::vector<std::size_t> card;
  std::vector<double> probs;

  std::size_t index_of(const std::vector<std::size_t>& assignment) const {
    std::size_t idx = 0;
    for (std::size_t v = 0; v < vars.size(); ++v)
      idx = idx * card[v] + assignment[v];
    return idx;
  }

  void decode(std::size_t idx, std::vector<std::size_t>& assignment) const {
    assignment.resize(vars.size());
    for (std::size_t v = vars.size(); v-- > 0;) {
      assignment[v] = idx % card[v];
      idx /= card[v];
    }
  }
};

inline JointDistribution joint(const DiscreteCausalModel& model) {
  JointDistribution j;
  j.vars = model.space().elements();
  std::size_t total = 1;
  for (std::size_t v = 0; v < model.num_vars(); ++v) {
    j.card.push_back(model.domain(v).size());
    if (total > kMaxJointEntries / j.card.back())
      throw input_error("joint distribution exceeds entry cap");
    total *= j.card.back();
  }
  j.probs.assign(total, 0.0);
  std::vector<std::size_t> assignment(model.num_vars(), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    j.decode(idx, assignment);
    double p = 1.0;
    for (std::size_t v = 0; v < model.num_vars() && p > 0.0; ++v)
      p *= model.mechanism_prob(v, assignment, assignment[v]);
    j.probs[idx] = p;
  }
  return j;
}

/// Intervention target: either a fixed domain value or an explicit
/// distribution over the variable's domain.
using InterventionValue = std::variant<std::string, std::vector<double>>;

struct Intervention {
  std::map<std::string, InterventionValue> targets;
};

namespace detail {

/// Re-express a CPT's parent indices in a new space, permuting rows when
/// the ascending-index order of the parents changes.
inline Cpt remap_cpt(const DiscreteCausalModel& model, std::size_t v,
                     const FiniteSpace& new_space) {
  const FiniteSpace& old_space = model.space();
  const Cpt& old_cpt = model.cpt(v);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (new idx, old pos)
  for (std::size_t pos = 0; pos < old_cpt.parents.size(); ++pos)
    pairs.emplace_back(
        new_space.index_of(old_space.element(old_cpt.parents[pos])), pos);
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::size_t> old_card;
  for (std::size_t p : old_cpt.parents)
    old_card.push_back(model.domain(p).size());
  Cpt out;
  for (const auto& [idx, pos] : pairs) out.parents.push_back(idx);
  out.table.resize(old_cpt.table.size());
  std::vector<std::size_t> values(old_cpt.parents.size(), 0);
  for (std::size_t row = 0; row < old_cpt.table.size(); ++row) {
    std::size_t r = row;
    for (std::size_t pos = old_cpt.parents.size(); pos-- > 0;) {
      values[pos] = r % old_card[pos];
      r /= old_card[pos];
    }
    std::size_t new_row = 0;
    for (const auto& [idx, pos] : pairs)
      new_row = new_row * old_card[pos] + values[pos];
    out.table[new_row] = old_cpt.table[row];
  }
  return out;
}

}  // namespace detail

/// do-intervention: targets get parentless mechanisms and lose their
/// in-edges; the space is rebuilt from the pruned Hasse DAG.
inline DiscreteCausalModel intervene(const DiscreteCausalModel& model,
                                     const Intervention& intervention) {
  const FiniteSpace& space = model.space();
  Dag hasse = space_to_dag(space);
  for (const auto& [target, value] : intervention.targets) {
    space.index_of(target);  // validates the name
    for (auto it = hasse.edges.begin(); it != hasse.edges.end();)
      it = (it->second == target) ? hasse.edges.erase(it) : std::next(it);
  }
  FiniteSpace new_space = dag_to_space(hasse);

  std::map<std::string, std::vector<std::string>> domains;
  std::map<std::string, Cpt> mechanisms;
  for (std::size_t v = 0; v < model.num_vars(); ++v) {
    const std::string& name = space.element(v);
    domains[name] = model.domain(v);
    auto it = intervention.targets.find(name);
    if (it == intervention.targets.end()) {
      mechanisms[name] = detail::remap_cpt(model, v, new_space);
    } else {
      Cpt c;
      std::vector<double> dist(model.domain(v).size(), 0.0);
      if (std::holds_alternative<std::string>(it->second)) {
        dist[model.value_index(v, std::get<std::string>(it->second))] = 1.0;
      } else {
        dist = std::get<std::vector<double>>(it->second);
        if (dist.size() != model.domain(v).size())
          throw input_error("intervention distribution width mismatch");
      }
      c.table.push_back(std::move(dist));
      mechanisms[name] = std::move(c);
    }
  }
  return DiscreteCausalModel(std::move(new_space), std::move(domains),
                             std::move(mechanisms));
}

/// Uniform randomization of every variable in `targets`.
inline Intervention randomize_uniform(const DiscreteCausalModel& model,
                                      const std::vector<std::string>& targets) {
  Intervention iv;
  for (const auto& t : targets) {
    std::size_t v = model.space().index_of(t);
    std::vector<double> uniform(model.domain(v).size(),
                                1.0 / model.domain(v).size());
    iv.targets[t] = uniform;
  }
  return iv;
}

// ---------------------------------------------------------------------------
// Topological conditional independence (d-separation over fences).
// ---------------------------------------------------------------------------

/// An unblocked fence, if one exists: a simple path in the Hasse cover
/// graph from U to V on which every interior non-collider avoids Z and
/// every interior collider has min_open (itself plus descendants)
/// meeting Z.
inline std::optional<std::vector<std::string>> tci_witness(
    const FiniteSpace& space, const std::vector<std::string>& u_names,
    const std::vector<std::string>& v_names,
    const std::vector<std::string>& z_names) {
  if (!is_t0(space)) throw precondition_error("tci requires a T0 space");
  Mask u = space.mask_of(u_names);
  Mask v = space.mask_of(v_names);
  Mask z = space.mask_of(z_names);
  if ((u & v) != 0 || (u & z) != 0 || (v & z) != 0)
    throw input_error("tci sets must be pairwise disjoint");

  const std::size_t n = space.size();
  std::vector<Mask> below(n);
  for (std::size_t x = 0; x < n; ++x)
    below[x] = detail::covers_below(space, x);

  std::vector<std::size_t> path;
  Mask on_path = 0;
  std::optional<std::vector<std::string>> witness;

  auto dfs = [&](auto&& self, std::size_t cur) -> bool {
    if (contains(v, cur)) {
      std::vector<std::string> fence;
      for (std::size_t x : path) fence.push_back(space.element(x));
      witness = std::move(fence);
      return true;
    }
    Mask neighbors =
        (below[cur] | detail::covers_above(space, cur)) & ~on_path;
    bool found = false;
    for_each_bit(neighbors, [&](std::size_t next) {
      if (found) return;
      // Extending ... prev, cur -> next makes cur an interior vertex.
      if (path.size() >= 2) {
        std::size_t prev = path[path.size() - 2];
        bool collider =
            contains(below[prev], cur) && contains(below[next], cur);
        bool open = collider ? (space.min_open_mask(cur) & z) != 0
                             : !contains(z, cur);
        if (!open) return;
      }
      path.push_back(next);
      on_path |= bit(next);
      if (self(self, next)) found = true;
      on_path &= ~bit(next);
      path.pop_back();
    });
    return found;
  };

  bool connected = false;
  for_each_bit(u, [&](std::size_t start) {
    if (connected) return;
    path.assign(1, start);
    on_path = bit(start);
    if (dfs(dfs, start)) connected = true;
  });
  return connected ? witness : std::nullopt;
}

/// True iff every fence from U to V is topologically blocked given Z.
inline bool tci(const FiniteSpace& space, const std::vector<std::string>& u,
                const std::vector<std::string>& v,
                const std::vector<std::string>& z) {
  return !tci_witness(space, u, v, z).has_value();
}

// ---------------------------------------------------------------------------
// Exact conditional independence on joints.
// ---------------------------------------------------------------------------

/// U independent of V given Z in the exact joint: for every z with
/// P(z) > 0, the total-variation gap between P(U,V|z) and P(U|z) P(V|z)
/// is at most tol. Zero-mass conditioning slices are skipped.
inline bool ci_exact(const JointDistribution& j,
                     const std::vector<std::string>& u_names,
                     const std::vector<std::string>& v_names,
                     const std::vector<std::string>& z_names,
                     double tol = kDefaultCiTolerance) {
  auto var_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < j.vars.size(); ++i)
      if (j.vars[i] == name) return i;
    throw input_error("unknown variable: " + name);
  };
  std::vector<std::size_t> u, v, z;
  for (const auto& n : u_names) u.push_back(var_index(n));
  for (const auto& n : v_names) v.push_back(var_index(n));
  for (const auto& n : z_names) z.push_back(var_index(n));

  auto key = [](const std::vector<std::size_t>& idxs,
                const std::vector<std::size_t>& assignment) {
    std::size_t k = 0;
    for (std::size_t i : idxs) k = k * 64 + assignment[i] + 1;
    return k;
  };

  std::map<std::size_t, std::map<std::pair<std::size_t, std::size_t>, double>>
      puvz;
  std::map<std::size_t, std::map<std::size_t, double>> puz, pvz;
  std::map<std::size_t, double> pz;
  std::vector<std::size_t> assignment;
  for (std::size_t idx = 0; idx < j.probs.size(); ++idx) {
    double p = j.probs[idx];
    if (p == 0.0) continue;
    j.decode(idx, assignment);
    std::size_t kz = key(z, assignment);
    std::size_t ku = key(u, assignment);
    std::size_t kv = key(v, assignment);
    puvz[kz][{ku, kv}] += p;
    puz[kz][ku] += p;
    pvz[kz][kv] += p;
    pz[kz] += p;
  }
  for (const auto& [kz, mass] : pz) {
    if (mass <= 0.0) continue;
    double tv = 0.0;
    for (const auto& [ku, pu] : puz[kz]) {
      for (const auto& [kv, pv] : pvz[kz]) {
        double joint_slice = 0.0;
        auto it = puvz[kz].find({ku, kv});
        if (it != puvz[kz].end()) joint_slice = it->second / mass;
        tv += std::abs(joint_slice - (pu / mass) * (pv / mass));
      }
    }
    if (tv / 2.0 > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Faithfulness.
// ---------------------------------------------------------------------------

struct FaithfulnessViolation {
  std::string u, v;
  std::vector<std::string> z;
  bool tci_holds;
  bool ci_holds;
};

struct FaithfulnessReport {
  bool faithful = true;
  std::vector<FaithfulnessViolation> violations;
};

/// Checks tci <=> ci_exact over all singleton pairs and all conditioning
/// subsets of the remaining variables.
inline FaithfulnessReport is_faithful(const DiscreteCausalModel& model,
                                      double tol = kDefaultCiTolerance) {
  if (model.num_vars() > 7)
    throw input_error("faithfulness check capped at 7 variables");
  FaithfulnessReport report;
  JointDistribution j = joint(model);
  const auto& names = model.space().elements();
  const std::size_t n = names.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      Mask rest = model.space().universe() & ~bit(a) & ~bit(b);
      for (Mask zm = 0;; zm = (zm - rest) & rest) {
        std::vector<std::string> z;
        for_each_bit(zm, [&](std::size_t i) { z.push_back(names[i]); });
        bool t = tci(model.space(), {names[a]}, {names[b]}, z);
        bool c = ci_exact(j, {names[a]}, {names[b]}, z, tol);
        if (t != c) {
          report.faithful = false;
          report.violations.push_back({names[a], names[b], z, t, c});
        }
        if (zm == rest) break;
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Recursive causality and closed-loop solving.
// ---------------------------------------------------------------------------

/// Deterministic mechanism: value of a variable from a full assignment and
/// a per-variable noise value. `depends_on` declares the dependency graph.
struct FunctionalMechanism {
  std::vector<std::string> depends_on;
  std::function<std::string(const std::map<std::string, std::string>&,
                            const std::string&)>
      fn;
};

struct FunctionalModel {
  std::vector<std::string> variables;
  std::map<std::string, std::vector<std::string>> domains;
  std::map<std::string, FunctionalMechanism> mechanisms;
};

/// Acyclicity of the declared dependency graph.
inline bool is_recursive(const FunctionalModel& m) {
  std::map<std::string, int> state;  // 0 new, 1 open, 2 done
  bool acyclic = true;
  auto dfs = [&](auto&& self, const std::string& v) -> void {
    state[v] = 1;
    auto it = m.mechanisms.find(v);
    if (it != m.mechanisms.end()) {
      for (const auto& dep : it->second.depends_on) {
        int s = state.count(dep) ? state[dep] : 0;
        if (s == 1) { acyclic = false; return; }
        if (s == 0) self(self, dep);
        if (!acyclic) return;
      }
    }
    state[v] = 2;
  };
  for (const auto& v : m.variables)
    if ((state.count(v) ? state[v] : 0) == 0) dfs(dfs, v);
  return acyclic;
}

/// Models built on a FiniteSpace are recursive by construction; the check
/// runs anyway over the mechanism parent graph.
inline bool is_recursive(const DiscreteCausalModel& m) {
  FunctionalModel fm;
  fm.variables = m.space().elements();
  for (std::size_t v = 0; v < m.num_vars(); ++v) {
    FunctionalMechanism mech;
    for (std::size_t p : m.cpt(v).parents)
      mech.depends_on.push_back(m.space().element(p));
    fm.mechanisms[m.space().element(v)] = std::move(mech);
  }
  return is_recursive(fm);
}

enum class SolveStatus { unique, none, multiple };

struct SolveResult {
  SolveStatus status = SolveStatus::none;
  std::optional<std::map<std::string, std::string>> assignment;
};

/// Fixed-point search over all joint assignments for the closed-loop
/// equations x = f_x(assignment, noise_x).
inline SolveResult solve_closed_loop(
    const FunctionalModel& m, const std::map<std::string, std::string>& noise) {
  std::size_t total = 1;
  for (const auto& v : m.variables) {
    auto it = m.domains.find(v);
    if (it == m.domains.end() || it->second.empty())
      throw input_error("missing domain for " + v);
    if (total > 1'000'000 / it->second.size())
      throw input_error("closed-loop search exceeds assignment cap");
    total *= it->second.size();
  }
  SolveResult result;
  std::vector<std::size_t> values(m.variables.size(), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (std::size_t v = m.variables.size(); v-- > 0;) {
      const auto& dom = m.domains.at(m.variables[v]);
      values[v] = r % dom.size();
      r /= dom.size();
    }
    std::map<std::string, std::string> assignment;
    for (std::size_t v = 0; v < m.variables.size(); ++v)
      assignment[m.variables[v]] = m.domains.at(m.variables[v])[values[v]];
    bool fixed_point = true;
    for (const auto& v : m.variables) {
      const auto& mech = m.mechanisms.at(v);
      std::string noise_v = noise.count(v) ? noise.at(v) : "";
      if (mech.fn(assignment, noise_v) != assignment[v]) {
        fixed_point = false;
        break;
      }
    }
    if (fixed_point) {
      if (result.assignment) {
        result.status = SolveStatus::multiple;
        result.assignment.reset();
        return result;
      }
      result.status = SolveStatus::unique;
      result.assignment = std::move(assignment);
    }
  }
  return result;
}

}  // namespace finspace

#endif  // FINSPACE_CAUSAL_HPP_
