// Shared generators and independent oracles for the test suite. Everything
// here is deliberately written against the definitions, not against the
// library internals, so the two routes stay independent.
#ifndef FINSPACE_TEST_SUPPORT_HPP_
#define FINSPACE_TEST_SUPPORT_HPP_

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "finspace/causal.hpp"
#include "finspace/finite_space.hpp"
#include "finspace/graphs.hpp"

namespace testsupport {

using namespace finspace;

// ---------------------------------------------------------------------------
// Random structures.
// ---------------------------------------------------------------------------

inline Dag random_dag(std::mt19937_64& rng, std::size_t n, double edge_prob) {
  Dag d;
  for (std::size_t i = 0; i < n; ++i)
    d.vertices.push_back("v" + std::to_string(i));
  std::bernoulli_distribution coin(edge_prob);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) d.edges.emplace(d.vertices[i], d.vertices[j]);
  return d;
}

inline FiniteSpace random_t0_space(std::mt19937_64& rng, std::size_t n,
                                   double edge_prob = 0.35) {
  return dag_to_space(random_dag(rng, n, edge_prob));
}

inline FiniteSpace random_preorder_space(std::mt19937_64& rng, std::size_t n,
                                         double edge_prob = 0.35) {
  FiniteSpace t0 = random_t0_space(rng, n, edge_prob);
  // Duplicate a few points to break T0.
  std::vector<std::string> elements = t0.elements();
  std::vector<Mask> opens;
  for (std::size_t x = 0; x < t0.size(); ++x) opens.push_back(t0.min_open_mask(x));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t copies = 1 + pick(rng) % 2;
  for (std::size_t c = 0; c < copies && elements.size() < kMaxElements; ++c) {
    std::size_t x = pick(rng);
    Mask twin = opens[x] | bit(elements.size());
    // The twin and the original must be mutually below each other.
    for (std::size_t y = 0; y < opens.size(); ++y)
      if (contains(opens[y], x)) opens[y] |= bit(elements.size());
    opens[x] |= bit(elements.size());
    elements.push_back("w" + std::to_string(c));
    opens.push_back(twin | bit(x));
  }
  return FiniteSpace::from_min_open(std::move(elements), std::move(opens));
}

/// Binary-domain model over a T0 space with every CPT entry in
/// [margin, 1 - margin].
inline DiscreteCausalModel random_binary_model(std::mt19937_64& rng,
                                               const FiniteSpace& space,
                                               double margin = 0.05) {
  std::uniform_real_distribution<double> p(margin, 1.0 - margin);
  std::map<std::string, std::vector<std::string>> domains;
  std::map<std::string, Cpt> mechanisms;
  for (std::size_t v = 0; v < space.size(); ++v) {
    const std::string& name = space.element(v);
    domains[name] = {"0", "1"};
    Cpt c;
    for_each_bit(finspace::detail::covers_above(space, v),
                 [&](std::size_t parent) { c.parents.push_back(parent); });
    std::size_t rows = std::size_t{1} << c.parents.size();
    for (std::size_t r = 0; r < rows; ++r) {
      double one = p(rng);
      c.table.push_back({1.0 - one, one});
    }
    mechanisms[name] = std::move(c);
  }
  return DiscreteCausalModel(space, std::move(domains), std::move(mechanisms));
}

/// Strong-signal model: each variable leans heavily on the fraction of its
/// parents that are 1, so pairwise dependences survive sampling noise.
inline DiscreteCausalModel strong_signal_model(const FiniteSpace& space) {
  std::map<std::string, std::vector<std::string>> domains;
  std::map<std::string, Cpt> mechanisms;
  for (std::size_t v = 0; v < space.size(); ++v) {
    const std::string& name = space.element(v);
    domains[name] = {"0", "1"};
    Cpt c;
    for_each_bit(finspace::detail::covers_above(space, v),
                 [&](std::size_t parent) { c.parents.push_back(parent); });
    std::size_t rows = std::size_t{1} << c.parents.size();
    for (std::size_t r = 0; r < rows; ++r) {
      double one = c.parents.empty()
                       ? 0.5
                       : 0.05 + 0.9 * static_cast<double>(popcount(r)) /
                                    static_cast<double>(c.parents.size());
      c.table.push_back({1.0 - one, one});
    }
    mechanisms[name] = std::move(c);
  }
  return DiscreteCausalModel(space, std::move(domains), std::move(mechanisms));
}

// ---------------------------------------------------------------------------
// Topology closure oracle: generate the full topology from a subbasis by
// closing under union and intersection, then read off minimal opens.
// ---------------------------------------------------------------------------

inline std::vector<Mask> closure_min_opens(std::size_t n,
                                           std::vector<Mask> subbasis) {
  Mask all = n == 64 ? ~Mask{0} : (Mask{1} << n) - 1;
  std::set<Mask> opens{0, all};
  for (Mask m : subbasis) opens.insert(m);
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<Mask> current(opens.begin(), opens.end());
    for (Mask a : current)
      for (Mask b : current) {
        if (opens.insert(a | b).second) grew = true;
        if (opens.insert(a & b).second) grew = true;
      }
  }
  std::vector<Mask> min_open(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    Mask u = all;
    for (Mask m : opens)
      if (contains(m, x)) u &= m;
    min_open[x] = u;
  }
  return min_open;
}

// ---------------------------------------------------------------------------
// Classical d-separation oracle via moralization: restrict to the ancestral
// graph of U+V+Z, marry co-parents, drop directions, delete Z, test
// undirected reachability.
// ---------------------------------------------------------------------------

inline bool moral_d_separated(const Dag& d, const std::set<std::string>& u,
                              const std::set<std::string>& v,
                              const std::set<std::string>& z) {
  std::map<std::string, std::set<std::string>> parents;
  for (const auto& x : d.vertices) parents[x];
  for (const auto& [a, b] : d.edges) parents[b].insert(a);

  // Ancestors of U + V + Z.
  std::set<std::string> relevant;
  std::queue<std::string> frontier;
  for (const auto& s : {u, v, z})
    for (const auto& x : s)
      if (relevant.insert(x).second) frontier.push(x);
  while (!frontier.empty()) {
    std::string x = frontier.front();
    frontier.pop();
    for (const auto& p : parents[x])
      if (relevant.insert(p).second) frontier.push(p);
  }

  std::map<std::string, std::set<std::string>> adj;
  for (const auto& [a, b] : d.edges)
    if (relevant.count(a) && relevant.count(b)) {
      adj[a].insert(b);
      adj[b].insert(a);
    }
  for (const auto& child : relevant) {
    std::vector<std::string> ps;
    for (const auto& p : parents[child])
      if (relevant.count(p)) ps.push_back(p);
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        adj[ps[i]].insert(ps[j]);
        adj[ps[j]].insert(ps[i]);
      }
  }

  std::set<std::string> seen;
  std::queue<std::string> bfs;
  for (const auto& x : u)
    if (!z.count(x)) { seen.insert(x); bfs.push(x); }
  while (!bfs.empty()) {
    std::string x = bfs.front();
    bfs.pop();
    if (v.count(x)) return false;
    for (const auto& y : adj[x])
      if (!z.count(y) && seen.insert(y).second) bfs.push(y);
  }
  return true;
}

// ---------------------------------------------------------------------------
// Brute-force minimum antichain partition size (exact, small n only).
// ---------------------------------------------------------------------------

inline std::size_t min_antichain_partition(const FiniteSpace& s) {
  const std::size_t n = s.size();
  if (n == 0) return 0;
  auto comparable = [&](std::size_t x, std::size_t y) {
    return x != y && (s.leq(x, y) || s.leq(y, x));
  };
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::size_t> part(n, 0);
    auto assign = [&](auto&& self, std::size_t x) -> bool {
      if (x == n) return true;
      for (std::size_t c = 0; c < k; ++c) {
        bool ok = true;
        for (std::size_t y = 0; y < x; ++y)
          if (part[y] == c && comparable(x, y)) ok = false;
        if (!ok) continue;
        part[x] = c;
        if (self(self, x + 1)) return true;
      }
      return false;
    };
    if (assign(assign, 0)) return k;
  }
  return n;
}

/// Random disjoint nonempty (U, V) and possibly-empty Z over n vertices.
struct Triple {
  std::vector<std::string> u, v, z;
};

inline Triple random_triple(std::mt19937_64& rng,
                            const std::vector<std::string>& names) {
  std::vector<std::string> shuffled = names;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::uniform_int_distribution<std::size_t> small(1, 2);
  std::size_t nu = std::min(small(rng), shuffled.size() - 1);
  std::size_t nv = std::min(small(rng), shuffled.size() - nu);
  std::size_t rest = shuffled.size() - nu - nv;
  std::uniform_int_distribution<std::size_t> zsize(0, rest);
  std::size_t nz = zsize(rng);
  Triple t;
  t.u.assign(shuffled.begin(), shuffled.begin() + nu);
  t.v.assign(shuffled.begin() + nu, shuffled.begin() + nu + nv);
  t.z.assign(shuffled.begin() + nu + nv, shuffled.begin() + nu + nv + nz);
  return t;
}

}  // namespace testsupport

#endif  // FINSPACE_TEST_SUPPORT_HPP_
