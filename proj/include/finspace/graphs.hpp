#ifndef FINSPACE_GRAPHS_HPP_
#define FINSPACE_GRAPHS_HPP_

#include <algorithm>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "finspace/finite_space.hpp"
#include "finspace/homotopy.hpp"

namespace finspace {

/// Directed acyclic graph; edge (u, v) reads "u causes v".
struct Dag {
  std::vector<std::string> vertices;
  std::set<std::pair<std::string, std::string>> edges;
};

struct ChainGraph {
  std::vector<std::string> vertices;
  std::set<std::pair<std::string, std::string>> directed_edges;
  std::set<std::pair<std::string, std::string>> undirected_edges;  // stored sorted
};

/// DAG over observables plus hyperedges, each standing for one latent
/// common cause of its members.
struct HyperModel {
  Dag base;
  std::vector<std::vector<std::string>> hyperedges;
};

/// Cover relation of a poset; edge (x, y) when y <= x with nothing strictly
/// between (drawn cause -> effect).
struct HasseDiagram {
  std::vector<std::string> vertices;
  std::set<std::pair<std::string, std::string>> cover_edges;
};

namespace detail {

struct DagIndex {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<Mask> out_adj;  // out_adj[u] = direct effects of u

  explicit DagIndex(const Dag& d) {
    if (d.vertices.size() > kMaxElements)
      throw input_error("too many vertices (cap 64)");
    for (std::size_t i = 0; i < d.vertices.size(); ++i)
      if (!index.emplace(d.vertices[i], i).second)
        throw input_error("duplicate vertex: " + d.vertices[i]);
    out_adj.assign(d.vertices.size(), 0);
    for (const auto& [u, v] : d.edges) {
      auto iu = index.find(u), iv = index.find(v);
      if (iu == index.end() || iv == index.end())
        throw input_error("edge endpoint not in vertex list");
      out_adj[iu->second] |= bit(iv->second);
    }
  }

  /// reach[u] = vertices reachable from u, including u. Throws on cycles.
  std::vector<Mask> reachability() const {
    const std::size_t n = out_adj.size();
    std::vector<Mask> reach(n, 0);
    std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
    auto dfs = [&](auto&& self, std::size_t u) -> void {
      state[u] = 1;
      reach[u] = bit(u);
      for_each_bit(out_adj[u], [&](std::size_t v) {
        if (state[v] == 1) throw input_error("directed cycle detected");
        if (state[v] == 0) self(self, v);
        reach[u] |= reach[v];
      });
      state[u] = 2;
    };
    for (std::size_t u = 0; u < n; ++u)
      if (state[u] == 0) dfs(dfs, u);
    return reach;
  }
};

}  // namespace detail

inline Dag transitive_closure(const Dag& d) {
  detail::DagIndex idx(d);
  auto reach = idx.reachability();
  Dag out;
  out.vertices = d.vertices;
  for (std::size_t u = 0; u < d.vertices.size(); ++u)
    for_each_bit(reach[u] & ~bit(u), [&](std::size_t v) {
      out.edges.emplace(d.vertices[u], d.vertices[v]);
    });
  return out;
}

/// Unique transitive reduction of a DAG: keep u->v iff no intermediate w
/// with u ~> w ~> v.
inline Dag transitive_reduction(const Dag& d) {
  detail::DagIndex idx(d);
  auto reach = idx.reachability();
  Dag out;
  out.vertices = d.vertices;
  for (std::size_t u = 0; u < d.vertices.size(); ++u) {
    Mask descendants = reach[u] & ~bit(u);
    for_each_bit(descendants, [&](std::size_t v) {
      bool shortcut = false;
      for_each_bit(descendants & ~bit(v), [&](std::size_t w) {
        if (contains(reach[w], v)) shortcut = true;
      });
      if (!shortcut) out.edges.emplace(d.vertices[u], d.vertices[v]);
    });
  }
  return out;
}

/// Descendant embedding: min_open(y) = descendants of y including y, so
/// x <= y iff x is a descendant of y. Always T0.
inline FiniteSpace dag_to_space(const Dag& d) {
  detail::DagIndex idx(d);
  auto reach = idx.reachability();
  return FiniteSpace::from_min_open(d.vertices, std::move(reach));
}

inline HasseDiagram space_to_hasse(const FiniteSpace& s) {
  if (!is_t0(s)) throw precondition_error("space_to_hasse requires T0");
  HasseDiagram h;
  h.vertices = s.elements();
  for (std::size_t x = 0; x < s.size(); ++x)
    for_each_bit(detail::covers_below(s, x), [&](std::size_t y) {
      h.cover_edges.emplace(s.element(x), s.element(y));
    });
  return h;
}

/// Hasse-edge DAG of a T0 space, oriented cause -> effect. Inverse of
/// dag_to_space up to transitive reduction.
inline Dag space_to_dag(const FiniteSpace& s) {
  auto h = space_to_hasse(s);
  return Dag{h.vertices, h.cover_edges};
}

/// Chain-graph preorder: x <= y iff some path from x to y uses only
/// reversed directed steps or undirected steps. Generally not T0.
inline FiniteSpace chain_graph_to_space(const ChainGraph& g) {
  if (g.vertices.size() > kMaxElements)
    throw input_error("too many vertices (cap 64)");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < g.vertices.size(); ++i)
    if (!index.emplace(g.vertices[i], i).second)
      throw input_error("duplicate vertex: " + g.vertices[i]);
  const std::size_t n = g.vertices.size();
  auto at = [&](const std::string& v) {
    auto it = index.find(v);
    if (it == index.end()) throw input_error("edge endpoint not in vertex list");
    return it->second;
  };
  // step[x] = vertices y with an allowed step x -> y (x <= ... towards y).
  std::vector<Mask> step(n, 0);
  for (const auto& [u, v] : g.directed_edges) {
    std::size_t iu = at(u), iv = at(v);
    if (g.undirected_edges.count(std::minmax(u, v)) ||
        g.directed_edges.count({v, u}))
      throw input_error("conflicting edges between " + u + " and " + v);
    step[iv] |= bit(iu);  // v <= u when u -> v
  }
  for (const auto& [u, v] : g.undirected_edges) {
    std::size_t iu = at(u), iv = at(v);
    step[iu] |= bit(iv);
    step[iv] |= bit(iu);
  }
  // min_open(x) = { y | y <= x } = everything reaching x... transitive
  // closure of the step relation gives upward reachability from each point.
  std::vector<Mask> up(n);
  for (std::size_t x = 0; x < n; ++x) up[x] = bit(x) | step[x];
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t x = 0; x < n; ++x) {
      Mask m = up[x];
      for_each_bit(up[x], [&](std::size_t y) { m |= up[y]; });
      if (m != up[x]) { up[x] = m; grew = true; }
    }
  }
  // up[x] = { y | x <= y }; invert to get the minimal opens.
  std::vector<Mask> opens(n, 0);
  for (std::size_t x = 0; x < n; ++x)
    for_each_bit(up[x], [&](std::size_t y) { opens[y] |= bit(x); });
  return FiniteSpace::from_min_open(g.vertices, std::move(opens));
}

/// Adjoin one fresh latent element per hyperedge as a common ancestor of
/// exactly its members (a localized non-Hausdorff cone). Latent names
/// default to "L0", "L1", ...
inline FiniteSpace hyper_to_space(const HyperModel& hm,
                                  const std::string& latent_prefix = "L") {
  FiniteSpace base = dag_to_space(hm.base);
  std::vector<std::string> elements = base.elements();
  std::vector<Mask> opens;
  for (std::size_t x = 0; x < base.size(); ++x)
    opens.push_back(base.min_open_mask(x));
  for (std::size_t h = 0; h < hm.hyperedges.size(); ++h) {
    const auto& edge = hm.hyperedges[h];
    if (edge.size() < 2)
      throw input_error("hyperedge must have at least 2 members");
    std::string latent = latent_prefix + std::to_string(h);
    if (std::find(elements.begin(), elements.end(), latent) != elements.end())
      throw input_error("latent name collides: " + latent);
    Mask m = bit(elements.size());
    for (const auto& member : edge) m |= base.min_open_mask(base.index_of(member));
    elements.push_back(latent);
    opens.push_back(m);
  }
  return FiniteSpace::from_min_open(std::move(elements), std::move(opens));
}

/// Longest chain length of a T0 space.
inline std::size_t height(const FiniteSpace& s) {
  if (!is_t0(s)) throw precondition_error("height requires T0");
  std::vector<int> depth(s.size(), -1);
  auto longest_below = [&](auto&& self, std::size_t x) -> int {
    if (depth[x] >= 0) return depth[x];
    int best = 0;
    for_each_bit(s.min_open_mask(x) & ~bit(x), [&](std::size_t y) {
      best = std::max(best, self(self, y) + 1);
    });
    return depth[x] = best;
  };
  std::size_t h = 0;
  for (std::size_t x = 0; x < s.size(); ++x)
    h = std::max(h, static_cast<std::size_t>(longest_below(longest_below, x)) + 1);
  return s.size() == 0 ? 0 : h;
}

/// Level antichains: elements grouped by the length of their longest
/// strictly descending chain. The number of parts equals the height
/// (Mirsky).
inline std::vector<std::vector<std::string>> antichain_partition(
    const FiniteSpace& s) {
  if (!is_t0(s)) throw precondition_error("antichain_partition requires T0");
  std::vector<int> depth(s.size(), -1);
  auto level = [&](auto&& self, std::size_t x) -> int {
    if (depth[x] >= 0) return depth[x];
    int best = 0;
    for_each_bit(s.min_open_mask(x) & ~bit(x), [&](std::size_t y) {
      best = std::max(best, self(self, y) + 1);
    });
    return depth[x] = best;
  };
  int max_level = -1;
  for (std::size_t x = 0; x < s.size(); ++x)
    max_level = std::max(max_level, level(level, x));
  std::vector<std::vector<std::string>> parts(
      static_cast<std::size_t>(max_level + 1));
  for (std::size_t x = 0; x < s.size(); ++x)
    parts[static_cast<std::size_t>(depth[x])].push_back(s.element(x));
  if (parts.size() != height(s) && s.size() > 0)
    throw std::logic_error("Mirsky equality violated");
  return parts;
}

}  // namespace finspace

#endif  // FINSPACE_GRAPHS_HPP_
