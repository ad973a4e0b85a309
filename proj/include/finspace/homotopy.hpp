#ifndef FINSPACE_HOMOTOPY_HPP_
#define FINSPACE_HOMOTOPY_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "finspace/finite_space.hpp"

namespace finspace {

struct precondition_error : std::logic_error {
  using std::logic_error::logic_error;
};

enum class BeatKind { up_beat, down_beat, t0_merge };

inline const char* to_string(BeatKind k) {
  switch (k) {
    case BeatKind::up_beat: return "up_beat";
    case BeatKind::down_beat: return "down_beat";
    case BeatKind::t0_merge: return "t0_merge";
  }
  return "?";
}

/// Merge x ~ y whenever x <= y and y <= x. Returns the T0 quotient space and
/// the equivalence classes; class representatives are the lexicographically
/// smallest members.
inline std::pair<FiniteSpace, std::vector<std::vector<std::string>>> t0_quotient(
    const FiniteSpace& s) {
  std::vector<std::vector<std::string>> parts;
  std::vector<bool> assigned(s.size(), false);
  for (std::size_t x = 0; x < s.size(); ++x) {
    if (assigned[x]) continue;
    std::vector<std::string> part{s.element(x)};
    assigned[x] = true;
    for (std::size_t y = x + 1; y < s.size(); ++y) {
      if (!assigned[y] && s.min_open_mask(x) == s.min_open_mask(y)) {
        part.push_back(s.element(y));
        assigned[y] = true;
      }
    }
    parts.push_back(std::move(part));
  }
  return {quotient(s, parts), parts};
}

namespace detail {

/// Elements covered by x (strictly below, nothing in between).
inline Mask covers_below(const FiniteSpace& s, std::size_t x) {
  Mask strictly_below = s.min_open_mask(x) & ~bit(x);
  Mask covers = 0;
  for_each_bit(strictly_below, [&](std::size_t y) {
    Mask between = strictly_below & s.min_closed_mask(y) & ~bit(y);
    if (between == 0) covers |= bit(y);
  });
  return covers;
}

inline Mask covers_above(const FiniteSpace& s, std::size_t x) {
  Mask strictly_above = s.min_closed_mask(x) & ~bit(x);
  Mask covers = 0;
  for_each_bit(strictly_above, [&](std::size_t y) {
    Mask between = strictly_above & s.min_open_mask(y) & ~bit(y);
    if (between == 0) covers |= bit(y);
  });
  return covers;
}

inline bool has_unique_maximum(const FiniteSpace& s, Mask set) {
  if (popcount(set) == 0) return false;
  std::size_t candidate = 0;
  bool found = false;
  for_each_bit(set, [&](std::size_t y) {
    if (!found || s.leq(candidate, y)) { candidate = y; found = true; }
  });
  bool unique = true;
  for_each_bit(set, [&](std::size_t y) {
    if (!s.leq(y, candidate)) unique = false;
  });
  return unique;
}

inline bool has_unique_minimum(const FiniteSpace& s, Mask set) {
  if (popcount(set) == 0) return false;
  std::size_t candidate = 0;
  bool found = false;
  for_each_bit(set, [&](std::size_t y) {
    if (!found || s.leq(y, candidate)) { candidate = y; found = true; }
  });
  bool unique = true;
  for_each_bit(set, [&](std::size_t y) {
    if (!s.leq(candidate, y)) unique = false;
  });
  return unique;
}

}  // namespace detail

/// Beat points of a T0 space. x is a down-beat point iff U_x \ {x} has a
/// unique maximum; up-beat iff F_x \ {x} has a unique minimum. Both the
/// open/closed-set characterization and the Hasse-degree one are computed
/// and must agree.
inline std::vector<std::pair<std::string, BeatKind>> beat_points(
    const FiniteSpace& s) {
  if (!is_t0(s))
    throw precondition_error("beat_points requires a T0 space");
  std::vector<std::pair<std::string, BeatKind>> out;
  for (std::size_t x = 0; x < s.size(); ++x) {
    bool down = detail::has_unique_maximum(s, s.min_open_mask(x) & ~bit(x));
    bool down_by_degree = popcount(detail::covers_below(s, x)) == 1;
    bool up = detail::has_unique_minimum(s, s.min_closed_mask(x) & ~bit(x));
    bool up_by_degree = popcount(detail::covers_above(s, x)) == 1;
    if (down != down_by_degree || up != up_by_degree)
      throw std::logic_error("beat point characterizations disagree");
    if (down) out.emplace_back(s.element(x), BeatKind::down_beat);
    if (up) out.emplace_back(s.element(x), BeatKind::up_beat);
  }
  return out;
}

struct CoreReport {
  FiniteSpace core;
  std::vector<std::pair<std::string, BeatKind>> removal_trace;
};

/// Strong deformation retract with no beat points. Applies the T0 quotient
/// first, then removes one beat point at a time. The default removal order
/// is lowest element index first; passing a seed randomizes the order (the
/// result is the same space up to homeomorphism either way).
inline CoreReport core(const FiniteSpace& input,
                       std::optional<std::uint64_t> seed = std::nullopt) {
  CoreReport report;
  FiniteSpace s = input;
  if (!is_t0(s)) {
    auto [quotiented, parts] = t0_quotient(s);
    for (const auto& part : parts) {
      const std::string rep = *std::min_element(part.begin(), part.end());
      for (const auto& member : part)
        if (member != rep)
          report.removal_trace.emplace_back(member, BeatKind::t0_merge);
    }
    s = std::move(quotiented);
  }
  std::mt19937_64 rng(seed.value_or(0));
  for (;;) {
    auto beats = beat_points(s);
    if (beats.empty()) break;
    std::size_t pick = 0;
    if (seed) {
      pick = std::uniform_int_distribution<std::size_t>(0, beats.size() - 1)(rng);
    }
    const auto& [name, kind] = beats[pick];
    report.removal_trace.emplace_back(name, kind);
    std::vector<std::string> keep;
    for (const auto& e : s.elements())
      if (e != name) keep.push_back(e);
    s = subspace(s, keep);
  }
  report.core = std::move(s);
  return report;
}

inline bool is_contractible(const FiniteSpace& s) {
  return core(s).core.size() == 1;
}

namespace detail {

/// Label-independent element colors by iterative refinement on
/// (|U_x|, |F_x|) signatures extended with the color multisets of the
/// elements strictly below and strictly above.
inline std::vector<int> refine_colors(const FiniteSpace& s) {
  std::vector<int> color(s.size());
  {
    std::map<std::pair<int, int>, int> rank;
    std::vector<std::pair<int, int>> sig(s.size());
    for (std::size_t x = 0; x < s.size(); ++x) {
      sig[x] = {popcount(s.min_open_mask(x)), popcount(s.min_closed_mask(x))};
      rank[sig[x]] = 0;
    }
    int next = 0;
    for (auto& [k, v] : rank) v = next++;
    for (std::size_t x = 0; x < s.size(); ++x) color[x] = rank[sig[x]];
  }
  for (;;) {
    using Sig = std::tuple<int, std::vector<int>, std::vector<int>>;
    std::vector<Sig> sig(s.size());
    std::map<Sig, int> rank;
    for (std::size_t x = 0; x < s.size(); ++x) {
      std::vector<int> below, above;
      for_each_bit(s.min_open_mask(x) & ~bit(x),
                   [&](std::size_t y) { below.push_back(color[y]); });
      for_each_bit(s.min_closed_mask(x) & ~bit(x),
                   [&](std::size_t y) { above.push_back(color[y]); });
      std::sort(below.begin(), below.end());
      std::sort(above.begin(), above.end());
      sig[x] = {color[x], std::move(below), std::move(above)};
      rank[sig[x]] = 0;
    }
    int next = 0;
    for (auto& [k, v] : rank) v = next++;
    std::vector<int> refined(s.size());
    for (std::size_t x = 0; x < s.size(); ++x) refined[x] = rank[sig[x]];
    if (refined == color) return color;
    color = std::move(refined);
  }
}

inline bool extend_isomorphism(const FiniteSpace& a, const FiniteSpace& b,
                               const std::vector<int>& color_a,
                               const std::vector<int>& color_b,
                               std::vector<std::size_t>& map_ab,
                               Mask& used_b, std::size_t x) {
  if (x == a.size()) return true;
  for (std::size_t y = 0; y < b.size(); ++y) {
    if (contains(used_b, y) || color_a[x] != color_b[y]) continue;
    bool ok = true;
    for (std::size_t px = 0; px < x && ok; ++px) {
      std::size_t py = map_ab[px];
      if (a.leq(px, x) != b.leq(py, y) || a.leq(x, px) != b.leq(y, py))
        ok = false;
    }
    if (!ok) continue;
    map_ab[x] = y;
    used_b |= bit(y);
    if (extend_isomorphism(a, b, color_a, color_b, map_ab, used_b, x + 1))
      return true;
    used_b &= ~bit(y);
  }
  return false;
}

}  // namespace detail

/// Order-isomorphism (= homeomorphism) search with color pruning. Returns
/// the witness bijection when one exists.
inline std::optional<std::unordered_map<std::string, std::string>>
homeomorphism(const FiniteSpace& a, const FiniteSpace& b) {
  if (a.size() != b.size()) return std::nullopt;
  auto color_a = detail::refine_colors(a);
  auto color_b = detail::refine_colors(b);
  auto sorted_a = color_a, sorted_b = color_b;
  std::sort(sorted_a.begin(), sorted_a.end());
  std::sort(sorted_b.begin(), sorted_b.end());
  if (sorted_a != sorted_b) return std::nullopt;
  std::vector<std::size_t> map_ab(a.size());
  Mask used_b = 0;
  if (!detail::extend_isomorphism(a, b, color_a, color_b, map_ab, used_b, 0))
    return std::nullopt;
  std::unordered_map<std::string, std::string> witness;
  for (std::size_t x = 0; x < a.size(); ++x)
    witness[a.element(x)] = b.element(map_ab[x]);
  return witness;
}

inline bool homeomorphic(const FiniteSpace& a, const FiniteSpace& b) {
  return homeomorphism(a, b).has_value();
}

inline bool homotopy_equivalent(const FiniteSpace& a, const FiniteSpace& b) {
  return homeomorphic(core(a).core, core(b).core);
}

/// Canonical key of a space up to homeomorphism, for bulk deduplication.
/// Packs the <= matrix under the minimizing relabeling into 64 bits, so
/// only spaces with at most 8 elements are supported.
struct CanonicalKey {
  std::uint8_t n = 0;
  std::uint64_t bits = 0;
  bool operator==(const CanonicalKey& o) const {
    return n == o.n && bits == o.bits;
  }
  bool operator<(const CanonicalKey& o) const {
    return n != o.n ? n < o.n : bits < o.bits;
  }
};

struct CanonicalKeyHash {
  std::size_t operator()(const CanonicalKey& k) const {
    return std::hash<std::uint64_t>{}(k.bits * 31 + k.n);
  }
};

inline CanonicalKey canonical_key(const FiniteSpace& s) {
  if (s.size() > 8)
    throw input_error("canonical_key supports at most 8 elements");
  const std::size_t n = s.size();
  auto color = detail::refine_colors(s);

  // Positions grouped by color; permutations are explored within classes
  // only, taking the lexicographically smallest matrix encoding.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return color[x] != color[y] ? color[x] < color[y] : x < y;
  });

  auto encode = [&](const std::vector<std::size_t>& perm) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (s.leq(perm[i], perm[j])) bits |= std::uint64_t{1} << (i * n + j);
    return bits;
  };

  std::uint64_t best = ~std::uint64_t{0};
  std::vector<std::size_t> perm = order;
  // Enumerate permutations that keep the color blocks in place.
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && color[order[j]] == color[order[i]]) ++j;
    blocks.emplace_back(i, j);
    i = j;
  }
  auto recurse = [&](auto&& self, std::size_t block) -> void {
    if (block == blocks.size()) {
      best = std::min(best, encode(perm));
      return;
    }
    auto [lo, hi] = blocks[block];
    std::sort(perm.begin() + lo, perm.begin() + hi);
    do {
      self(self, block + 1);
    } while (std::next_permutation(perm.begin() + lo, perm.begin() + hi));
  };
  recurse(recurse, 0);
  return CanonicalKey{static_cast<std::uint8_t>(n), best};
}

}  // namespace finspace

#endif  // FINSPACE_HOMOTOPY_HPP_
