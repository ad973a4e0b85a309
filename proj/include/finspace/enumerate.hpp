#ifndef FINSPACE_ENUMERATE_HPP_
#define FINSPACE_ENUMERATE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "finspace/finite_space.hpp"
#include "finspace/homotopy.hpp"

namespace finspace {

/// Hard caps keeping the full test suite in the minutes range. Labeled
/// posets at n=7 (6,129,859) stream fine; preorders stop one earlier.
inline constexpr std::size_t kMaxPosetN = 7;
inline constexpr std::size_t kMaxPreorderN = 6;

/// Lightweight view of a labeled preorder during enumeration: below[i] is
/// the mask of elements <= i.
struct PreorderView {
  std::size_t n;
  const Mask* below;

  FiniteSpace to_space() const {
    std::vector<std::string> elements;
    elements.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      elements.push_back("x" + std::to_string(i));
    return FiniteSpace::from_min_open(
        std::move(elements), std::vector<Mask>(below, below + n));
  }
};

namespace detail {

/// Streams every labeled poset on n elements exactly once. Element k is
/// inserted into the poset on {0..k-1} by choosing a down-set D (elements
/// below k) and an up-set U (elements above k) with every member of D
/// strictly below every member of U. Work is split across `num_parts`
/// disjoint streams by the branching choices made for the first three
/// elements.
inline void poset_dfs(std::size_t n, std::size_t part, std::size_t num_parts,
                      const std::function<void(const PreorderView&)>& fn) {
  std::vector<Mask> below(n), above(n);
  const std::size_t split_depth = n >= 4 ? 3 : (n == 0 ? 0 : n - 1);
  std::uint64_t branch_counter = 0;

  auto recurse = [&](auto&& self, std::size_t k) -> void {
    if (k == n) {
      fn(PreorderView{n, below.data()});
      return;
    }
    const Mask full = (Mask{1} << k) - 1;
    for (Mask d = 0;; d = (d - full) & full) {  // all subsets of full
      // D must be a down-set of the current poset.
      Mask down_closure = 0;
      for_each_bit(d, [&](std::size_t y) { down_closure |= below[y]; });
      if (down_closure == d) {
        // Candidates for U: strictly above every member of D.
        Mask eligible = full & ~d;
        for_each_bit(eligible, [&](std::size_t u) {
          if ((d & ~below[u]) != 0) eligible &= ~bit(u);
        });
        for (Mask up = 0;; up = (up - eligible) & eligible) {
          bool is_up_set = true;
          for_each_bit(up, [&](std::size_t u) {
            if ((above[u] & full & ~up) != 0) is_up_set = false;
          });
          if (is_up_set &&
              (k != split_depth || num_parts <= 1 ||
               branch_counter++ % num_parts == part)) {
            below[k] = d | bit(k);
            above[k] = up | bit(k);
            for_each_bit(up, [&](std::size_t u) { below[u] |= bit(k); });
            for_each_bit(d, [&](std::size_t y) { above[y] |= bit(k); });
            self(self, k + 1);
            for_each_bit(up, [&](std::size_t u) { below[u] &= ~bit(k); });
            for_each_bit(d, [&](std::size_t y) { above[y] &= ~bit(k); });
          }
          if (up == eligible) break;
        }
      }
      if (d == full) break;
    }
  };
  if (n == 0) {
    if (num_parts <= 1 || part == 0) fn(PreorderView{0, below.data()});
    return;
  }
  recurse(recurse, 0);
}

/// Streams every labeled preorder on n elements: a set partition (as a
/// restricted growth string) composed with a labeled poset on the blocks.
inline void preorder_dfs(std::size_t n, std::size_t part,
                         std::size_t num_parts,
                         const std::function<void(const PreorderView&)>& fn) {
  if (n == 0) {
    if (num_parts <= 1 || part == 0) fn(PreorderView{0, nullptr});
    return;
  }
  std::vector<std::size_t> block_of(n);
  std::uint64_t partition_counter = 0;
  auto emit = [&](std::size_t num_blocks) {
    std::vector<Mask> block_mask(num_blocks, 0);
    for (std::size_t i = 0; i < n; ++i) block_mask[block_of[i]] |= bit(i);
    std::vector<Mask> below(n);
    poset_dfs(num_blocks, 0, 1, [&](const PreorderView& poset) {
      for (std::size_t i = 0; i < n; ++i) {
        Mask m = 0;
        for_each_bit(poset.below[block_of[i]],
                     [&](std::size_t b) { m |= block_mask[b]; });
        below[i] = m;
      }
      fn(PreorderView{n, below.data()});
    });
  };
  auto rgs = [&](auto&& self, std::size_t i, std::size_t max_used) -> void {
    if (i == n) {
      if (num_parts <= 1 || partition_counter++ % num_parts == part)
        emit(max_used + 1);
      return;
    }
    for (std::size_t b = 0; b <= max_used + 1 && b < n; ++b) {
      block_of[i] = b;
      self(self, i + 1, std::max(max_used, b));
    }
  };
  block_of[0] = 0;
  rgs(rgs, 1, 0);
}

}  // namespace detail

inline void for_each_poset(std::size_t n,
                           const std::function<void(const PreorderView&)>& fn,
                           std::size_t part = 0, std::size_t num_parts = 1,
                           std::size_t cap = kMaxPosetN) {
  if (n > cap) throw input_error("poset enumeration capped at n <= " +
                                 std::to_string(cap));
  detail::poset_dfs(n, part, num_parts, fn);
}

inline void for_each_preorder(std::size_t n,
                              const std::function<void(const PreorderView&)>& fn,
                              std::size_t part = 0, std::size_t num_parts = 1,
                              std::size_t cap = kMaxPreorderN) {
  if (n > cap) throw input_error("preorder enumeration capped at n <= " +
                                 std::to_string(cap));
  detail::preorder_dfs(n, part, num_parts, fn);
}

/// Materialized streams, for small n and tests.
inline std::vector<FiniteSpace> enumerate_posets(std::size_t n,
                                                 std::size_t cap = kMaxPosetN) {
  std::vector<FiniteSpace> out;
  for_each_poset(n, [&](const PreorderView& v) { out.push_back(v.to_space()); },
                 0, 1, cap);
  return out;
}

inline std::vector<FiniteSpace> enumerate_preorders(
    std::size_t n, std::size_t cap = kMaxPreorderN) {
  std::vector<FiniteSpace> out;
  for_each_preorder(n,
                    [&](const PreorderView& v) { out.push_back(v.to_space()); },
                    0, 1, cap);
  return out;
}

struct EnumerationResult {
  std::size_t n = 0;
  std::optional<std::uint64_t> distinct;
  std::optional<std::uint64_t> distinct_t0;
  std::optional<std::uint64_t> inequivalent;
  std::optional<std::uint64_t> inequivalent_t0;
  std::optional<std::uint64_t> minimal_t0;
};

enum class UpTo { labeled, homeomorphism, homotopy };

namespace detail {

using KeySet = std::unordered_set<CanonicalKey, CanonicalKeyHash>;

inline CanonicalKey view_key(const PreorderView& v, bool up_to_homotopy) {
  FiniteSpace s = v.to_space();
  if (up_to_homotopy) s = core(s).core;
  return canonical_key(s);
}

}  // namespace detail

/// Counts of the enumeration stream, deduplicated per `up_to`. Counting is
/// an associative merge over disjoint worker streams, so the result is
/// independent of `threads`.
inline EnumerationResult count_classes(std::size_t n, bool t0_only, UpTo up_to,
                                       std::size_t threads = 1,
                                       std::size_t cap_posets = kMaxPosetN,
                                       std::size_t cap_preorders = kMaxPreorderN) {
  EnumerationResult result;
  result.n = n;
  const std::size_t num_parts = std::max<std::size_t>(threads, 1);
  std::vector<std::uint64_t> counts(num_parts, 0);
  std::vector<detail::KeySet> keys(num_parts);

  auto worker = [&](std::size_t part) {
    auto visit = [&](const PreorderView& v) {
      if (up_to == UpTo::labeled) {
        ++counts[part];
      } else {
        keys[part].insert(detail::view_key(v, up_to == UpTo::homotopy));
      }
    };
    if (t0_only)
      for_each_poset(n, visit, part, num_parts, cap_posets);
    else
      for_each_preorder(n, visit, part, num_parts, cap_preorders);
  };

  if (num_parts == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t p = 0; p < num_parts; ++p)
      pool.emplace_back(worker, p);
    for (auto& t : pool) t.join();
  }

  std::uint64_t total = 0;
  if (up_to == UpTo::labeled) {
    for (auto c : counts) total += c;
  } else {
    detail::KeySet merged;
    for (auto& k : keys) merged.insert(k.begin(), k.end());
    total = merged.size();
  }

  if (up_to == UpTo::labeled) {
    (t0_only ? result.distinct_t0 : result.distinct) = total;
  } else if (up_to == UpTo::homeomorphism) {
    (t0_only ? result.inequivalent_t0 : result.inequivalent) = total;
  } else {
    result.minimal_t0 = total;  // homotopy classes arising at size n
  }
  return result;
}

/// One representative per homeomorphism class of n-point T0 spaces with no
/// beat points.
inline std::vector<FiniteSpace> enumerate_minimal_posets(
    std::size_t n, std::size_t cap = kMaxPosetN) {
  detail::KeySet seen;
  std::vector<FiniteSpace> out;
  for_each_poset(n, [&](const PreorderView& v) {
    FiniteSpace s = v.to_space();
    if (!beat_points(s).empty()) return;
    if (seen.insert(canonical_key(s)).second) out.push_back(std::move(s));
  }, 0, 1, cap);
  return out;
}

}  // namespace finspace

#endif  // FINSPACE_ENUMERATE_HPP_
