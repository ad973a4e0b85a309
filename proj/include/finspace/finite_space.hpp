#ifndef FINSPACE_FINITE_SPACE_HPP_
#define FINSPACE_FINITE_SPACE_HPP_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace finspace {

/// Dense bitset over element indices. Spaces are capped at 64 elements,
/// which is far beyond every supported workflow (enumeration stops at 7).
using Mask = std::uint64_t;

inline constexpr std::size_t kMaxElements = 64;

inline Mask bit(std::size_t i) { return Mask{1} << i; }
inline bool contains(Mask m, std::size_t i) { return (m >> i) & 1u; }
inline int popcount(Mask m) { return std::popcount(m); }

/// Iterate set bits of a mask, lowest first.
template <typename F>
void for_each_bit(Mask m, F&& f) {
  while (m != 0) {
    std::size_t i = static_cast<std::size_t>(std::countr_zero(m));
    f(i);
    m &= m - 1;
  }
}

struct input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A finite Alexandroff space: a list of named elements together with the
/// minimal open set U_x of each element, stored as a bitmask over element
/// indices. The induced preorder is x <= y iff x in U_y. Immutable after
/// construction.
class FiniteSpace {
 public:
  FiniteSpace() = default;

  /// Build from explicit minimal opens. Validates reflexivity and
  /// transitivity (U_x must be a down-set of the preorder).
  static FiniteSpace from_min_open(std::vector<std::string> elements,
                                   std::vector<Mask> min_open) {
    FiniteSpace s(std::move(elements));
    if (min_open.size() != s.size())
      throw input_error("min_open size does not match element count");
    s.min_open_ = std::move(min_open);
    s.validate();
    return s;
  }

  /// Build from a subbasis of open sets, each given as element names.
  /// The topology is the closure of the listed sets under union and
  /// intersection together with the empty set and the whole space, so
  /// U_x is the intersection of all listed sets containing x.
  static FiniteSpace from_open_sets(
      std::vector<std::string> elements,
      const std::vector<std::vector<std::string>>& opens) {
    FiniteSpace s(std::move(elements));
    const Mask all = s.universe();
    std::vector<Mask> open_masks;
    open_masks.reserve(opens.size());
    for (const auto& open : opens) {
      Mask m = 0;
      for (const auto& name : open) m |= bit(s.index_of(name));
      open_masks.push_back(m);
    }
    s.min_open_.assign(s.size(), 0);
    for (std::size_t x = 0; x < s.size(); ++x) {
      Mask u = all;
      for (Mask m : open_masks)
        if (contains(m, x)) u &= m;
      s.min_open_[x] = u;
    }
    s.validate();
    return s;
  }

  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const std::vector<std::string>& elements() const { return elements_; }
  const std::string& element(std::size_t i) const { return elements_.at(i); }

  bool has_element(const std::string& name) const {
    return index_.count(name) != 0;
  }

  std::size_t index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw input_error("unknown element: " + name);
    return it->second;
  }

  Mask universe() const {
    return size() == kMaxElements ? ~Mask{0} : (Mask{1} << size()) - 1;
  }

  Mask min_open_mask(std::size_t i) const { return min_open_.at(i); }

  /// Minimal closed set F_x = { y | x in U_y }.
  Mask min_closed_mask(std::size_t i) const {
    Mask f = 0;
    for (std::size_t y = 0; y < size(); ++y)
      if (contains(min_open_[y], i)) f |= bit(y);
    return f;
  }

  std::vector<std::string> names_of(Mask m) const {
    std::vector<std::string> out;
    for_each_bit(m, [&](std::size_t i) { out.push_back(elements_[i]); });
    return out;
  }

  Mask mask_of(const std::vector<std::string>& names) const {
    Mask m = 0;
    for (const auto& n : names) m |= bit(index_of(n));
    return m;
  }

  std::vector<std::string> min_open(const std::string& name) const {
    return names_of(min_open_[index_of(name)]);
  }

  /// Induced preorder: x <= y iff x in U_y.
  bool leq(std::size_t x, std::size_t y) const {
    return contains(min_open_[y], x);
  }

  bool preorder_leq(const std::string& x, const std::string& y) const {
    return leq(index_of(x), index_of(y));
  }

  /// A set is open iff it contains the minimal open of each of its points.
  bool is_open(Mask m) const {
    bool open = true;
    for_each_bit(m, [&](std::size_t i) {
      if ((min_open_[i] & ~m) != 0) open = false;
    });
    return open;
  }

  bool operator==(const FiniteSpace& other) const {
    return elements_ == other.elements_ && min_open_ == other.min_open_;
  }
  bool operator!=(const FiniteSpace& other) const { return !(*this == other); }

 private:
  explicit FiniteSpace(std::vector<std::string> elements)
      : elements_(std::move(elements)) {
    if (elements_.size() > kMaxElements)
      throw input_error("too many elements (cap 64)");
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      if (!index_.emplace(elements_[i], i).second)
        throw input_error("duplicate element: " + elements_[i]);
    }
  }

  void validate() const {
    const Mask all = universe();
    for (std::size_t x = 0; x < size(); ++x) {
      if ((min_open_[x] & ~all) != 0)
        throw input_error("min_open refers to elements outside the space");
      if (!contains(min_open_[x], x))
        throw input_error("min_open(" + elements_[x] + ") must contain " +
                          elements_[x]);
      for_each_bit(min_open_[x], [&](std::size_t y) {
        if ((min_open_[y] & ~min_open_[x]) != 0)
          throw input_error("min_open(" + elements_[x] +
                            ") is not a down-set of the preorder");
      });
    }
  }

  std::vector<std::string> elements_;
  std::vector<Mask> min_open_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Minimal closed sets F_x of every element; exact dual of min_open.
struct ClosedBasis {
  std::vector<Mask> min_closed;
};

inline ClosedBasis closed_basis(const FiniteSpace& s) {
  ClosedBasis b;
  b.min_closed.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    b.min_closed.push_back(s.min_closed_mask(i));
  return b;
}

inline bool is_t0(const FiniteSpace& s) {
  for (std::size_t x = 0; x < s.size(); ++x)
    for (std::size_t y = x + 1; y < s.size(); ++y)
      if (s.min_open_mask(x) == s.min_open_mask(y)) return false;
  return true;
}

/// T1: every singleton is closed. For finite spaces this forces the
/// discrete topology; checked here directly via complement-openness.
inline bool is_t1(const FiniteSpace& s) {
  const Mask all = s.universe();
  for (std::size_t x = 0; x < s.size(); ++x)
    if (!s.is_open(all & ~bit(x))) return false;
  return true;
}

/// T2: any two points have disjoint neighborhoods.
inline bool is_t2(const FiniteSpace& s) {
  for (std::size_t x = 0; x < s.size(); ++x)
    for (std::size_t y = x + 1; y < s.size(); ++y)
      if ((s.min_open_mask(x) & s.min_open_mask(y)) != 0) return false;
  return true;
}

namespace detail {

/// Connectivity of the comparability graph (edge when x <= y or y <= x).
inline bool order_connected(const FiniteSpace& s) {
  if (s.size() <= 1) return true;
  std::vector<std::size_t> parent(s.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t x = 0; x < s.size(); ++x)
    for (std::size_t y = 0; y < s.size(); ++y)
      if (s.leq(x, y)) parent[find(x)] = find(y);
  std::size_t root = find(0);
  for (std::size_t x = 1; x < s.size(); ++x)
    if (find(x) != root) return false;
  return true;
}

/// Topological connectivity: no proper nonempty clopen set. The smallest
/// clopen set containing element 0 is grown to a fixpoint.
inline bool clopen_connected(const FiniteSpace& s) {
  if (s.size() <= 1) return true;
  Mask component = bit(0);
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t x = 0; x < s.size(); ++x) {
      if (contains(component, x)) continue;
      if ((s.min_open_mask(x) & component) != 0 ||
          (s.min_closed_mask(x) & component) != 0) {
        component |= bit(x);
        grew = true;
      }
    }
  }
  return component == s.universe();
}

}  // namespace detail

inline bool is_connected(const FiniteSpace& s) {
  bool by_order = detail::order_connected(s);
  bool by_clopen = detail::clopen_connected(s);
  if (by_order != by_clopen)
    throw std::logic_error("connectivity characterizations disagree");
  return by_order;
}

/// Order dual: min_open built from the reversed preorder, so the new
/// U_x equals the old F_x.
inline FiniteSpace opposite(const FiniteSpace& s) {
  std::vector<Mask> opens(s.size());
  for (std::size_t x = 0; x < s.size(); ++x)
    opens[x] = s.min_closed_mask(x);
  return FiniteSpace::from_min_open(s.elements(), std::move(opens));
}

inline FiniteSpace disjoint_union(const FiniteSpace& a, const FiniteSpace& b) {
  std::vector<std::string> elements = a.elements();
  for (const auto& e : b.elements()) elements.push_back(e);
  std::vector<Mask> opens;
  opens.reserve(a.size() + b.size());
  for (std::size_t x = 0; x < a.size(); ++x)
    opens.push_back(a.min_open_mask(x));
  for (std::size_t x = 0; x < b.size(); ++x)
    opens.push_back(b.min_open_mask(x) << a.size());
  return FiniteSpace::from_min_open(std::move(elements), std::move(opens));
}

/// Product space; the preorder is componentwise. Pair elements are named
/// "(x,y)".
inline FiniteSpace product(const FiniteSpace& a, const FiniteSpace& b) {
  std::vector<std::string> elements;
  std::vector<Mask> opens;
  if (a.size() * b.size() > kMaxElements)
    throw input_error("product exceeds element cap");
  for (std::size_t x = 0; x < a.size(); ++x)
    for (std::size_t y = 0; y < b.size(); ++y)
      elements.push_back("(" + a.element(x) + "," + b.element(y) + ")");
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = 0; y < b.size(); ++y) {
      Mask m = 0;
      for_each_bit(a.min_open_mask(x), [&](std::size_t u) {
        for_each_bit(b.min_open_mask(y), [&](std::size_t v) {
          m |= bit(u * b.size() + v);
        });
      });
      opens.push_back(m);
    }
  }
  return FiniteSpace::from_min_open(std::move(elements), std::move(opens));
}

/// Subspace topology on the elements named in `keep`.
inline FiniteSpace subspace(const FiniteSpace& s,
                            const std::vector<std::string>& keep) {
  Mask keep_mask = s.mask_of(keep);
  std::vector<std::string> elements;
  std::vector<std::size_t> old_index;
  std::vector<std::size_t> new_index(s.size(), 0);
  for (std::size_t x = 0; x < s.size(); ++x) {
    if (contains(keep_mask, x)) {
      new_index[x] = elements.size();
      old_index.push_back(x);
      elements.push_back(s.element(x));
    }
  }
  std::vector<Mask> opens;
  opens.reserve(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    Mask restricted = s.min_open_mask(old_index[i]) & keep_mask;
    Mask m = 0;
    for_each_bit(restricted, [&](std::size_t x) { m |= bit(new_index[x]); });
    opens.push_back(m);
  }
  return FiniteSpace::from_min_open(std::move(elements), std::move(opens));
}

/// Quotient topology induced by a partition of the elements. Each class is
/// named after its lexicographically smallest member. The minimal open of a
/// class is the smallest class-set whose preimage is open.
inline FiniteSpace quotient(const FiniteSpace& s,
                            const std::vector<std::vector<std::string>>& parts) {
  std::vector<Mask> class_masks;
  std::vector<std::string> class_names;
  Mask covered = 0;
  for (const auto& part : parts) {
    if (part.empty()) throw input_error("empty partition class");
    Mask m = s.mask_of(part);
    if ((m & covered) != 0) throw input_error("partition classes overlap");
    covered |= m;
    std::string rep = *std::min_element(part.begin(), part.end());
    class_masks.push_back(m);
    class_names.push_back(rep);
  }
  if (covered != s.universe())
    throw input_error("partition does not cover the space");

  std::vector<std::size_t> class_of(s.size());
  for (std::size_t c = 0; c < class_masks.size(); ++c)
    for_each_bit(class_masks[c], [&](std::size_t x) { class_of[x] = c; });

  std::vector<Mask> opens(class_masks.size());
  for (std::size_t c = 0; c < class_masks.size(); ++c) {
    // Fixpoint: grow the class set until its preimage is open in s.
    Mask classes = bit(c);
    bool grew = true;
    while (grew) {
      grew = false;
      Mask preimage = 0;
      for_each_bit(classes, [&](std::size_t d) { preimage |= class_masks[d]; });
      for_each_bit(preimage, [&](std::size_t x) {
        for_each_bit(s.min_open_mask(x) & ~preimage, [&](std::size_t y) {
          if (!contains(classes, class_of[y])) {
            classes |= bit(class_of[y]);
            grew = true;
          }
        });
      });
    }
    opens[c] = classes;
  }
  return FiniteSpace::from_min_open(std::move(class_names), std::move(opens));
}

/// Non-Hausdorff cone: one fresh apex whose only containing open set is the
/// whole new space.
inline FiniteSpace cone(const FiniteSpace& s, const std::string& apex = "*") {
  if (s.has_element(apex)) throw input_error("apex name collides: " + apex);
  std::vector<std::string> elements = s.elements();
  elements.push_back(apex);
  std::vector<Mask> opens;
  for (std::size_t x = 0; x < s.size(); ++x)
    opens.push_back(s.min_open_mask(x));
  opens.push_back(s.universe() | bit(s.size()));
  return FiniteSpace::from_min_open(std::move(elements), std::move(opens));
}

/// Non-Hausdorff suspension: two fresh apexes, each lying above every
/// original point and incomparable to the other.
inline FiniteSpace suspension(const FiniteSpace& s,
                              const std::string& plus = "+",
                              const std::string& minus = "-") {
  if (s.has_element(plus) || s.has_element(minus) || plus == minus)
    throw input_error("suspension apex name collision");
  std::vector<std::string> elements = s.elements();
  elements.push_back(plus);
  elements.push_back(minus);
  std::vector<Mask> opens;
  for (std::size_t x = 0; x < s.size(); ++x)
    opens.push_back(s.min_open_mask(x));
  opens.push_back(s.universe() | bit(s.size()));
  opens.push_back(s.universe() | bit(s.size() + 1));
  return FiniteSpace::from_min_open(std::move(elements), std::move(opens));
}

/// Binary element-by-element matrix: entry (i,j) = 1 iff x_j in U_i.
struct TopogenousMatrix {
  std::vector<std::string> elements;
  std::vector<std::vector<bool>> entries;
};

inline TopogenousMatrix topogenous(const FiniteSpace& s) {
  TopogenousMatrix m;
  m.elements = s.elements();
  m.entries.assign(s.size(), std::vector<bool>(s.size(), false));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      m.entries[i][j] = contains(s.min_open_mask(i), j);
  return m;
}

namespace detail {

inline std::vector<Mask> family_masks(
    const std::vector<std::vector<std::string>>& sets,
    const std::vector<std::string>& universe) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < universe.size(); ++i) index[universe[i]] = i;
  std::vector<Mask> masks;
  for (const auto& set : sets) {
    Mask m = 0;
    for (const auto& name : set) {
      auto it = index.find(name);
      if (it == index.end())
        throw input_error("set member not in universe: " + name);
      m |= bit(it->second);
    }
    masks.push_back(m);
  }
  return masks;
}

}  // namespace detail

/// Every pair of universe elements is split by some set.
inline bool is_separating_system(
    const std::vector<std::vector<std::string>>& sets,
    const std::vector<std::string>& universe) {
  auto masks = detail::family_masks(sets, universe);
  for (std::size_t x = 0; x < universe.size(); ++x) {
    for (std::size_t y = x + 1; y < universe.size(); ++y) {
      bool split = false;
      for (Mask m : masks)
        if (contains(m, x) != contains(m, y)) { split = true; break; }
      if (!split) return false;
    }
  }
  return true;
}

/// Every ordered pair (x,y) has a set containing x but not y.
inline bool is_strongly_separating(
    const std::vector<std::vector<std::string>>& sets,
    const std::vector<std::string>& universe) {
  auto masks = detail::family_masks(sets, universe);
  for (std::size_t x = 0; x < universe.size(); ++x) {
    for (std::size_t y = 0; y < universe.size(); ++y) {
      if (x == y) continue;
      bool found = false;
      for (Mask m : masks)
        if (contains(m, x) && !contains(m, y)) { found = true; break; }
      if (!found) return false;
    }
  }
  return true;
}

}  // namespace finspace

#endif  // FINSPACE_FINITE_SPACE_HPP_
