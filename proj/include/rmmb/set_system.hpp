#pragma once

// Downward-closed set systems on ground sets of at most 63 elements, with the
// matroid machinery the mechanisms need: independence oracles, rank, circuits,
// greedy/exhaustive weight maximization, single-element basis updates, and the
// exchange-axiom witness used to build counterexamples.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rmmb/errors.hpp"

namespace rmmb {

using ElementId = int;
using WeightVector = std::vector<double>;

// Subset of [0, n) packed into one word.
struct ElemSet {
  std::uint64_t bits = 0;

  constexpr ElemSet() = default;
  constexpr explicit ElemSet(std::uint64_t raw) : bits(raw) {}

  static ElemSet of(std::initializer_list<ElementId> ids) {
    ElemSet s;
    for (ElementId e : ids) s = s.with(e);
    return s;
  }
  static constexpr ElemSet full(int n) {
    return ElemSet(n >= 64 ? ~0ull : (1ull << n) - 1);
  }

  bool contains(ElementId e) const { return (bits >> e) & 1u; }
  ElemSet with(ElementId e) const { return ElemSet(bits | (1ull << e)); }
  ElemSet without(ElementId e) const { return ElemSet(bits & ~(1ull << e)); }
  int size() const { return std::popcount(bits); }
  bool empty() const { return bits == 0; }
  bool subset_of(ElemSet o) const { return (bits & ~o.bits) == 0; }
  // Valid only on nonempty sets.
  ElementId min_element() const { return std::countr_zero(bits); }

  std::vector<ElementId> to_vector() const {
    std::vector<ElementId> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (std::uint64_t b = bits; b; b &= b - 1)
      out.push_back(std::countr_zero(b));
    return out;
  }

  friend bool operator==(ElemSet a, ElemSet b) { return a.bits == b.bits; }
  friend bool operator!=(ElemSet a, ElemSet b) { return a.bits != b.bits; }
  friend ElemSet operator|(ElemSet a, ElemSet b) { return ElemSet(a.bits | b.bits); }
  friend ElemSet operator&(ElemSet a, ElemSet b) { return ElemSet(a.bits & b.bits); }
  friend ElemSet operator-(ElemSet a, ElemSet b) { return ElemSet(a.bits & ~b.bits); }
};

using Circuit = ElemSet;

// Order on subsets as ascending id sequences; a proper prefix sorts first.
// {0,4} < {4}, {0,1,2} < {0,2}.
inline bool lex_less(ElemSet a, ElemSet b) {
  if (a.bits == b.bits) return false;
  std::uint64_t diff = a.bits ^ b.bits;
  std::uint64_t low = diff & (0 - diff);
  std::uint64_t at_or_above = ~(low - 1);
  if (a.bits & low) return (b.bits & at_or_above) != 0;
  return (a.bits & at_or_above) == 0;
}

inline bool size_lex_less(ElemSet a, ElemSet b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return lex_less(a, b);
}

namespace detail {

// Union-find over graph vertices; detects the cycle an edge set closes.
class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }
  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }
  // False when a and b already share a component.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

class SetSystem {
 public:
  enum class Kind { Explicit, Uniform, Graphic, Transversal };

  // family lists independent sets; with maximal_only the downward closure is
  // generated, otherwise the family must already contain it.
  static SetSystem explicit_family(int n, const std::vector<ElemSet>& family,
                                   bool maximal_only = false) {
    SetSystem s(Kind::Explicit, n);
    if (n > kEnumGuard)
      throw contract_error("explicit set system limited to " +
                           std::to_string(kEnumGuard) + " elements");
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::uint64_t> queue;
    auto push = [&](std::uint64_t bits) {
      if (seen.insert(bits).second) queue.push_back(bits);
    };
    for (ElemSet k : family) {
      if (!k.subset_of(ElemSet::full(n)))
        throw contract_error("independent set uses an element outside the ground set");
      push(k.bits);
    }
    if (maximal_only) {
      push(0);
      for (std::size_t i = 0; i < queue.size(); ++i) {
        std::uint64_t cur = queue[i];
        for (std::uint64_t b = cur; b; b &= b - 1)
          push(cur & ~(b & (0 - b)));
      }
    } else {
      if (!seen.count(0))
        throw contract_error("independent-set family must contain the empty set");
      for (std::uint64_t k : queue)
        for (std::uint64_t b = k; b; b &= b - 1)
          if (!seen.count(k & ~(b & (0 - b))))
            throw contract_error("independent-set family is not downward-closed");
    }
    s.family_.assign(queue.begin(), queue.end());
    std::sort(s.family_.begin(), s.family_.end());
    s.member_ = std::move(seen);
    s.matroid_ = s.family_exchange_ok();
    return s;
  }

  // All sets of size at most k.
  static SetSystem uniform(int n, int k) {
    SetSystem s(Kind::Uniform, n);
    if (k < 0 || k > n) throw contract_error("uniform rank bound out of range");
    s.k_ = k;
    s.matroid_ = true;
    return s;
  }

  // Elements are the edges, in the given order; independent = forest.
  // Self-loops are never independent alone; parallel edges are distinct.
  static SetSystem graphic(int n_vertices,
                           const std::vector<std::pair<int, int>>& edges) {
    SetSystem s(Kind::Graphic, static_cast<int>(edges.size()));
    if (n_vertices < 0) throw contract_error("negative vertex count");
    for (auto [u, v] : edges)
      if (u < 0 || u >= n_vertices || v < 0 || v >= n_vertices)
        throw contract_error("edge endpoint outside the vertex range");
    s.vertices_ = n_vertices;
    s.edges_ = edges;
    s.matroid_ = true;
    return s;
  }

  // Elements are the left vertices; adjacency[i] lists right vertices in
  // [0, n_right); independent = matchable into distinct right vertices.
  static SetSystem transversal(const std::vector<std::vector<int>>& adjacency,
                               int n_right) {
    SetSystem s(Kind::Transversal, static_cast<int>(adjacency.size()));
    if (n_right < 0) throw contract_error("negative right-side size");
    for (const auto& row : adjacency)
      for (int r : row)
        if (r < 0 || r >= n_right)
          throw contract_error("adjacency entry outside the right-side range");
    s.adjacency_ = adjacency;
    s.n_right_ = n_right;
    s.matroid_ = true;
    return s;
  }

  int ground_size() const { return n_; }
  Kind kind() const { return kind_; }
  bool is_matroid() const { return matroid_; }

  int uniform_k() const { return k_; }
  int graphic_vertices() const { return vertices_; }
  const std::vector<std::pair<int, int>>& graphic_edges() const { return edges_; }
  const std::vector<std::vector<int>>& transversal_adjacency() const { return adjacency_; }
  int transversal_right_size() const { return n_right_; }

  bool is_independent(ElemSet s) const {
    check_subset(s);
    switch (kind_) {
      case Kind::Explicit:
        return member_.count(s.bits) != 0;
      case Kind::Uniform:
        return s.size() <= k_;
      case Kind::Graphic: {
        detail::DisjointSets dsu(vertices_);
        for (ElementId e : s.to_vector()) {
          auto [u, v] = edges_[static_cast<std::size_t>(e)];
          if (u == v || !dsu.unite(u, v)) return false;
        }
        return true;
      }
      case Kind::Transversal:
        return matchable(s);
    }
    return false;
  }

  // True for every constructible system; explicit construction rejects
  // non-closed families, so this re-checks the stored family.
  bool validate_downward_closed() const {
    if (kind_ != Kind::Explicit) return true;
    for (std::uint64_t k : family_)
      for (std::uint64_t b = k; b; b &= b - 1)
        if (!member_.count(k & ~(b & (0 - b)))) return false;
    return true;
  }

  static bool family_downward_closed(const std::vector<ElemSet>& family) {
    std::unordered_set<std::uint64_t> member;
    for (ElemSet k : family) member.insert(k.bits);
    if (!member.count(0)) return false;
    for (ElemSet k : family)
      for (std::uint64_t b = k.bits; b; b &= b - 1)
        if (!member.count(k.bits & ~(b & (0 - b)))) return false;
    return true;
  }

  int rank(ElemSet s) const {
    check_subset(s);
    if (kind_ == Kind::Explicit) {
      int best = 0;
      for (std::uint64_t k : family_)
        if (ElemSet(k).subset_of(s)) best = std::max(best, ElemSet(k).size());
      return best;
    }
    ElemSet cur;
    for (ElementId e : s.to_vector())
      if (is_independent(cur.with(e))) cur = cur.with(e);
    return cur.size();
  }
  int rank() const { return rank(ElemSet::full(n_)); }

  // Restriction to s, relabeled onto [0, |s|) in ascending id order.
  SetSystem restriction(ElemSet s) const {
    check_subset(s);
    std::vector<ElementId> keep = s.to_vector();
    int m = static_cast<int>(keep.size());
    switch (kind_) {
      case Kind::Uniform:
        return uniform(m, std::min(k_, m));
      case Kind::Graphic: {
        std::vector<std::pair<int, int>> sub;
        sub.reserve(keep.size());
        for (ElementId e : keep) sub.push_back(edges_[static_cast<std::size_t>(e)]);
        return graphic(vertices_, sub);
      }
      case Kind::Transversal: {
        std::vector<std::vector<int>> sub;
        sub.reserve(keep.size());
        for (ElementId e : keep) sub.push_back(adjacency_[static_cast<std::size_t>(e)]);
        return transversal(sub, n_right_);
      }
      case Kind::Explicit: {
        std::vector<int> pos(static_cast<std::size_t>(n_), -1);
        for (int i = 0; i < m; ++i) pos[static_cast<std::size_t>(keep[i])] = i;
        std::vector<ElemSet> fam;
        for (std::uint64_t k : family_) {
          if (!ElemSet(k).subset_of(s)) continue;
          ElemSet relabeled;
          for (ElementId e : ElemSet(k).to_vector())
            relabeled = relabeled.with(pos[static_cast<std::size_t>(e)]);
          fam.push_back(relabeled);
        }
        return explicit_family(m, fam);
      }
    }
    throw contract_error("unreachable set-system kind");
  }

  // Unique circuit inside independent+x, or nullopt when independent+x stays
  // independent. Matroids only.
  std::optional<Circuit> find_circuit(ElemSet independent, ElementId x) const {
    require_matroid("find_circuit");
    check_element(x);
    if (!is_independent(independent))
      throw contract_error("find_circuit requires an independent base set");
    if (independent.contains(x))
      throw contract_error("element is already in the base set");
    ElemSet grown = independent.with(x);
    if (is_independent(grown)) return std::nullopt;
    Circuit c = grown;
    for (ElementId e : independent.to_vector())
      if (!is_independent(c.without(e))) c = c.without(e);
    return c;
  }

  // Minimal dependent sets, in (size, lex) order.
  std::vector<Circuit> enumerate_circuits() const {
    if (n_ > kCircuitGuard)
      throw contract_error("circuit enumeration limited to " +
                           std::to_string(kCircuitGuard) + " elements");
    std::vector<Circuit> out;
    for (std::uint64_t m = 1; m < (1ull << n_); ++m) {
      ElemSet s(m);
      if (is_independent(s)) continue;
      bool minimal = true;
      for (std::uint64_t b = m; b && minimal; b &= b - 1)
        if (!is_independent(ElemSet(m & ~(b & (0 - b))))) minimal = false;
      if (minimal) out.push_back(s);
    }
    std::sort(out.begin(), out.end(), size_lex_less);
    return out;
  }

  // Descending weight, ascending id on ties; zero-weight elements skipped.
  ElemSet greedy_max_weight(const WeightVector& w) const {
    check_weights(w);
    std::vector<ElementId> order(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](ElementId a, ElementId b) {
      if (w[static_cast<std::size_t>(a)] != w[static_cast<std::size_t>(b)])
        return w[static_cast<std::size_t>(a)] > w[static_cast<std::size_t>(b)];
      return a < b;
    });
    ElemSet cur;
    for (ElementId e : order) {
      if (w[static_cast<std::size_t>(e)] <= 0.0) continue;
      if (is_independent(cur.with(e))) cur = cur.with(e);
    }
    return cur;
  }

  // Exhaustive maximum over independent subsets of the positive-weight
  // elements; the lex-least maximizer on ties.
  ElemSet brute_force_max_weight(const WeightVector& w) const {
    check_weights(w);
    if (n_ > kEnumGuard)
      throw contract_error("exhaustive search limited to " +
                           std::to_string(kEnumGuard) + " elements");
    ElemSet positive;
    for (int i = 0; i < n_; ++i)
      if (w[static_cast<std::size_t>(i)] > 0.0) positive = positive.with(i);
    ElemSet best;
    double best_total = 0.0;
    auto consider = [&](ElemSet k) {
      double total = 0.0;
      for (ElementId e : k.to_vector()) total += w[static_cast<std::size_t>(e)];
      if (total > best_total ||
          (total == best_total && lex_less(k, best))) {
        best = k;
        best_total = total;
      }
    };
    if (kind_ == Kind::Explicit) {
      for (std::uint64_t k : family_)
        if (ElemSet(k).subset_of(positive)) consider(ElemSet(k));
    } else {
      std::uint64_t p = positive.bits;
      for (std::uint64_t m = p;; m = (m - 1) & p) {
        if (is_independent(ElemSet(m))) consider(ElemSet(m));
        if (m == 0) break;
      }
    }
    return best;
  }

  // Re-optimizes base when x's weight becomes relevant: add x if it fits,
  // otherwise swap out the weakest element of the circuit it closes.
  // Matroids only; base must be greedy-optimal for w restricted to E - x.
  ElemSet incremental_update(ElemSet base, ElementId x, const WeightVector& w) const {
    require_matroid("incremental_update");
    check_weights(w);
    check_element(x);
    if (!is_independent(base))
      throw contract_error("incremental_update requires an independent base set");
    if (base.contains(x))
      throw contract_error("element is already in the base set");
    if (w[static_cast<std::size_t>(x)] <= 0.0) return base;
    ElemSet grown = base.with(x);
    if (is_independent(grown)) return grown;
    Circuit c = *find_circuit(base, x);
    ElementId weakest = -1;
    for (ElementId e : c.to_vector()) {
      if (weakest < 0) {
        weakest = e;
        continue;
      }
      double we = w[static_cast<std::size_t>(e)];
      double wk = w[static_cast<std::size_t>(weakest)];
      if (we < wk || (we == wk && e > weakest)) weakest = e;
    }
    return grown.without(weakest);
  }

  // Exchange-axiom violation (I, J): |I| > |J| and no element of I - J
  // extends J. Searches the minimum-cardinality violating ground subset V
  // (ties by lex), then the first violating pair in (size, lex) order; the
  // result always satisfies, within the restriction to V = I | J:
  //   (1) every independent K with |K| >= |I| contains I - J,
  //   (2) J - I is nonempty,
  //   (3) I has maximum cardinality.
  std::optional<std::pair<ElemSet, ElemSet>> nonmatroid_witness() const {
    if (matroid_) return std::nullopt;
    if (n_ > kEnumGuard)
      throw contract_error("witness search limited to " +
                           std::to_string(kEnumGuard) + " elements");
    for (int vsize = 2; vsize <= n_; ++vsize) {
      std::vector<int> idx(static_cast<std::size_t>(vsize));
      for (int i = 0; i < vsize; ++i) idx[static_cast<std::size_t>(i)] = i;
      while (true) {
        ElemSet v;
        for (int e : idx) v = v.with(e);
        if (auto pair = violating_pair_within(v)) return pair;
        int i = vsize - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n_ - vsize + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < vsize; ++j)
          idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
    throw std::logic_error("non-matroid system yielded no exchange violation");
  }

  // Independent sets in (size, lex) order. Enumeration-guarded.
  std::vector<ElemSet> independent_sets() const {
    std::vector<ElemSet> out;
    if (kind_ == Kind::Explicit) {
      out.reserve(family_.size());
      for (std::uint64_t k : family_) out.push_back(ElemSet(k));
    } else {
      if (n_ > kEnumGuard)
        throw contract_error("independent-set enumeration limited to " +
                             std::to_string(kEnumGuard) + " elements");
      for (std::uint64_t m = 0; m < (1ull << n_); ++m)
        if (is_independent(ElemSet(m))) out.push_back(ElemSet(m));
    }
    std::sort(out.begin(), out.end(), size_lex_less);
    return out;
  }

  std::vector<ElemSet> maximal_independent_sets() const {
    std::vector<ElemSet> out;
    for (ElemSet k : independent_sets()) {
      bool maximal = true;
      for (int e = 0; e < n_ && maximal; ++e)
        if (!k.contains(e) && is_independent(k.with(e))) maximal = false;
      if (maximal) out.push_back(k);
    }
    return out;
  }

 private:
  SetSystem(Kind kind, int n) : kind_(kind), n_(n) {
    if (n < 0 || n > 63) throw contract_error("ground set size out of range");
  }

  static constexpr int kEnumGuard = 20;
  static constexpr int kCircuitGuard = 16;

  void check_subset(ElemSet s) const {
    if (!s.subset_of(ElemSet::full(n_)))
      throw contract_error("set uses an element outside the ground set");
  }
  void check_element(ElementId e) const {
    if (e < 0 || e >= n_) throw contract_error("element id out of range");
  }
  void check_weights(const WeightVector& w) const {
    if (static_cast<int>(w.size()) != n_)
      throw contract_error("weight vector length mismatch");
    for (double x : w)
      if (x < 0.0) throw contract_error("negative weight");
  }
  void require_matroid(const char* op) const {
    if (!matroid_)
      throw contract_error(std::string(op) + " requires a matroid");
  }

  bool matchable(ElemSet s) const {
    std::vector<int> match_right(static_cast<std::size_t>(n_right_), -1);
    std::vector<ElementId> left = s.to_vector();
    std::vector<char> visited;
    // Kuhn's augmenting-path search, one left vertex at a time.
    auto augment = [&](auto&& self, ElementId u) -> bool {
      for (int r : adjacency_[static_cast<std::size_t>(u)]) {
        if (visited[static_cast<std::size_t>(r)]) continue;
        visited[static_cast<std::size_t>(r)] = 1;
        if (match_right[static_cast<std::size_t>(r)] < 0 ||
            self(self, match_right[static_cast<std::size_t>(r)])) {
          match_right[static_cast<std::size_t>(r)] = u;
          return true;
        }
      }
      return false;
    };
    for (ElementId u : left) {
      visited.assign(static_cast<std::size_t>(n_right_), 0);
      if (!augment(augment, u)) return false;
    }
    return true;
  }

  // Exchange axiom restricted to |A| = |B| + 1; with downward closure this
  // is equivalent to the unrestricted axiom.
  bool family_exchange_ok() const {
    std::vector<std::vector<std::uint64_t>> by_size(64);
    int max_size = 0;
    for (std::uint64_t k : family_) {
      int sz = std::popcount(k);
      by_size[static_cast<std::size_t>(sz)].push_back(k);
      max_size = std::max(max_size, sz);
    }
    for (int s = 0; s < max_size; ++s) {
      for (std::uint64_t a : by_size[static_cast<std::size_t>(s) + 1]) {
        for (std::uint64_t b : by_size[static_cast<std::size_t>(s)]) {
          bool extended = false;
          for (std::uint64_t d = a & ~b; d && !extended; d &= d - 1)
            if (member_.count(b | (d & (0 - d)))) extended = true;
          if (!extended) return false;
        }
      }
    }
    return true;
  }

  std::optional<std::pair<ElemSet, ElemSet>> violating_pair_within(ElemSet v) const {
    std::vector<ElemSet> fam;
    std::unordered_set<std::uint64_t> member;
    for (std::uint64_t k : family_) {
      if (!ElemSet(k).subset_of(v)) continue;
      fam.push_back(ElemSet(k));
      member.insert(k);
    }
    std::sort(fam.begin(), fam.end(), size_lex_less);
    for (ElemSet a : fam) {
      for (ElemSet b : fam) {
        if (a.size() <= b.size()) continue;
        bool extended = false;
        for (ElementId x : (a - b).to_vector())
          if (member.count(b.with(x).bits)) {
            extended = true;
            break;
          }
        if (extended) continue;
        verify_witness_properties(fam, a, b, v);
        return std::make_pair(a, b);
      }
    }
    return std::nullopt;
  }

  // The minimality of V makes these hold for any violating pair found
  // inside it; failure here means the search itself is broken.
  static void verify_witness_properties(const std::vector<ElemSet>& fam,
                                        ElemSet i, ElemSet j, ElemSet v) {
    if ((i | j) != v)
      throw std::logic_error("witness pair does not span the violating subset");
    if ((j - i).empty())
      throw std::logic_error("witness J adds no element beyond I");
    int max_size = 0;
    for (ElemSet k : fam) max_size = std::max(max_size, k.size());
    if (i.size() != max_size)
      throw std::logic_error("witness I is not maximum-cardinality");
    for (ElemSet k : fam)
      if (k.size() >= i.size() && !(i - j).subset_of(k))
        throw std::logic_error("an equally large independent set avoids I - J");
  }

  Kind kind_;
  int n_ = 0;
  bool matroid_ = false;
  // Explicit
  std::vector<std::uint64_t> family_;
  std::unordered_set<std::uint64_t> member_;
  // Uniform
  int k_ = 0;
  // Graphic
  int vertices_ = 0;
  std::vector<std::pair<int, int>> edges_;
  // Transversal
  std::vector<std::vector<int>> adjacency_;
  int n_right_ = 0;
};

}  // namespace rmmb
