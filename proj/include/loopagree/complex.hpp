#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "loopagree/errors.hpp"

namespace loopagree {

using VertexId = std::string;

// A simplex is kept in canonical form: vertex ids sorted, no duplicates.
// Simplexes compare lexicographically on the sorted ids, which is the
// canonical ordering used for all deterministic iteration.
using Simplex = std::vector<VertexId>;

inline Simplex canonical_simplex(Simplex s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

// Abstract simplicial complex, stored downward closed. The simplex set is
// shared so copies are cheap and values can be handed around freely.
class Complex {
 public:
  using SimplexSet = std::set<Simplex>;

  Complex() : simplexes_(std::make_shared<const SimplexSet>()), hash_(hash_of(*simplexes_)) {}

  // The caller guarantees `closed` is downward closed; all factory functions
  // in this module do.
  explicit Complex(SimplexSet closed)
      : simplexes_(std::make_shared<const SimplexSet>(std::move(closed))),
        hash_(hash_of(*simplexes_)) {}

  const SimplexSet& simplexes() const { return *simplexes_; }
  bool contains(const Simplex& s) const { return simplexes_->count(s) != 0; }
  bool empty() const { return simplexes_->empty(); }
  std::size_t size() const { return simplexes_->size(); }
  std::uint64_t hash() const { return hash_; }

  std::vector<VertexId> vertices() const {
    std::vector<VertexId> out;
    for (const Simplex& s : *simplexes_)
      if (s.size() == 1) out.push_back(s[0]);
    return out;  // canonical order, inherited from the set
  }

  std::size_t vertex_count() const {
    std::size_t n = 0;
    for (const Simplex& s : *simplexes_)
      if (s.size() == 1) ++n;
    return n;
  }

  friend bool operator==(const Complex& a, const Complex& b) {
    if (a.hash_ != b.hash_) return false;
    return a.simplexes_ == b.simplexes_ || *a.simplexes_ == *b.simplexes_;
  }
  friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

 private:
  static std::uint64_t hash_of(const SimplexSet& ss) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&h](unsigned char c) {
      h ^= c;
      h *= 1099511628211ull;
    };
    for (const Simplex& s : ss) {
      for (const VertexId& v : s) {
        for (char c : v) mix(static_cast<unsigned char>(c));
        mix(0x1f);
      }
      mix(0x1e);
    }
    return h;
  }

  std::shared_ptr<const SimplexSet> simplexes_;
  std::uint64_t hash_;
};

namespace detail {

// All nonempty subsets of a canonical simplex, canonical form each.
inline void insert_closure(Complex::SimplexSet& out, const Simplex& s) {
  const std::size_t n = s.size();
  if (n >= 30) throw Error(Errc::empty_input, "simplex too large to close over");
  for (std::uint64_t mask = 1; mask < (1ull << n); ++mask) {
    Simplex sub;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1ull << i)) sub.push_back(s[i]);
    out.insert(std::move(sub));
  }
}

}  // namespace detail

inline Complex build(const std::vector<std::vector<VertexId>>& maximal) {
  if (maximal.empty()) throw Error(Errc::empty_input, "no simplexes given");
  Complex::SimplexSet out;
  for (const auto& raw : maximal) {
    if (raw.empty()) throw Error(Errc::empty_input, "empty simplex in input");
    Simplex s = raw;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw Error(Errc::duplicate_vertex, "repeated vertex id in a simplex");
    detail::insert_closure(out, s);
  }
  return Complex(std::move(out));
}

inline int dimension(const Complex& c) {
  if (c.empty()) throw Error(Errc::empty_complex, "dimension of empty complex");
  std::size_t m = 0;
  for (const Simplex& s : c.simplexes()) m = std::max(m, s.size());
  return static_cast<int>(m) - 1;
}

inline Complex skeleton(const Complex& c, std::size_t k) {
  Complex::SimplexSet out;
  for (const Simplex& s : c.simplexes())
    if (s.size() <= k + 1) out.insert(s);
  return Complex(std::move(out));
}

inline bool is_connected(const Complex& c) {
  if (c.empty()) throw Error(Errc::empty_complex, "connectivity of empty complex");
  std::map<VertexId, std::vector<VertexId>> adj;
  for (const Simplex& s : c.simplexes()) {
    if (s.size() == 1) adj[s[0]];
    if (s.size() == 2) {
      adj[s[0]].push_back(s[1]);
      adj[s[1]].push_back(s[0]);
    }
  }
  std::set<VertexId> seen;
  std::queue<VertexId> q;
  q.push(adj.begin()->first);
  seen.insert(adj.begin()->first);
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop();
    for (const VertexId& w : adj[v])
      if (seen.insert(w).second) q.push(w);
  }
  return seen.size() == adj.size();
}

// Bit-exact id composition rules.

inline std::string product_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

inline VertexId product_vertex_id(const VertexId& left, const VertexId& right) {
  return product_escape(left) + "|" + product_escape(right);
}

inline std::pair<VertexId, VertexId> split_product_vertex_id(const VertexId& id) {
  std::string left, right;
  std::string* cur = &left;
  bool seen_bar = false;
  for (std::size_t i = 0; i < id.size(); ++i) {
    char c = id[i];
    if (c == '\\') {
      if (i + 1 >= id.size()) throw Error(Errc::parse_error, "dangling escape in product id");
      cur->push_back(id[++i]);
    } else if (c == '|') {
      if (seen_bar) throw Error(Errc::parse_error, "extra separator in product id: " + id);
      seen_bar = true;
      cur = &right;
    } else {
      cur->push_back(c);
    }
  }
  if (!seen_bar) throw Error(Errc::parse_error, "not a product vertex id: " + id);
  return {left, right};
}

inline std::string bary_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == ',' || c == '{' || c == '}') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

inline VertexId bary_vertex_id(const Simplex& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out.push_back(',');
    out += bary_escape(s[i]);
  }
  out.push_back('}');
  return out;
}

inline std::vector<Simplex> maximal_simplexes(const Complex& c) {
  // Downward closure means s is non-maximal iff it is a facet of some other
  // simplex, so one pass over facets beats the all-pairs inclusion test.
  std::set<Simplex> facets;
  for (const Simplex& t : c.simplexes())
    if (t.size() >= 2)
      for (std::size_t i = 0; i < t.size(); ++i) {
        Simplex f;
        f.reserve(t.size() - 1);
        for (std::size_t j = 0; j < t.size(); ++j)
          if (j != i) f.push_back(t[j]);
        facets.insert(std::move(f));
      }
  std::vector<Simplex> out;
  for (const Simplex& s : c.simplexes())
    if (!facets.count(s)) out.push_back(s);
  return out;
}

inline Complex product(const Complex& a, const Complex& b) {
  if (a.empty() || b.empty()) throw Error(Errc::empty_complex, "product of empty complex");
  // sigma is a simplex iff both projections are; every such sigma sits inside
  // some maximal "brick" sigma1 x sigma2, and every subset of a brick qualifies.
  Complex::SimplexSet out;
  for (const Simplex& sa : maximal_simplexes(a))
    for (const Simplex& sb : maximal_simplexes(b)) {
      Simplex brick;
      for (const VertexId& x : sa)
        for (const VertexId& y : sb) brick.push_back(product_vertex_id(x, y));
      detail::insert_closure(out, canonical_simplex(std::move(brick)));
    }
  return Complex(std::move(out));
}

// skel^2(a x b) without materializing the high-dimensional product: only
// subsets of size <= 3 of each brick are enumerated.
inline Complex product_skel2(const Complex& a, const Complex& b) {
  if (a.empty() || b.empty()) throw Error(Errc::empty_complex, "product of empty complex");
  Complex::SimplexSet out;
  for (const Simplex& sa : maximal_simplexes(a))
    for (const Simplex& sb : maximal_simplexes(b)) {
      std::vector<VertexId> brick;
      for (const VertexId& x : sa)
        for (const VertexId& y : sb) brick.push_back(product_vertex_id(x, y));
      std::sort(brick.begin(), brick.end());
      const std::size_t n = brick.size();
      for (std::size_t i = 0; i < n; ++i) {
        out.insert({brick[i]});
        for (std::size_t j = i + 1; j < n; ++j) {
          out.insert({brick[i], brick[j]});
          for (std::size_t k = j + 1; k < n; ++k) out.insert({brick[i], brick[j], brick[k]});
        }
      }
    }
  return Complex(std::move(out));
}

namespace detail {

inline Complex barycentric_uncached(const Complex& c) {
  // Vertices of the result are simplexes of c; simplexes are chains strictly
  // ordered by inclusion. Chains are enumerated once each, by maximum element.
  std::vector<Simplex> simps(c.simplexes().begin(), c.simplexes().end());
  std::map<Simplex, int> index;
  for (std::size_t i = 0; i < simps.size(); ++i) index[simps[i]] = static_cast<int>(i);

  std::vector<VertexId> names(simps.size());
  for (std::size_t i = 0; i < simps.size(); ++i) names[i] = bary_vertex_id(simps[i]);

  // chains_ending[i]: all chains whose maximum is simplex i, as index lists.
  std::vector<std::vector<std::vector<int>>> chains_ending(simps.size());
  std::vector<int> order(simps.size());
  for (std::size_t i = 0; i < simps.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return simps[x].size() < simps[y].size(); });

  Complex::SimplexSet out;
  for (int idx : order) {
    const Simplex& s = simps[idx];
    auto& mine = chains_ending[idx];
    mine.push_back({idx});
    const std::size_t n = s.size();
    for (std::uint64_t mask = 1; mask + 1 < (1ull << n); ++mask) {
      Simplex face;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1ull << i)) face.push_back(s[i]);
      auto it = index.find(face);
      if (it == index.end()) continue;  // cannot happen in a closed complex
      for (const auto& ch : chains_ending[it->second]) {
        std::vector<int> ext = ch;
        ext.push_back(idx);
        mine.push_back(std::move(ext));
      }
    }
    for (const auto& ch : mine) {
      Simplex bs;
      for (int i : ch) bs.push_back(names[i]);
      out.insert(canonical_simplex(std::move(bs)));
    }
  }
  return Complex(std::move(out));
}

}  // namespace detail

// Subdivisions of product complexes recur across verification and morphism
// composition; memoize by value. Pure observable behavior is unchanged.
inline Complex barycentric(const Complex& c) {
  if (c.empty()) throw Error(Errc::empty_complex, "barycentric of empty complex");
  static std::mutex mu;
  static std::unordered_map<std::uint64_t, std::vector<std::pair<Complex, Complex>>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(c.hash());
    if (it != cache.end())
      for (const auto& [key, value] : it->second)
        if (key == c) return value;
  }
  Complex result = detail::barycentric_uncached(c);
  std::lock_guard<std::mutex> lock(mu);
  cache[c.hash()].emplace_back(c, result);
  return result;
}

inline bool is_subcomplex(const Complex& d, const Complex& c) {
  for (const Simplex& s : d.simplexes())
    if (!c.contains(s)) return false;
  return true;
}

// With the intrinsic chain naming, the subcomplex of Bary(c) spanned by chains
// of d-simplexes is literally Bary(d).
inline Complex bary_subcomplex(const Complex& c, const Complex& d) {
  if (!is_subcomplex(d, c)) throw Error(Errc::not_subcomplex, "second complex is not a subcomplex of the first");
  return barycentric(d);
}

struct SimplicialMap {
  Complex source;
  Complex target;
  std::map<VertexId, VertexId> assignment;
};

inline Simplex image_simplex(const std::map<VertexId, VertexId>& assignment, const Simplex& s) {
  Simplex out;
  out.reserve(s.size());
  for (const VertexId& v : s) {
    auto it = assignment.find(v);
    if (it == assignment.end()) throw Error(Errc::partial_assignment, "vertex has no image: " + v);
    out.push_back(it->second);
  }
  return canonical_simplex(std::move(out));
}

inline bool check_simplicial(const SimplicialMap& m) {
  for (const Simplex& s : m.source.simplexes())
    if (s.size() == 1 && !m.assignment.count(s[0]))
      throw Error(Errc::partial_assignment, "no image for vertex " + s[0]);
  for (const Simplex& s : m.source.simplexes())
    if (!m.target.contains(image_simplex(m.assignment, s))) return false;
  return true;
}

inline SimplicialMap induced_bary_map(const SimplicialMap& m) {
  if (!check_simplicial(m)) throw Error(Errc::not_simplicial, "map does not send simplexes to simplexes");
  SimplicialMap out;
  out.source = barycentric(m.source);
  out.target = barycentric(m.target);
  for (const Simplex& s : m.source.simplexes())
    out.assignment[bary_vertex_id(s)] = bary_vertex_id(image_simplex(m.assignment, s));
  // Chains map to weakly increasing chains, which dedup to chains: simplicial
  // by construction.
  return out;
}

inline SimplicialMap identity_map(const Complex& c) {
  SimplicialMap m;
  m.source = c;
  m.target = c;
  for (const Simplex& s : c.simplexes())
    if (s.size() == 1) m.assignment[s[0]] = s[0];
  return m;
}

}  // namespace loopagree
