#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "loopagree/complex.hpp"
#include "loopagree/errors.hpp"
#include "loopagree/loops.hpp"
#include "loopagree/task.hpp"

namespace loopagree {

using Int = boost::multiprecision::cpp_int;

struct IntMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Int> a;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, Int(0)) {}

  Int& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const Int& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
    IntMatrix out(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
      for (std::size_t k = 0; k < x.cols; ++k) {
        const Int& v = x.at(i, k);
        if (v == 0) continue;
        for (std::size_t j = 0; j < y.cols; ++j) out.at(i, j) += v * y.at(k, j);
      }
    return out;
  }

  friend bool operator==(const IntMatrix& x, const IntMatrix& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }
};

struct Letter {
  int gen;
  int sign;  // +1 or -1

  friend bool operator==(Letter a, Letter b) { return a.gen == b.gen && a.sign == b.sign; }
};
using Word = std::vector<Letter>;

// Edge-path presentation of pi_1 of a connected 2-complex: spanning tree by
// breadth-first search in canonical vertex order, one generator per non-tree
// edge oriented low id -> high id, one relator per 2-simplex.
struct GroupPresentation {
  Complex complex;
  VertexId basepoint;
  std::vector<std::pair<VertexId, VertexId>> generators;
  std::set<std::pair<VertexId, VertexId>> tree;
  std::map<VertexId, VertexId> parent;  // BFS parent, basepoint excluded
  std::map<std::pair<VertexId, VertexId>, int> gen_index;
  std::vector<Word> relators;
};

inline GroupPresentation presentation(const Complex& c, const VertexId& basepoint) {
  if (c.empty()) throw Error(Errc::empty_complex, "presentation of empty complex");
  if (!c.contains({basepoint})) throw Error(Errc::unknown_basepoint, "basepoint " + basepoint + " not in complex");
  if (!is_connected(c)) throw Error(Errc::not_connected, "complex is not connected");

  std::map<VertexId, std::vector<VertexId>> adj;
  for (const Simplex& s : c.simplexes()) {
    if (s.size() == 1) adj[s[0]];
    if (s.size() == 2) {
      adj[s[0]].push_back(s[1]);
      adj[s[1]].push_back(s[0]);
    }
  }
  for (auto& [v, nb] : adj) std::sort(nb.begin(), nb.end());

  GroupPresentation p;
  p.complex = c;
  p.basepoint = basepoint;

  std::set<VertexId> visited{basepoint};
  std::queue<VertexId> q;
  q.push(basepoint);
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop();
    for (const VertexId& w : adj[v])
      if (visited.insert(w).second) {
        p.parent[w] = v;
        p.tree.insert(std::minmax(v, w));
        q.push(w);
      }
  }

  for (const Simplex& s : c.simplexes())
    if (s.size() == 2) {
      std::pair<VertexId, VertexId> e{s[0], s[1]};
      if (!p.tree.count(e)) {
        p.gen_index[e] = static_cast<int>(p.generators.size());
        p.generators.push_back(e);
      }
    }

  auto letter = [&p](const VertexId& a, const VertexId& b) -> std::optional<Letter> {
    auto e = std::minmax(a, b);
    if (p.tree.count(e)) return std::nullopt;
    return Letter{p.gen_index.at(e), a < b ? +1 : -1};
  };
  for (const Simplex& s : c.simplexes())
    if (s.size() == 3) {
      Word w;
      for (auto [x, y] : {std::pair{s[0], s[1]}, std::pair{s[1], s[2]}, std::pair{s[2], s[0]}})
        if (auto l = letter(x, y)) w.push_back(*l);
      p.relators.push_back(std::move(w));
    }
  return p;
}

inline EdgePath tree_path(const GroupPresentation& p, const VertexId& v) {
  EdgePath rev{v};
  VertexId cur = v;
  while (cur != p.basepoint) {
    auto it = p.parent.find(cur);
    if (it == p.parent.end()) throw Error(Errc::invalid_loop, "vertex not reached by spanning tree: " + v);
    cur = it->second;
    rev.push_back(cur);
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

// Loops based away from the basepoint are conjugated through the tree path;
// tree edges contribute nothing, so exponent sums are unaffected.
inline Word loop_word(const GroupPresentation& p, const EdgeLoop& loop) {
  if (loop.empty() || loop.front() != loop.back())
    throw Error(Errc::invalid_loop, "not a closed edge loop");
  EdgePath full;
  if (loop.front() != p.basepoint) {
    EdgePath pre = tree_path(p, loop.front());
    full = pre;
    full.insert(full.end(), loop.begin() + 1, loop.end());
    EdgePath back(pre.rbegin(), pre.rend());
    full.insert(full.end(), back.begin() + 1, back.end());
  } else {
    full = loop;
  }
  Word w;
  for (std::size_t i = 0; i + 1 < full.size(); ++i) {
    const VertexId &a = full[i], &b = full[i + 1];
    if (a == b) continue;
    auto e = std::minmax(a, b);
    if (p.tree.count(e)) continue;
    auto it = p.gen_index.find(e);
    if (it == p.gen_index.end())
      throw Error(Errc::invalid_loop, "edge {" + a + "," + b + "} is not in the complex");
    w.push_back(Letter{it->second, a < b ? +1 : -1});
  }
  return w;
}

// Closed loop representing one generator: tree path out, the edge, tree path back.
inline EdgeLoop closed_generator_loop(const GroupPresentation& p, int k) {
  const auto& [a, b] = p.generators.at(static_cast<std::size_t>(k));
  EdgePath pa = tree_path(p, a);
  EdgePath pb = tree_path(p, b);
  EdgeLoop out = pa;
  out.push_back(b);
  EdgePath back(pb.rbegin(), pb.rend());
  out.insert(out.end(), back.begin() + 1, back.end());
  return strip_stationary(out);
}

inline std::vector<Int> exponent_vector(const Word& w, std::size_t gens) {
  std::vector<Int> e(gens, Int(0));
  for (Letter l : w) e[static_cast<std::size_t>(l.gen)] += l.sign;
  return e;
}

// ---------------------------------------------------------------------------
// Smith normal form (dense, arbitrary precision).

inline std::tuple<Int, Int, Int> extended_gcd(Int a, Int b) {  // g, x, y: a*x + b*y = g >= 0
  Int x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    Int q = a / b;
    Int t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
    t = y0 - q * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  return {a, x0, y0};
}

struct SmithResult {
  IntMatrix U, D, V;
  IntMatrix Vinv;  // inverse of V, tracked alongside; U*m*V == D
};

inline SmithResult smith_normal_form(const IntMatrix& input) {
  IntMatrix m = input;
  const std::size_t r = m.rows, c = m.cols;
  SmithResult s{IntMatrix::identity(r), IntMatrix(), IntMatrix::identity(c),
                IntMatrix::identity(c)};
  IntMatrix& U = s.U;
  IntMatrix& V = s.V;
  IntMatrix& Vinv = s.Vinv;

  auto row_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t t = 0; t < c; ++t) std::swap(m.at(i, t), m.at(j, t));
    for (std::size_t t = 0; t < r; ++t) std::swap(U.at(i, t), U.at(j, t));
  };
  auto col_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t t = 0; t < r; ++t) std::swap(m.at(t, i), m.at(t, j));
    for (std::size_t t = 0; t < c; ++t) std::swap(V.at(t, i), V.at(t, j));
    for (std::size_t t = 0; t < c; ++t) std::swap(Vinv.at(i, t), Vinv.at(j, t));
  };
  auto row_add = [&](std::size_t i, std::size_t k, const Int& q) {  // row_i += q*row_k
    if (q == 0) return;
    for (std::size_t t = 0; t < c; ++t) m.at(i, t) += q * m.at(k, t);
    for (std::size_t t = 0; t < r; ++t) U.at(i, t) += q * U.at(k, t);
  };
  auto col_add = [&](std::size_t j, std::size_t k, const Int& q) {  // col_j += q*col_k
    if (q == 0) return;
    for (std::size_t t = 0; t < r; ++t) m.at(t, j) += q * m.at(t, k);
    for (std::size_t t = 0; t < c; ++t) V.at(t, j) += q * V.at(t, k);
    for (std::size_t t = 0; t < c; ++t) Vinv.at(k, t) -= q * Vinv.at(j, t);
  };
  auto col_negate = [&](std::size_t j) {
    for (std::size_t t = 0; t < r; ++t) m.at(t, j) = -m.at(t, j);
    for (std::size_t t = 0; t < c; ++t) V.at(t, j) = -V.at(t, j);
    for (std::size_t t = 0; t < c; ++t) Vinv.at(j, t) = -Vinv.at(j, t);
  };
  // Unimodular 2x2 mixes sending (pivot, entry) to (gcd, 0).  Plain
  // remainder-and-swap reduction is not safe here: its pivot shrinks but
  // need not divide its predecessor, and on unlucky dense blocks the
  // off-line entries double in size per round while the pivot crawls down.
  // The Bezout mix forces pivot_{k+1} | pivot_k, so a stage can only see
  // O(log pivot) of them.
  auto row_gcd = [&](std::size_t p_, std::size_t i) {
    auto [g, a, b] = extended_gcd(m.at(p_, p_), m.at(i, p_));
    const Int dg = m.at(p_, p_) / g, xg = m.at(i, p_) / g;
    for (std::size_t k = 0; k < c; ++k) {
      Int top = a * m.at(p_, k) + b * m.at(i, k);
      m.at(i, k) = dg * m.at(i, k) - xg * m.at(p_, k);
      m.at(p_, k) = std::move(top);
    }
    for (std::size_t k = 0; k < r; ++k) {
      Int top = a * U.at(p_, k) + b * U.at(i, k);
      U.at(i, k) = dg * U.at(i, k) - xg * U.at(p_, k);
      U.at(p_, k) = std::move(top);
    }
  };
  auto col_gcd = [&](std::size_t p_, std::size_t j) {
    auto [g, a, b] = extended_gcd(m.at(p_, p_), m.at(p_, j));
    const Int dg = m.at(p_, p_) / g, xg = m.at(p_, j) / g;
    for (std::size_t k = 0; k < r; ++k) {
      Int left = a * m.at(k, p_) + b * m.at(k, j);
      m.at(k, j) = dg * m.at(k, j) - xg * m.at(k, p_);
      m.at(k, p_) = std::move(left);
    }
    for (std::size_t k = 0; k < c; ++k) {
      Int left = a * V.at(k, p_) + b * V.at(k, j);
      V.at(k, j) = dg * V.at(k, j) - xg * V.at(k, p_);
      V.at(k, p_) = std::move(left);
    }
    for (std::size_t k = 0; k < c; ++k) {
      Int top = dg * Vinv.at(p_, k) + xg * Vinv.at(j, k);
      Vinv.at(j, k) = a * Vinv.at(j, k) - b * Vinv.at(p_, k);
      Vinv.at(p_, k) = std::move(top);
    }
  };

  std::size_t t = 0;
  while (t < r && t < c) {
    // Pivot: smallest nonzero absolute value in the remaining submatrix,
    // ties broken by position.
    std::size_t pr = r, pc = c;
    Int best = 0;
    for (std::size_t i = t; i < r; ++i)
      for (std::size_t j = t; j < c; ++j) {
        const Int& v = m.at(i, j);
        if (v == 0) continue;
        Int av = v < 0 ? -v : v;
        if (pr == r || av < best) {
          best = av;
          pr = i;
          pc = j;
        }
      }
    if (pr == r) break;
    row_swap(t, pr);
    col_swap(t, pc);

    while (true) {
      bool mixed = true;
      while (mixed) {
        mixed = false;
        for (std::size_t i = t + 1; i < r; ++i) {
          const Int x = m.at(i, t);
          if (x == 0) continue;
          if (x % m.at(t, t) == 0) {
            row_add(i, t, -(x / m.at(t, t)));
          } else {
            row_gcd(t, i);
            mixed = true;
          }
        }
        for (std::size_t j = t + 1; j < c; ++j) {
          const Int x = m.at(t, j);
          if (x == 0) continue;
          if (x % m.at(t, t) == 0) {
            col_add(j, t, -(x / m.at(t, t)));
          } else {
            col_gcd(t, j);  // may repopulate column t; the next sweep re-clears it
            mixed = true;
          }
        }
      }
      // Divisibility chain: fold in a row holding a non-multiple, if any.
      bool redo = false;
      for (std::size_t i = t + 1; i < r && !redo; ++i)
        for (std::size_t j = t + 1; j < c && !redo; ++j)
          if (m.at(i, j) % m.at(t, t) != 0) {
            row_add(t, i, 1);
            redo = true;
          }
      if (!redo) break;
    }
    if (m.at(t, t) < 0) col_negate(t);
    ++t;
  }
  s.D = std::move(m);
  return s;
}

inline Int determinant(IntMatrix m) {  // Bareiss, exact
  if (m.rows != m.cols) throw Error(Errc::parse_error, "determinant of non-square matrix");
  const std::size_t n = m.rows;
  if (n == 0) return 1;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m.at(k, k) == 0) {
      std::size_t swp = n;
      for (std::size_t i = k + 1; i < n; ++i)
        if (m.at(i, k) != 0) {
          swp = i;
          break;
        }
      if (swp == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(swp, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
    prev = m.at(k, k);
  }
  return sign * m.at(n - 1, n - 1);
}

// ---------------------------------------------------------------------------
// Abelian quotient Z^g / rowspace, with coordinate and preimage tracking.
//
// Row operations never change quotient coordinates and go untracked. Column
// operations are mirrored onto two dense matrices: coords transform by V^T
// (col_k += q*col_j  =>  coord-row_k += q*coord-row_j) and preimages by V^{-1}.
// Presentation matrices of composed tasks are large (thousands of relators)
// but have <= 3 entries of +-1 per row, so a Markowitz-style unit-pivot
// elimination handles almost everything; a dense Smith pass finishes the
// small non-unit core.

struct AbelianQuotient {
  std::vector<Int> factors;  // finite (>1) in divisibility order, then zeros
  std::vector<std::vector<Int>> coord_rows;     // factors.size() x gens
  std::vector<std::vector<Int>> preimage_rows;  // factors.size() x gens
  std::size_t gens = 0;

  std::vector<Int> coords_of(const std::vector<Int>& e) const {
    std::vector<Int> z(factors.size(), Int(0));
    for (std::size_t i = 0; i < factors.size(); ++i) {
      Int acc = 0;
      for (std::size_t t = 0; t < gens; ++t)
        if (e[t] != 0) acc += coord_rows[i][t] * e[t];
      if (factors[i] != 0) {
        acc %= factors[i];
        if (acc < 0) acc += factors[i];
      }
      z[i] = acc;
    }
    return z;
  }
};

inline AbelianQuotient abelian_quotient(std::vector<std::map<int, Int>> rows, std::size_t g) {
  const std::size_t r = rows.size();
  std::vector<std::vector<Int>> Ct(g), Cp(g);
  for (std::size_t i = 0; i < g; ++i) {
    Ct[i].assign(g, Int(0));
    Cp[i].assign(g, Int(0));
    Ct[i][i] = 1;
    Cp[i][i] = 1;
  }
  std::vector<std::set<int>> colrows(g);
  for (std::size_t i = 0; i < r; ++i)
    for (const auto& [c, v] : rows[i]) colrows[static_cast<std::size_t>(c)].insert(static_cast<int>(i));
  std::vector<char> row_done(r, 0), col_done(g, 0);

  auto col_axpy = [&](int k, int j, const Int& q) {  // col_k += q*col_j
    if (q == 0) return;
    for (std::size_t t = 0; t < g; ++t)
      if (Ct[j][t] != 0) Ct[k][t] += q * Ct[j][t];
    for (std::size_t t = 0; t < g; ++t)
      if (Cp[k][t] != 0) Cp[j][t] -= q * Cp[k][t];
  };
  auto col_negate = [&](int k) {
    for (auto& x : Ct[k]) x = -x;
    for (auto& x : Cp[k]) x = -x;
  };

  using Cand = std::tuple<long long, int, int>;
  std::priority_queue<Cand, std::vector<Cand>, std::greater<Cand>> pq;
  auto cost_of = [&](int i, int j) {
    return static_cast<long long>(rows[i].size() - 1) *
           static_cast<long long>(colrows[static_cast<std::size_t>(j)].size() - 1);
  };
  for (std::size_t i = 0; i < r; ++i)
    for (const auto& [c, v] : rows[i])
      if (v == 1 || v == -1) pq.emplace(cost_of(static_cast<int>(i), c), static_cast<int>(i), c);

  while (!pq.empty()) {
    auto [cost, pi, pj] = pq.top();
    pq.pop();
    if (row_done[pi] || col_done[pj]) continue;
    auto it = rows[pi].find(pj);
    if (it == rows[pi].end() || (it->second != 1 && it->second != -1)) continue;
    if (cost_of(pi, pj) != cost) {
      pq.emplace(cost_of(pi, pj), pi, pj);
      continue;
    }
    const Int pv = it->second;

    // Clear the pivot column with row operations (untracked).
    std::vector<int> sharing(colrows[static_cast<std::size_t>(pj)].begin(),
                             colrows[static_cast<std::size_t>(pj)].end());
    for (int i2 : sharing) {
      if (i2 == pi) continue;
      Int q = rows[i2][pj] * pv;
      for (const auto& [cc, vv] : rows[pi]) {
        Int& cell = rows[i2][cc];
        bool was = cell != 0;
        cell -= q * vv;
        if (cell == 0) {
          rows[i2].erase(cc);
          if (was) colrows[static_cast<std::size_t>(cc)].erase(i2);
        } else {
          if (!was) colrows[static_cast<std::size_t>(cc)].insert(i2);
          if (cell == 1 || cell == -1) pq.emplace(cost_of(i2, cc), i2, cc);
        }
      }
    }

    // Column is now zero outside the pivot row; clear the pivot row with
    // column operations (these touch no other row).
    std::vector<std::pair<int, Int>> row_entries(rows[pi].begin(), rows[pi].end());
    for (const auto& [cc, vv] : row_entries) {
      if (cc == pj) continue;
      col_axpy(cc, pj, -(vv * pv));
      rows[pi].erase(cc);
      colrows[static_cast<std::size_t>(cc)].erase(pi);
    }
    if (pv == -1) {
      col_negate(pj);
      rows[pi][pj] = 1;
    }
    row_done[pi] = 1;
    col_done[pj] = 1;
  }

  // Non-unit core: whatever is left, finished densely.
  std::vector<int> core_rows_idx, core_cols_idx;
  {
    std::set<int> ccols;
    for (std::size_t i = 0; i < r; ++i)
      if (!row_done[i] && !rows[i].empty()) {
        core_rows_idx.push_back(static_cast<int>(i));
        for (const auto& [c2, v2] : rows[i]) ccols.insert(c2);
      }
    core_cols_idx.assign(ccols.begin(), ccols.end());
  }

  std::vector<Int> core_diag(core_cols_idx.size(), Int(0));
  std::vector<std::vector<Int>> core_ct(core_cols_idx.size()), core_cp(core_cols_idx.size());
  if (!core_cols_idx.empty()) {
    IntMatrix cm(core_rows_idx.size(), core_cols_idx.size());
    std::map<int, std::size_t> colpos;
    for (std::size_t j = 0; j < core_cols_idx.size(); ++j) colpos[core_cols_idx[j]] = j;
    for (std::size_t i = 0; i < core_rows_idx.size(); ++i)
      for (const auto& [c2, v2] : rows[core_rows_idx[i]]) cm.at(i, colpos[c2]) = v2;
    SmithResult s = smith_normal_form(cm);
    const std::size_t nc = core_cols_idx.size();
    for (std::size_t i = 0; i < nc; ++i) {
      core_ct[i].assign(g, Int(0));
      core_cp[i].assign(g, Int(0));
      for (std::size_t j = 0; j < nc; ++j) {
        const Int& vt = s.V.at(j, i);
        if (vt != 0)
          for (std::size_t t = 0; t < g; ++t)
            core_ct[i][t] += vt * Ct[static_cast<std::size_t>(core_cols_idx[j])][t];
        const Int& wi = s.Vinv.at(i, j);
        if (wi != 0)
          for (std::size_t t = 0; t < g; ++t)
            core_cp[i][t] += wi * Cp[static_cast<std::size_t>(core_cols_idx[j])][t];
      }
    }
    for (std::size_t i = 0; i < std::min(s.D.rows, s.D.cols); ++i) core_diag[i] = s.D.at(i, i);
  }

  AbelianQuotient out;
  out.gens = g;
  for (std::size_t i = 0; i < core_cols_idx.size(); ++i)
    if (core_diag[i] > 1) {
      out.factors.push_back(core_diag[i]);
      out.coord_rows.push_back(std::move(core_ct[i]));
      out.preimage_rows.push_back(std::move(core_cp[i]));
    }
  for (std::size_t i = 0; i < core_cols_idx.size(); ++i)
    if (core_diag[i] == 0) {
      out.factors.push_back(0);
      out.coord_rows.push_back(std::move(core_ct[i]));
      out.preimage_rows.push_back(std::move(core_cp[i]));
    }
  std::set<int> in_core(core_cols_idx.begin(), core_cols_idx.end());
  for (std::size_t j = 0; j < g; ++j)
    if (!col_done[j] && !in_core.count(static_cast<int>(j))) {
      out.factors.push_back(0);
      out.coord_rows.push_back(std::move(Ct[j]));
      out.preimage_rows.push_back(std::move(Cp[j]));
    }
  return out;
}

inline AbelianQuotient abelian_quotient_of(const GroupPresentation& p) {
  std::vector<std::map<int, Int>> rows;
  rows.reserve(p.relators.size());
  for (const Word& w : p.relators) {
    std::map<int, Int> row;
    for (Letter l : w) {
      row[l.gen] += l.sign;
      if (row[l.gen] == 0) row.erase(l.gen);
    }
    rows.push_back(std::move(row));
  }
  return abelian_quotient(std::move(rows), p.generators.size());
}

// ---------------------------------------------------------------------------
// Pointed abelian signatures.

struct PointedAbelianSignature {
  std::vector<Int> factors;  // finite (>1) in divisibility order, then zeros
  std::vector<Int> element;  // parallel coordinates, finite ones in [0, f)

  friend bool operator==(const PointedAbelianSignature& a, const PointedAbelianSignature& b) {
    return a.factors == b.factors && a.element == b.element;
  }
};

inline std::size_t free_rank(const PointedAbelianSignature& s) {
  std::size_t n = 0;
  for (const Int& f : s.factors)
    if (f == 0) ++n;
  return n;
}

inline std::vector<Int> finite_factors(const PointedAbelianSignature& s) {
  std::vector<Int> out;
  for (const Int& f : s.factors)
    if (f != 0) out.push_back(f);
  return out;
}

// Reversed-orientation coordinates (the loop traversed backwards).
inline std::vector<Int> reversed_element(const PointedAbelianSignature& s) {
  std::vector<Int> out(s.element.size());
  for (std::size_t i = 0; i < s.element.size(); ++i) {
    Int v = -s.element[i];
    if (s.factors[i] != 0) {
      v %= s.factors[i];
      if (v < 0) v += s.factors[i];
    }
    out[i] = v;
  }
  return out;
}

inline PointedAbelianSignature abelian_signature(const GroupPresentation& p, const Word& w) {
  AbelianQuotient q = abelian_quotient_of(p);
  PointedAbelianSignature s;
  s.factors = q.factors;
  s.element = q.coords_of(exponent_vector(w, p.generators.size()));
  return s;
}

// Presentation + quotient of a task's output complex, based at the loop's v0.
struct SignatureContext {
  GroupPresentation pres;
  AbelianQuotient quo;
};

inline std::shared_ptr<const SignatureContext> signature_context(const Complex& c,
                                                                 const VertexId& basepoint) {
  static std::mutex mu;
  static std::unordered_map<std::uint64_t,
                            std::vector<std::pair<std::pair<Complex, VertexId>,
                                                  std::shared_ptr<const SignatureContext>>>>
      cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(c.hash());
    if (it != cache.end())
      for (const auto& [key, value] : it->second)
        if (key.second == basepoint && key.first == c) return value;
  }
  auto ctx = std::make_shared<SignatureContext>();
  ctx->pres = presentation(c, basepoint);
  ctx->quo = abelian_quotient_of(ctx->pres);
  std::shared_ptr<const SignatureContext> out = ctx;
  std::lock_guard<std::mutex> lock(mu);
  cache[c.hash()].emplace_back(std::make_pair(c, basepoint), out);
  return out;
}

inline PointedAbelianSignature task_signature(const LoopTask& t) {
  auto ctx = signature_context(t.output, t.loop.v0);
  Word w = loop_word(ctx->pres, as_edge_loop(t.loop));
  PointedAbelianSignature s;
  s.factors = ctx->quo.factors;
  s.element = ctx->quo.coords_of(exponent_vector(w, ctx->pres.generators.size()));
  return s;
}

// ---------------------------------------------------------------------------
// Pointed homomorphism existence on abelian signatures, with witnesses.

namespace detail {

// Coefficients t with sum c_j*t_j == target (mod m; m == 0 means exact).
inline std::optional<std::vector<Int>> solve_combination(const std::vector<Int>& c,
                                                         const Int& target, const Int& m) {
  using boost::multiprecision::gcd;
  std::vector<Int> t(c.size(), Int(0));
  Int g = 0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0) continue;
    auto [g2, x, y] = extended_gcd(g, c[j]);
    for (std::size_t k = 0; k < j; ++k) t[k] *= x;
    t[j] = y;
    g = g2;
  }
  Int modulus_part = 0;
  Int geff = g;
  if (m != 0) {
    auto [g3, x3, y3] = extended_gcd(g, m);
    geff = g3;
    modulus_part = x3;  // x3*g == geff (mod m)
  }
  if (geff == 0) {
    if (target != 0) return std::nullopt;
    return t;  // all zero
  }
  if (target % geff != 0) return std::nullopt;
  Int scale = target / geff;
  if (m != 0) scale = scale * modulus_part;
  for (auto& v : t) {
    v *= scale;
    if (m != 0) {
      v %= m;
      if (v < 0) v += m;
    }
  }
  return t;
}

}  // namespace detail

// Per target factor: an infinite factor needs gcd of the free source
// coordinates to divide the target coordinate; a finite factor f needs the
// target coordinate inside the subgroup of Z/f generated by a_j * f/gcd(d_j,f)
// (free sources contribute a_j itself).
inline bool pointed_hom_exists(const PointedAbelianSignature& A, const PointedAbelianSignature& B) {
  using boost::multiprecision::gcd;
  for (std::size_t i = 0; i < B.factors.size(); ++i) {
    const Int& f = B.factors[i];
    const Int& bi = B.element[i];
    if (f == 0) {
      Int g = 0;
      for (std::size_t j = 0; j < A.factors.size(); ++j)
        if (A.factors[j] == 0) g = gcd(g, A.element[j]);
      if (g == 0) {
        if (bi != 0) return false;
      } else if (bi % g != 0) {
        return false;
      }
    } else {
      Int g = f;
      for (std::size_t j = 0; j < A.factors.size(); ++j) {
        Int mult = A.factors[j] == 0 ? Int(1) : f / gcd(A.factors[j], f);
        g = gcd(g, A.element[j] * mult);
      }
      if (bi % g != 0) return false;
    }
  }
  return true;
}

// Witness: matrix whose column j is the image in B-coordinates of the j-th
// cyclic generator of A. Columns respect factor orders and the element maps to
// the element.
inline std::optional<IntMatrix> pointed_hom_witness(const PointedAbelianSignature& A,
                                                    const PointedAbelianSignature& B) {
  using boost::multiprecision::gcd;
  IntMatrix W(B.factors.size(), A.factors.size());
  for (std::size_t i = 0; i < B.factors.size(); ++i) {
    const Int& f = B.factors[i];
    const Int& bi = B.element[i];
    if (f == 0) {
      std::vector<Int> c(A.factors.size(), Int(0));
      for (std::size_t j = 0; j < A.factors.size(); ++j)
        if (A.factors[j] == 0) c[j] = A.element[j];
      auto t = detail::solve_combination(c, bi, 0);
      if (!t) return std::nullopt;
      for (std::size_t j = 0; j < A.factors.size(); ++j)
        W.at(i, j) = A.factors[j] == 0 ? (*t)[j] : Int(0);
    } else {
      std::vector<Int> c(A.factors.size(), Int(0));
      std::vector<Int> mult(A.factors.size(), Int(1));
      for (std::size_t j = 0; j < A.factors.size(); ++j) {
        mult[j] = A.factors[j] == 0 ? Int(1) : f / gcd(A.factors[j], f);
        c[j] = A.element[j] * mult[j];
      }
      auto t = detail::solve_combination(c, bi, f);
      if (!t) return std::nullopt;
      for (std::size_t j = 0; j < A.factors.size(); ++j) {
        Int v = (mult[j] * (*t)[j]) % f;
        if (v < 0) v += f;
        W.at(i, j) = v;
      }
    }
  }
  return W;
}

// Direct sum, renormalized into chain form by running the quotient pipeline on
// the diagonal relation matrix (this also transports the element coordinates).
inline PointedAbelianSignature direct_sum(const std::vector<PointedAbelianSignature>& sigs) {
  std::vector<Int> ds, es;
  for (const auto& s : sigs) {
    ds.insert(ds.end(), s.factors.begin(), s.factors.end());
    es.insert(es.end(), s.element.begin(), s.element.end());
  }
  std::vector<std::map<int, Int>> rows;
  for (std::size_t j = 0; j < ds.size(); ++j)
    if (ds[j] != 0) rows.push_back({{static_cast<int>(j), ds[j]}});
  AbelianQuotient q = abelian_quotient(std::move(rows), ds.size());
  PointedAbelianSignature out;
  out.factors = q.factors;
  out.element = q.coords_of(es);
  return out;
}

// ---------------------------------------------------------------------------
// Verdicts.

enum class VerdictKind { implements, not_implements, unknown };

struct Verdict {
  VerdictKind kind;
  std::string detail;
  std::optional<IntMatrix> witness;
};

inline std::string signature_brief(const PointedAbelianSignature& s) {
  std::string out = "factors(";
  for (std::size_t i = 0; i < s.factors.size(); ++i) {
    if (i) out += ",";
    out += s.factors[i].str();
  }
  out += ") element(";
  for (std::size_t i = 0; i < s.element.size(); ++i) {
    if (i) out += ",";
    out += s.element[i].str();
  }
  out += ")";
  return out;
}

inline std::string obstruction_text(const PointedAbelianSignature& A,
                                    const PointedAbelianSignature& B) {
  using boost::multiprecision::gcd;
  for (std::size_t i = 0; i < B.factors.size(); ++i) {
    const Int& f = B.factors[i];
    const Int& bi = B.element[i];
    if (f == 0) {
      Int g = 0;
      for (std::size_t j = 0; j < A.factors.size(); ++j)
        if (A.factors[j] == 0) g = gcd(g, A.element[j]);
      if ((g == 0 && bi != 0) || (g != 0 && bi % g != 0))
        return "target factor " + std::to_string(i) + " (Z): coordinate " + bi.str() +
               " is not a multiple of " + g.str() +
               ", the gcd of the free source coordinates";
    } else {
      Int g = f;
      for (std::size_t j = 0; j < A.factors.size(); ++j) {
        Int mult = A.factors[j] == 0 ? Int(1) : f / gcd(A.factors[j], f);
        g = gcd(g, A.element[j] * mult);
      }
      if (bi % g != 0)
        return "target factor " + std::to_string(i) + " (Z/" + f.str() + "): coordinate " +
               bi.str() + " is outside the reachable subgroup " + g.str() + "*(Z/" + f.str() + ")";
    }
  }
  return "no obstruction";
}

inline Verdict decide_implements(const std::vector<LoopTask>& sources, const LoopTask& tgt) {
  if (sources.empty()) throw Error(Errc::empty_input, "no source tasks given");
  std::vector<PointedAbelianSignature> sigs;
  sigs.reserve(sources.size());
  bool certified = tgt.abelian_certified;
  for (const LoopTask& t : sources) {
    sigs.push_back(task_signature(t));
    certified = certified && t.abelian_certified;
  }
  PointedAbelianSignature A = direct_sum(sigs);
  PointedAbelianSignature B = task_signature(tgt);
  if (!pointed_hom_exists(A, B))
    return Verdict{VerdictKind::not_implements,
                   "no abelian pointed homomorphism " + signature_brief(A) + " -> " +
                       signature_brief(B) + "; " + obstruction_text(A, B),
                   std::nullopt};
  if (!certified)
    return Verdict{VerdictKind::unknown,
                   "abelian pointed homomorphism exists, but a fundamental group involved is "
                   "not certified abelian; the non-abelian question is undecided",
                   std::nullopt};
  auto W = pointed_hom_witness(A, B);
  if (!W)
    throw Error(Errc::invalid_task, "witness construction failed after existence check");
  return Verdict{VerdictKind::implements,
                 "abelian pointed homomorphism " + signature_brief(A) + " -> " + signature_brief(B),
                 std::move(W)};
}

// Meet of both directions: NOT dominates, then UNKNOWN, then both IMPLEMENTS.
inline Verdict tasks_equivalent(const LoopTask& t1, const LoopTask& t2) {
  Verdict fwd = decide_implements({t1}, t2);
  Verdict bwd = decide_implements({t2}, t1);
  if (fwd.kind == VerdictKind::not_implements)
    return Verdict{VerdictKind::not_implements, "forward direction fails: " + fwd.detail,
                   std::nullopt};
  if (bwd.kind == VerdictKind::not_implements)
    return Verdict{VerdictKind::not_implements, "backward direction fails: " + bwd.detail,
                   std::nullopt};
  if (fwd.kind == VerdictKind::unknown || bwd.kind == VerdictKind::unknown)
    return Verdict{VerdictKind::unknown, "at least one direction is undecided", std::nullopt};
  return Verdict{VerdictKind::implements, "tasks implement each other", std::nullopt};
}

}  // namespace loopagree
