#pragma once

#include <string>
#include <vector>

#include "loopagree/complex.hpp"
#include "loopagree/errors.hpp"

namespace loopagree {

// Edge paths are vertex sequences; consecutive pairs are edges of the ambient
// complex. Stationary steps carry no content and are stripped on construction.
using EdgePath = std::vector<VertexId>;
using EdgeLoop = EdgePath;  // first vertex == last vertex

inline EdgePath strip_stationary(const EdgePath& p) {
  EdgePath out;
  for (const VertexId& v : p)
    if (out.empty() || out.back() != v) out.push_back(v);
  return out;
}

inline bool validate_path(const Complex& c, const EdgePath& p) {
  if (p.empty()) return false;
  for (const VertexId& v : p)
    if (!c.contains({v})) return false;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (p[i] == p[i + 1]) return false;
    if (!c.contains(canonical_simplex({p[i], p[i + 1]}))) return false;
  }
  return true;
}

struct TriangleLoop {
  VertexId v0, v1, v2;
  EdgePath p01, p12, p20;

  friend bool operator==(const TriangleLoop& a, const TriangleLoop& b) {
    return a.v0 == b.v0 && a.v1 == b.v1 && a.v2 == b.v2 && a.p01 == b.p01 && a.p12 == b.p12 &&
           a.p20 == b.p20;
  }
};

inline TriangleLoop make_triangle_loop(const Complex& c, const VertexId& v0, const VertexId& v1,
                                       const VertexId& v2, const EdgePath& p01,
                                       const EdgePath& p12, const EdgePath& p20) {
  TriangleLoop l{v0, v1, v2, strip_stationary(p01), strip_stationary(p12), strip_stationary(p20)};
  auto endpoints = [](const EdgePath& p, const VertexId& from, const VertexId& to, const char* name) {
    if (p.empty() || p.front() != from || p.back() != to)
      throw Error(Errc::endpoint_mismatch, std::string(name) + " does not run between its designated vertices");
  };
  endpoints(l.p01, v0, v1, "p01");
  endpoints(l.p12, v1, v2, "p12");
  endpoints(l.p20, v2, v0, "p20");
  auto valid = [&c](const EdgePath& p, const char* name) {
    if (!validate_path(c, p))
      throw Error(Errc::invalid_path, std::string(name) + " is not an edge path of the complex");
  };
  valid(l.p01, "p01");
  valid(l.p12, "p12");
  valid(l.p20, "p20");
  return l;
}

inline bool validate_triangle_loop(const Complex& c, const TriangleLoop& l) {
  return !l.p01.empty() && !l.p12.empty() && !l.p20.empty() && l.p01.front() == l.v0 &&
         l.p01.back() == l.v1 && l.p12.front() == l.v1 && l.p12.back() == l.v2 &&
         l.p20.front() == l.v2 && l.p20.back() == l.v0 && validate_path(c, l.p01) &&
         validate_path(c, l.p12) && validate_path(c, l.p20);
}

namespace detail {

// One leg of the diagonal product: p traversed with `fixed` constant on the
// other side, then q traversed with `reached` constant on this side.
inline EdgePath diagonal_leg(const EdgePath& p, const EdgePath& q, const VertexId& reached,
                             const VertexId& fixed) {
  EdgePath r;
  for (const VertexId& x : p) r.push_back(product_vertex_id(x, fixed));
  for (const VertexId& y : q) r.push_back(product_vertex_id(reached, y));
  return strip_stationary(r);
}

}  // namespace detail

inline TriangleLoop diagonal_product(const TriangleLoop& l1, const TriangleLoop& l2) {
  TriangleLoop out;
  out.v0 = product_vertex_id(l1.v0, l2.v0);
  out.v1 = product_vertex_id(l1.v1, l2.v1);
  out.v2 = product_vertex_id(l1.v2, l2.v2);
  out.p01 = detail::diagonal_leg(l1.p01, l2.p01, l1.v1, l2.v0);
  out.p12 = detail::diagonal_leg(l1.p12, l2.p12, l1.v2, l2.v1);
  out.p20 = detail::diagonal_leg(l1.p20, l2.p20, l1.v0, l2.v2);
  return out;
}

inline EdgePath subdivide_path(const EdgePath& p) {
  EdgePath out;
  out.push_back(bary_vertex_id({p.front()}));
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    out.push_back(bary_vertex_id(canonical_simplex({p[i], p[i + 1]})));
    out.push_back(bary_vertex_id({p[i + 1]}));
  }
  return out;
}

inline TriangleLoop subdivide_loop(const Complex& c, const TriangleLoop& l) {
  if (!validate_triangle_loop(c, l))
    throw Error(Errc::invalid_path, "loop is not valid in the given complex");
  TriangleLoop out;
  out.v0 = bary_vertex_id({l.v0});
  out.v1 = bary_vertex_id({l.v1});
  out.v2 = bary_vertex_id({l.v2});
  out.p01 = subdivide_path(l.p01);
  out.p12 = subdivide_path(l.p12);
  out.p20 = subdivide_path(l.p20);
  return out;
}

inline EdgeLoop as_edge_loop(const TriangleLoop& l) {
  EdgePath out = l.p01;
  out.insert(out.end(), l.p12.begin() + 1, l.p12.end());
  out.insert(out.end(), l.p20.begin() + 1, l.p20.end());
  return strip_stationary(out);
}

// Vertices and edges along a path, as a complex.
inline Complex path_complex(const EdgePath& p) {
  Complex::SimplexSet out;
  for (const VertexId& v : p) out.insert({v});
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    out.insert(canonical_simplex({p[i], p[i + 1]}));
  return Complex(std::move(out));
}

inline Complex loop_subcomplex(const TriangleLoop& l) {
  Complex::SimplexSet out;
  for (const EdgePath* p : {&l.p01, &l.p12, &l.p20}) {
    for (const VertexId& v : *p) out.insert({v});
    for (std::size_t i = 0; i + 1 < p->size(); ++i)
      out.insert(canonical_simplex({(*p)[i], (*p)[i + 1]}));
  }
  return Complex(std::move(out));
}

}  // namespace loopagree
