#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loopagree/complex.hpp"
#include "loopagree/errors.hpp"
#include "loopagree/loops.hpp"

namespace loopagree {

struct LoopTask {
  std::optional<std::string> name;
  Complex output;
  TriangleLoop loop;
  // True when pi_1 of the output is known abelian: catalog tasks and their
  // compositions. Gatekeeper for IMPLEMENTS verdicts.
  bool abelian_certified = false;
  // Set by compose(); in-memory only, needed by projection_map.
  std::shared_ptr<const std::pair<LoopTask, LoopTask>> factors;

  friend bool operator==(const LoopTask& a, const LoopTask& b) {
    return a.output == b.output && a.loop == b.loop;
  }
  friend bool operator!=(const LoopTask& a, const LoopTask& b) { return !(a == b); }
};

inline LoopTask make_loop_task(std::optional<std::string> name, Complex output, TriangleLoop loop,
                               bool abelian_certified = false) {
  if (output.empty()) throw Error(Errc::invalid_task, "output complex is empty");
  if (dimension(output) > 2) throw Error(Errc::invalid_task, "output complex has dimension > 2");
  if (!is_connected(output)) throw Error(Errc::invalid_task, "output complex is not connected");
  if (!validate_triangle_loop(output, loop))
    throw Error(Errc::invalid_task, "loop is not a valid triangle loop of the output complex");
  LoopTask t;
  t.name = std::move(name);
  t.output = std::move(output);
  t.loop = std::move(loop);
  t.abelian_certified = abelian_certified;
  return t;
}

// Nonempty subset of {0,1,2}, the seven inputs of a loop agreement task.
struct InputSimplex {
  unsigned mask;  // bits 0..2

  bool has(int i) const { return (mask >> i) & 1u; }
  std::size_t size() const { return static_cast<std::size_t>(has(0)) + has(1) + has(2); }

  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for (int i = 0; i < 3; ++i)
      if (has(i)) {
        if (!first) out.push_back(',');
        out += std::to_string(i);
        first = false;
      }
    out.push_back('}');
    return out;
  }

  friend bool operator==(InputSimplex a, InputSimplex b) { return a.mask == b.mask; }
};

// Canonical (lexicographic) order of the seven input simplexes; verification
// reports the first violation in this order.
inline const std::array<InputSimplex, 7>& all_input_simplexes() {
  static const std::array<InputSimplex, 7> all = {
      InputSimplex{0b001}, InputSimplex{0b011}, InputSimplex{0b111}, InputSimplex{0b101},
      InputSimplex{0b010}, InputSimplex{0b110}, InputSimplex{0b100}};
  return all;
}

inline Complex gamma(const LoopTask& t, InputSimplex s) {
  switch (s.mask) {
    case 0b001: return Complex({{t.loop.v0}});
    case 0b010: return Complex({{t.loop.v1}});
    case 0b100: return Complex({{t.loop.v2}});
    case 0b011: return path_complex(t.loop.p01);
    case 0b110: return path_complex(t.loop.p12);
    case 0b101: return path_complex(t.loop.p20);  // {0,2}: undirected, p20's complex
    case 0b111: return t.output;
  }
  throw Error(Errc::invalid_task, "input simplex must be a nonempty subset of {0,1,2}");
}

inline LoopTask compose(const LoopTask& t1, const LoopTask& t2) {
  Complex out = product_skel2(t1.output, t2.output);
  TriangleLoop loop = diagonal_product(t1.loop, t2.loop);
  std::optional<std::string> name;
  if (t1.name && t2.name) name = *t1.name + "*" + *t2.name;
  LoopTask t = make_loop_task(std::move(name), std::move(out), std::move(loop),
                              t1.abelian_certified && t2.abelian_certified);
  t.factors = std::make_shared<const std::pair<LoopTask, LoopTask>>(t1, t2);
  return t;
}

struct DecisionMap {
  std::size_t N = 0;
  SimplicialMap map;  // Bary^N(source output) -> target output
};

inline DecisionMap make_decision_map(std::size_t N, SimplicialMap map) {
  if (!check_simplicial(map))
    throw Error(Errc::not_simplicial, "decision map does not send simplexes to simplexes");
  return DecisionMap{N, std::move(map)};
}

inline Complex iterated_barycentric(Complex c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) c = barycentric(c);
  return c;
}

inline DecisionMap projection_map(const LoopTask& tc, int which) {
  if (!tc.factors) throw Error(Errc::not_a_composition, "task was not built by compose");
  if (which != 1 && which != 2) throw Error(Errc::not_a_composition, "projection index must be 1 or 2");
  SimplicialMap m;
  m.source = tc.output;
  m.target = (which == 1 ? tc.factors->first : tc.factors->second).output;
  for (const Simplex& s : tc.output.simplexes())
    if (s.size() == 1) {
      auto [l, r] = split_product_vertex_id(s[0]);
      m.assignment[s[0]] = which == 1 ? l : r;
    }
  return make_decision_map(0, std::move(m));
}

struct VerifyViolation {
  InputSimplex sigma;
  Simplex simplex;  // carrier simplex whose image escapes gamma(tgt, sigma)
};

inline std::optional<VerifyViolation> verify_violation(const LoopTask& src, const LoopTask& tgt,
                                                       const DecisionMap& d) {
  if (d.map.source != iterated_barycentric(src.output, d.N))
    throw Error(Errc::source_mismatch,
                "decision map source is not the N-fold subdivision of the source output complex");
  for (InputSimplex sigma : all_input_simplexes()) {
    Complex carrier = iterated_barycentric(gamma(src, sigma), d.N);
    Complex allowed = gamma(tgt, sigma);
    for (const Simplex& s : carrier.simplexes())
      if (!allowed.contains(image_simplex(d.map.assignment, s))) return VerifyViolation{sigma, s};
  }
  return std::nullopt;
}

inline bool verify_implements(const LoopTask& src, const LoopTask& tgt, const DecisionMap& d) {
  return !verify_violation(src, tgt, d).has_value();
}

// Joint implementation: the carrier for sigma is the product carrier
// skel^2(Gamma1(sigma) x Gamma2(sigma)), not the diagonal loop.
inline std::optional<VerifyViolation> verify_joint_violation(const LoopTask& t1, const LoopTask& t2,
                                                             const LoopTask& tgt,
                                                             const DecisionMap& d) {
  if (d.map.source != iterated_barycentric(product_skel2(t1.output, t2.output), d.N))
    throw Error(Errc::source_mismatch,
                "decision map source is not the N-fold subdivision of skel2 of the product");
  for (InputSimplex sigma : all_input_simplexes()) {
    Complex carrier = iterated_barycentric(product_skel2(gamma(t1, sigma), gamma(t2, sigma)), d.N);
    Complex allowed = gamma(tgt, sigma);
    for (const Simplex& s : carrier.simplexes())
      if (!allowed.contains(image_simplex(d.map.assignment, s))) return VerifyViolation{sigma, s};
  }
  return std::nullopt;
}

inline bool verify_joint_implements(const LoopTask& t1, const LoopTask& t2, const LoopTask& tgt,
                                    const DecisionMap& d) {
  return !verify_joint_violation(t1, t2, tgt, d).has_value();
}

// The unique vertex map v -> (d1(v), d2(v)) through both projections.
inline DecisionMap product_morphism(const DecisionMap& d1, const DecisionMap& d2) {
  if (d1.N != d2.N)
    throw Error(Errc::subdivision_mismatch, "factor decision maps use different subdivision levels");
  if (d1.map.source != d2.map.source)
    throw Error(Errc::source_mismatch, "factor decision maps have different sources");
  SimplicialMap m;
  m.source = d1.map.source;
  m.target = product_skel2(d1.map.target, d2.map.target);
  for (const auto& [v, img1] : d1.map.assignment)
    m.assignment[v] = product_vertex_id(img1, d2.map.assignment.at(v));
  return make_decision_map(d1.N, std::move(m));
}

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"set-agreement", "simplex-agreement", "torus",
                                                 "projective-plane", "point"};
  return names;
}

inline LoopTask catalog(const std::string& name) {
  auto zeta = [](const Complex& k) {
    return make_triangle_loop(k, "0", "1", "2", {"0", "1"}, {"1", "2"}, {"2", "0"});
  };
  if (name == "set-agreement") {
    Complex k = build({{"0", "1"}, {"1", "2"}, {"2", "0"}});
    return make_loop_task(name, k, zeta(k), true);
  }
  if (name == "simplex-agreement") {
    Complex k = build({{"0", "1", "2"}});
    return make_loop_task(name, k, zeta(k), true);
  }
  if (name == "point") {
    Complex k = build({{"0"}});
    TriangleLoop l = make_triangle_loop(k, "0", "0", "0", {"0"}, {"0"}, {"0"});
    return make_loop_task(name, k, l, true);
  }
  if (name == "torus") {
    std::vector<std::vector<VertexId>> tris;
    for (int i = 0; i < 7; ++i) {
      auto v = [i](int d) { return std::to_string((i + d) % 7); };
      tris.push_back({v(0), v(1), v(3)});
      tris.push_back({v(0), v(2), v(3)});
    }
    Complex k = build(tris);
    TriangleLoop l = make_triangle_loop(k, "0", "1", "2", {"0", "1"}, {"1", "2"}, {"2", "0"});
    return make_loop_task(name, k, l, true);
  }
  if (name == "projective-plane") {
    Complex k = build({{"0", "1", "2"},
                       {"0", "1", "3"},
                       {"0", "2", "4"},
                       {"0", "3", "5"},
                       {"0", "4", "5"},
                       {"1", "2", "5"},
                       {"1", "3", "4"},
                       {"1", "4", "5"},
                       {"2", "3", "4"},
                       {"2", "3", "5"}});
    TriangleLoop l = make_triangle_loop(k, "0", "1", "4", {"0", "1"}, {"1", "4"}, {"4", "0"});
    return make_loop_task(name, k, l, true);
  }
  throw Error(Errc::unknown_task, "no catalog task named " + name);
}

}  // namespace loopagree
