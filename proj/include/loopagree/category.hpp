#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "loopagree/complex.hpp"
#include "loopagree/errors.hpp"
#include "loopagree/group.hpp"
#include "loopagree/loops.hpp"
#include "loopagree/task.hpp"

namespace loopagree {

// A decision map that passes the full carrier check; construction verifies.
struct LoopMorphism {
  LoopTask source;
  LoopTask target;
  DecisionMap d;
};

inline LoopMorphism make_morphism(LoopTask source, LoopTask target, DecisionMap d) {
  if (auto v = verify_violation(source, target, d))
    throw Error(Errc::invalid_task, "decision map is not a morphism; carrier violated at sigma=" +
                                        v->sigma.to_string());
  return LoopMorphism{std::move(source), std::move(target), std::move(d)};
}

inline LoopMorphism identity_morphism(const LoopTask& t) {
  return make_morphism(t, t, make_decision_map(0, identity_map(t.output)));
}

// Composite vertex map (delta2 o Bary^{N2}(delta1), N1 + N2) without carrier
// verification; the law checks compare these directly.
inline DecisionMap compose_decision_maps(const DecisionMap& d1, const DecisionMap& d2) {
  SimplicialMap step = d1.map;
  for (std::size_t i = 0; i < d2.N; ++i) step = induced_bary_map(step);
  SimplicialMap m;
  m.source = step.source;
  m.target = d2.map.target;
  for (const auto& [v, w] : step.assignment) {
    auto it = d2.map.assignment.find(w);
    if (it == d2.map.assignment.end())
      throw Error(Errc::partial_assignment, "no image for intermediate vertex " + w);
    m.assignment[v] = it->second;
  }
  return DecisionMap{d1.N + d2.N, std::move(m)};
}

// f2 after f1.
inline LoopMorphism compose_morphisms(const LoopMorphism& f1, const LoopMorphism& f2) {
  if (!(f1.target == f2.source))
    throw Error(Errc::target_source_mismatch,
                "first morphism's target differs from second morphism's source");
  DecisionMap raw = compose_decision_maps(f1.d, f2.d);
  DecisionMap d = make_decision_map(raw.N, std::move(raw.map));
  return make_morphism(f1.source, f2.target, std::move(d));
}

inline bool same_morphism(const LoopMorphism& a, const LoopMorphism& b) {
  return a.d.N == b.d.N && a.d.map.assignment == b.d.map.assignment &&
         a.source == b.source && a.target == b.target;
}

// Abelianized action of a morphism, expressed between factor decompositions.
struct AbelianHom {
  IntMatrix matrix;  // target factors x source factors
  PointedAbelianSignature source;
  PointedAbelianSignature target;
};

inline std::vector<Int> apply_hom(const AbelianHom& h, const std::vector<Int>& coords) {
  std::vector<Int> out(h.target.factors.size(), Int(0));
  for (std::size_t i = 0; i < h.matrix.rows; ++i) {
    for (std::size_t j = 0; j < h.matrix.cols; ++j) out[i] += h.matrix.at(i, j) * coords[j];
    if (h.target.factors[i] != 0) {
      out[i] %= h.target.factors[i];
      if (out[i] < 0) out[i] += h.target.factors[i];
    }
  }
  return out;
}

// The signature functor on morphisms. Each source generator's closed tree
// loop is pushed through Bary^N and the vertex map, read off as a word in the
// target presentation, and the generator-space action is then transported to
// factor coordinates via the tracked preimages. The factor-order and
// element-transport invariants are hard assertions: a failure would mean the
// construction is not a homomorphism at all.
inline AbelianHom functor_S(const LoopMorphism& f) {
  auto src_ctx = signature_context(f.source.output, f.source.loop.v0);
  auto tgt_ctx = signature_context(f.target.output, f.target.loop.v0);
  const std::size_t gs = src_ctx->pres.generators.size();
  const std::size_t gt = tgt_ctx->pres.generators.size();

  std::vector<std::vector<Int>> raw(gs);  // column k = image exponents of generator k
  for (std::size_t k = 0; k < gs; ++k) {
    EdgeLoop l = closed_generator_loop(src_ctx->pres, static_cast<int>(k));
    for (std::size_t i = 0; i < f.d.N; ++i) l = subdivide_path(l);
    EdgeLoop img;
    img.reserve(l.size());
    for (const VertexId& v : l) img.push_back(f.d.map.assignment.at(v));
    img = strip_stationary(img);
    raw[k] = exponent_vector(loop_word(tgt_ctx->pres, img), gt);
  }

  AbelianHom h;
  h.source.factors = src_ctx->quo.factors;
  h.source.element =
      src_ctx->quo.coords_of(exponent_vector(loop_word(src_ctx->pres, as_edge_loop(f.source.loop)),
                                             gs));
  h.target.factors = tgt_ctx->quo.factors;
  h.target.element =
      tgt_ctx->quo.coords_of(exponent_vector(loop_word(tgt_ctx->pres, as_edge_loop(f.target.loop)),
                                             gt));

  const std::size_t nf_s = h.source.factors.size(), nf_t = h.target.factors.size();
  h.matrix = IntMatrix(nf_t, nf_s);
  for (std::size_t j = 0; j < nf_s; ++j) {
    std::vector<Int> y(gt, Int(0));
    const std::vector<Int>& pre = src_ctx->quo.preimage_rows[j];
    for (std::size_t t = 0; t < gs; ++t)
      if (pre[t] != 0)
        for (std::size_t i = 0; i < gt; ++i) y[i] += pre[t] * raw[t][i];
    std::vector<Int> z = tgt_ctx->quo.coords_of(y);
    for (std::size_t i = 0; i < nf_t; ++i) h.matrix.at(i, j) = z[i];
  }

  for (std::size_t j = 0; j < nf_s; ++j) {
    const Int& dj = h.source.factors[j];
    if (dj == 0) continue;
    for (std::size_t i = 0; i < nf_t; ++i) {
      const Int& fi = h.target.factors[i];
      Int v = dj * h.matrix.at(i, j);
      if (fi != 0) v %= fi;
      if (v != 0) throw std::logic_error("functor_S: image violates source factor order");
    }
  }
  if (apply_hom(h, h.source.element) != h.target.element)
    throw std::logic_error("functor_S: distinguished element is not transported");
  return h;
}

// Signature-level product preservation: the composed task's signature and the
// direct sum of the factor signatures have identical factor chains and admit
// pointed homomorphisms both ways.
inline bool check_product_preservation(const LoopTask& t1, const LoopTask& t2) {
  PointedAbelianSignature sc = task_signature(compose(t1, t2));
  PointedAbelianSignature sd = direct_sum({task_signature(t1), task_signature(t2)});
  return sc.factors == sd.factors && pointed_hom_exists(sc, sd) && pointed_hom_exists(sd, sc);
}

}  // namespace loopagree
