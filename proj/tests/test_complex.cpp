#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "loopagree/complex.hpp"

using namespace loopagree;

namespace {

Complex hollow_triangle() { return build({{"0", "1"}, {"1", "2"}, {"2", "0"}}); }
Complex full_triangle() { return build({{"0", "1", "2"}}); }

}  // namespace

TEST_CASE("canonical simplex ordering", "[complex]") {
  REQUIRE(canonical_simplex({"b", "a", "c"}) == Simplex{"a", "b", "c"});
  REQUIRE(canonical_simplex({"z"}) == Simplex{"z"});
  REQUIRE(canonical_simplex({"10", "2"}) == Simplex{"10", "2"});  // lexicographic on strings
}

TEST_CASE("build closes downward", "[complex]") {
  Complex c = full_triangle();
  REQUIRE(c.size() == 7);  // 3 vertices + 3 edges + 1 triangle
  REQUIRE(c.contains({"0"}));
  REQUIRE(c.contains({"0", "2"}));
  REQUIRE(c.contains({"0", "1", "2"}));
  REQUIRE_FALSE(c.contains({"0", "3"}));
  REQUIRE(c.vertex_count() == 3);

  // Simplexes iterate in canonical (lexicographic) order.
  std::vector<Simplex> all(c.simplexes().begin(), c.simplexes().end());
  REQUIRE(std::is_sorted(all.begin(), all.end()));
}

TEST_CASE("build rejects bad input", "[complex]") {
  REQUIRE_THROWS_MATCHES(build({}), Error, Catch::Matchers::MessageMatches(
                                               Catch::Matchers::StartsWith("EmptyInput")));
  REQUIRE_THROWS_AS(build({{"a", "a"}}), Error);
  try {
    build({{"a", "b", "a"}});
    FAIL("expected DuplicateVertex");
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::duplicate_vertex);
  }
}

TEST_CASE("dimension and skeleton", "[complex]") {
  Complex c = full_triangle();
  REQUIRE(dimension(c) == 2);
  Complex s1 = skeleton(c, 1);
  REQUIRE(s1 == hollow_triangle());
  REQUIRE(dimension(s1) == 1);
  REQUIRE(skeleton(c, 2) == c);       // skeleton at the full dimension is the identity
  REQUIRE(skeleton(c, 5) == c);
  REQUIRE(is_subcomplex(s1, c));
  REQUIRE_FALSE(is_subcomplex(c, s1));
  REQUIRE(skeleton(c, 0).size() == 3);
}

TEST_CASE("connectivity", "[complex]") {
  REQUIRE(is_connected(hollow_triangle()));
  REQUIRE(is_connected(build({{"a"}})));
  REQUIRE_FALSE(is_connected(build({{"a", "b"}, {"c", "d"}})));
  REQUIRE_FALSE(is_connected(build({{"a"}, {"b"}})));
  try {
    Complex c = hollow_triangle();
    is_connected(skeleton(c, 0));  // fine: still nonempty
    SUCCEED();
  } catch (...) {
    FAIL("skeleton connectivity should not throw");
  }
}

TEST_CASE("maximal simplexes", "[complex]") {
  Complex c = full_triangle();
  REQUIRE(maximal_simplexes(c) == std::vector<Simplex>{{"0", "1", "2"}});
  Complex h = hollow_triangle();
  REQUIRE(maximal_simplexes(h) == std::vector<Simplex>{{"0", "1"}, {"0", "2"}, {"1", "2"}});
}

TEST_CASE("product vertex id escaping round-trips", "[complex]") {
  REQUIRE(product_vertex_id("a", "b") == "a|b");
  REQUIRE(product_vertex_id("a|b", "c\\d") == "a\\|b|c\\\\d");
  auto [l, r] = split_product_vertex_id("a\\|b|c\\\\d");
  REQUIRE(l == "a|b");
  REQUIRE(r == "c\\d");
  REQUIRE_THROWS_AS(split_product_vertex_id("nobar"), Error);
  REQUIRE_THROWS_AS(split_product_vertex_id("a|b|c"), Error);
  REQUIRE_THROWS_AS(split_product_vertex_id("trail\\"), Error);

  // Escaping survives an actual product.
  Complex a = build({{"x|", "y"}});
  Complex b = build({{"u"}});
  Complex p = product(a, b);
  REQUIRE(p.contains({"x\\||u"}));
  auto [pl, pr] = split_product_vertex_id("x\\||u");
  REQUIRE(pl == "x|");
  REQUIRE(pr == "u");
}

TEST_CASE("bary vertex id escaping", "[complex]") {
  REQUIRE(bary_vertex_id({"a"}) == "{a}");
  REQUIRE(bary_vertex_id({"a", "b"}) == "{a,b}");
  REQUIRE(bary_vertex_id({"a,b", "{c}"}) == "{a\\,b,\\{c\\}}");
}

TEST_CASE("product of an edge with an edge", "[complex]") {
  Complex e1 = build({{"a", "b"}});
  Complex e2 = build({{"x", "y"}});
  Complex p = product(e1, e2);
  REQUIRE(p.vertex_count() == 4);
  // Every subset of {a,b}x{x,y} whose projections are simplexes appears; the
  // four corners span a 3-simplex brick.
  REQUIRE(p.contains({"a|x", "a|y", "b|x", "b|y"}));
  REQUIRE(p.contains({"a|x", "b|y"}));  // a diagonal
  REQUIRE(dimension(p) == 3);
}

TEST_CASE("product projections are simplicial and swap is an isomorphism", "[complex]") {
  Complex a = hollow_triangle();
  Complex b = build({{"x", "y"}});
  Complex p = product(a, b);
  REQUIRE(p.vertex_count() == 6);

  SimplicialMap proj1, proj2;
  proj1.source = p;
  proj1.target = a;
  proj2.source = p;
  proj2.target = b;
  std::map<VertexId, VertexId> swap_assign;
  for (const VertexId& v : p.vertices()) {
    auto [l, r] = split_product_vertex_id(v);
    proj1.assignment[v] = l;
    proj2.assignment[v] = r;
    swap_assign[v] = product_vertex_id(r, l);
  }
  REQUIRE(check_simplicial(proj1));
  REQUIRE(check_simplicial(proj2));

  Complex q = product(b, a);
  SimplicialMap swap;
  swap.source = p;
  swap.target = q;
  swap.assignment = swap_assign;
  REQUIRE(check_simplicial(swap));
  // The swap is a bijection on vertices and hits every simplex of q.
  Complex::SimplexSet image;
  for (const Simplex& s : p.simplexes()) image.insert(image_simplex(swap.assignment, s));
  REQUIRE(image.size() == q.size());
}

TEST_CASE("product_skel2 equals the 2-skeleton of the product", "[complex]") {
  Complex a = hollow_triangle();
  Complex b = build({{"x", "y"}});
  REQUIRE(product_skel2(a, b) == skeleton(product(a, b), 2));
  Complex t = full_triangle();
  REQUIRE(product_skel2(t, t) == skeleton(product(t, t), 2));
  Complex pt = build({{"z"}});
  REQUIRE(product_skel2(a, pt) == skeleton(product(a, pt), 2));
}

TEST_CASE("barycentric subdivision counts and naming", "[complex]") {
  Complex h = hollow_triangle();
  Complex bh = barycentric(h);
  // One bary vertex per simplex of the input.
  REQUIRE(bh.vertex_count() == h.size());
  REQUIRE(bh.size() == 12);  // hexagon: 6 vertices + 6 edges
  REQUIRE(bh.contains({"{0}"}));
  REQUIRE(bh.contains({"{0,1}"}));
  REQUIRE(bh.contains({"{0,1}", "{1}"}));
  REQUIRE_FALSE(bh.contains({"{0}", "{1}"}));  // old edge is gone
  REQUIRE(is_connected(bh));

  Complex bt = barycentric(full_triangle());
  REQUIRE(bt.vertex_count() == 7);
  REQUIRE(bt.size() == 25);
  REQUIRE(bt.contains(canonical_simplex({"{0}", "{0,1}", "{0,1,2}"})));     // a chain
  REQUIRE_FALSE(bt.contains(canonical_simplex({"{0}", "{1}", "{0,1,2}"})));  // not a chain
  Complex bbt = barycentric(bt);
  REQUIRE(bbt.vertex_count() == 25);

  // Memoized: same input gives an equal complex again.
  REQUIRE(barycentric(h) == bh);
}

TEST_CASE("barycentric preserves connectivity on a disconnected complex", "[complex]") {
  Complex two = build({{"a", "b"}, {"c", "d"}});
  REQUIRE_FALSE(is_connected(barycentric(two)));
}

TEST_CASE("bary_subcomplex", "[complex]") {
  Complex c = full_triangle();
  Complex sub = build({{"0", "1"}});
  Complex bs = bary_subcomplex(c, sub);
  REQUIRE(bs == barycentric(sub));
  REQUIRE(is_subcomplex(bs, barycentric(c)));
  try {
    bary_subcomplex(sub, c);
    FAIL("expected NotSubcomplex");
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::not_subcomplex);
  }
}

TEST_CASE("simplicial map checking", "[complex]") {
  Complex h = hollow_triangle();
  Complex t = full_triangle();

  SimplicialMap incl;
  incl.source = h;
  incl.target = t;
  for (const VertexId& v : h.vertices()) incl.assignment[v] = v;
  REQUIRE(check_simplicial(incl));

  SimplicialMap fold;  // collapse an edge: fine into the full triangle
  fold.source = h;
  fold.target = t;
  fold.assignment = {{"0", "0"}, {"1", "1"}, {"2", "1"}};
  REQUIRE(check_simplicial(fold));

  SimplicialMap bad;  // sends the edge {0,2} to the non-edge {0,2}... of a path
  bad.source = h;
  bad.target = build({{"0", "1"}, {"1", "2"}});
  bad.assignment = {{"0", "0"}, {"1", "1"}, {"2", "2"}};
  REQUIRE_FALSE(check_simplicial(bad));

  SimplicialMap partial;
  partial.source = h;
  partial.target = t;
  partial.assignment = {{"0", "0"}};
  try {
    check_simplicial(partial);
    FAIL("expected PartialAssignment");
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::partial_assignment);
  }
}

TEST_CASE("identity map and image_simplex", "[complex]") {
  Complex h = hollow_triangle();
  SimplicialMap id = identity_map(h);
  REQUIRE(check_simplicial(id));
  REQUIRE(image_simplex(id.assignment, {"0", "1"}) == Simplex{"0", "1"});
  std::map<VertexId, VertexId> fold{{"0", "a"}, {"1", "a"}, {"2", "b"}};
  REQUIRE(image_simplex(fold, {"0", "1"}) == Simplex{"a"});
  REQUIRE(image_simplex(fold, {"1", "2"}) == Simplex{"a", "b"});
}

TEST_CASE("induced bary map functoriality", "[complex]") {
  Complex h = hollow_triangle();
  Complex t = full_triangle();

  SimplicialMap f;  // inclusion h -> t
  f.source = h;
  f.target = t;
  for (const VertexId& v : h.vertices()) f.assignment[v] = v;

  SimplicialMap g;  // fold t -> t
  g.source = t;
  g.target = t;
  g.assignment = {{"0", "0"}, {"1", "1"}, {"2", "1"}};

  SimplicialMap gf;
  gf.source = h;
  gf.target = t;
  for (const auto& [v, w] : f.assignment) gf.assignment[v] = g.assignment.at(w);

  SimplicialMap bf = induced_bary_map(f);
  SimplicialMap bg = induced_bary_map(g);
  SimplicialMap bgf = induced_bary_map(gf);
  REQUIRE(bf.source == barycentric(h));
  REQUIRE(bf.target == barycentric(t));
  REQUIRE(check_simplicial(bf));
  REQUIRE(check_simplicial(bg));

  std::map<VertexId, VertexId> composed;
  for (const auto& [v, w] : bf.assignment) composed[v] = bg.assignment.at(w);
  REQUIRE(composed == bgf.assignment);

  SimplicialMap bid = induced_bary_map(identity_map(t));
  for (const auto& [v, w] : bid.assignment) REQUIRE(v == w);
}

TEST_CASE("complex equality and hashing", "[complex]") {
  Complex a = build({{"0", "1"}, {"1", "2"}, {"2", "0"}});
  Complex b = build({{"2", "0"}, {"0", "1"}, {"1", "2"}});
  REQUIRE(a == b);
  REQUIRE(a.hash() == b.hash());
  REQUIRE(a != full_triangle());
}
