#include <gtest/gtest.h>

#include <deque>
#include <set>

#include "bslab/error.hpp"
#include "bslab/generators.hpp"
#include "bslab/limits.hpp"

using namespace bslab;

namespace {

std::size_t tree_count(int d, int n) {
  std::size_t pow = 1;
  for (int i = 0; i < n; ++i) pow *= static_cast<std::size_t>(d - 1);
  return 1 + static_cast<std::size_t>(d) * (pow - 1) / static_cast<std::size_t>(d - 2);
}

bool connected_without(const FiniteGraph& g, Edge skip) {
  std::vector<char> seen(g.num_vertices(), 0);
  std::deque<VertexId> q{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop_front();
    for (VertexId w : g.neighbors(v)) {
      if ((v == skip.u && w == skip.v) || (v == skip.v && w == skip.u)) continue;
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        q.push_back(w);
      }
    }
  }
  return count == g.num_vertices();
}

void expect_interior_degree(const FiniteGraph& g, std::size_t degree) {
  std::size_t interior = 0;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (g.is_boundary(v)) continue;
    ++interior;
    EXPECT_EQ(g.degree(v), degree) << "vertex " << v;
  }
  EXPECT_GT(interior, 0u);
}

FiniteGraph k1() { return tree_ball(3, 0); }

}  // namespace

TEST(TreeBall, RadiusZero) {
  FiniteGraph g = tree_ball(3, 0);
  EXPECT_EQ(g.num_vertices(), 1u);
  EXPECT_EQ(g.num_edges(), 0u);
  ASSERT_EQ(g.boundary().size(), 1u);
  EXPECT_EQ(g.boundary()[0], g.root());
}

TEST(TreeBall, RadiusTwo) {
  FiniteGraph g = tree_ball(3, 2);
  EXPECT_EQ(g.num_vertices(), 10u);
  EXPECT_EQ(g.num_edges(), 9u);
  EXPECT_EQ(g.boundary().size(), 6u);
  EXPECT_FALSE(g.is_boundary(g.root()));
}

TEST(TreeBall, ClosedFormCounts) {
  EXPECT_EQ(tree_ball(4, 3).num_vertices(), 53u);
  for (int d : {3, 4, 5})
    for (int n = 0; n <= 10; ++n) EXPECT_EQ(tree_ball(d, n).num_vertices(), tree_count(d, n)) << d << "," << n;
}

TEST(TreeBall, RejectsBadDegree) {
  EXPECT_THROW(tree_ball(2, 3), Error);
  EXPECT_THROW(tree_ball(3, -1), Error);
}

TEST(GridBox, Counts) {
  FiniteGraph g = grid_box({3, 3});
  EXPECT_EQ(g.num_vertices(), 9u);
  EXPECT_EQ(g.num_edges(), 12u);
  EXPECT_EQ(g.boundary().size(), 8u);

  FiniteGraph p = grid_box({5});
  EXPECT_EQ(p.num_vertices(), 5u);
  EXPECT_EQ(p.num_edges(), 4u);
  EXPECT_EQ(p.boundary().size(), 2u);
  for (VertexId b : p.boundary()) EXPECT_EQ(p.degree(b), 1u);

  FiniteGraph t = grid_box({4, 4}, true);
  EXPECT_EQ(t.num_vertices(), 16u);
  EXPECT_EQ(t.num_edges(), 32u);
  EXPECT_TRUE(t.boundary().empty());
  for (VertexId v = 0; v < t.num_vertices(); ++v) EXPECT_EQ(t.degree(v), 4u);
}

TEST(GridBox, RejectsEmptySide) { EXPECT_THROW(grid_box({3, 0}), Error); }

TEST(Canopy, Counts) {
  FiniteGraph g = canopy(3, 3);
  EXPECT_EQ(g.num_vertices(), 15u);
  EXPECT_EQ(g.degree(g.root()), 1u);
  ASSERT_EQ(g.boundary().size(), 1u);
  EXPECT_EQ(g.labels().at("level")[g.boundary()[0]], 3);
  EXPECT_EQ(g.labels().at("level")[g.root()], 0);
  EXPECT_EQ(canopy(3, 1).num_vertices(), 3u);
  EXPECT_EQ(canopy(4, 2).num_vertices(), 13u);
  EXPECT_THROW(canopy(3, 0), Error);
}

TEST(Product, FourCycle) {
  FiniteGraph g = cartesian_product(grid_box({2}), grid_box({2}));
  EXPECT_EQ(g.num_vertices(), 4u);
  EXPECT_EQ(g.num_edges(), 4u);
  for (VertexId v = 0; v < 4; ++v) EXPECT_EQ(g.degree(v), 2u);
}

TEST(Product, DegreeAdditivity) {
  FiniteGraph a = tree_ball(3, 1), b = grid_box({3});
  FiniteGraph g = cartesian_product(a, b);
  EXPECT_EQ(g.num_vertices(), 12u);
  EXPECT_EQ(g.degree(g.root()), 5u);
  // Degrees of the product are sums over the two coordinates.
  std::multiset<std::size_t> expected, got;
  for (VertexId u = 0; u < a.num_vertices(); ++u)
    for (VertexId v = 0; v < b.num_vertices(); ++v) expected.insert(a.degree(u) + b.degree(v));
  for (VertexId v = 0; v < g.num_vertices(); ++v) got.insert(g.degree(v));
  EXPECT_EQ(expected, got);
}

TEST(Product, IdentityFactor) {
  FiniteGraph g = tree_ball(3, 3);
  FiniteGraph p = cartesian_product(k1(), g);
  EXPECT_EQ(p.num_vertices(), g.num_vertices());
  EXPECT_EQ(p.num_edges(), g.num_edges());
  EXPECT_EQ(canonical_signature(RootedNeighborhood{p, 3}, 100000), canonical_signature(RootedNeighborhood{g, 3}, 100000));
}

TEST(Stretch, SingleEdgeBecomesPath) {
  FiniteGraph k2 = cartesian_product(k1(), grid_box({2}));
  FiniteGraph s = stretch_fiber(k2, 3);
  EXPECT_EQ(s.num_vertices(), 4u);
  EXPECT_EQ(s.num_edges(), 3u);
  std::size_t leaves = 0;
  for (VertexId v = 0; v < 4; ++v) leaves += s.degree(v) == 1;
  EXPECT_EQ(leaves, 2u);
}

TEST(Stretch, IdentityStretchIsIsomorphic) {
  FiniteGraph g = cartesian_product(tree_ball(3, 1), grid_box({3}));
  FiniteGraph s = stretch_fiber(g, 1);
  EXPECT_EQ(s.num_vertices(), g.num_vertices());
  EXPECT_EQ(s.num_edges(), g.num_edges());
  EXPECT_EQ(canonical_signature(RootedNeighborhood{s, 10}), canonical_signature(RootedNeighborhood{g, 10}));
}

TEST(Stretch, TwoOppositeEdges) {
  FiniteGraph c4 = cartesian_product(grid_box({2}), grid_box({2}));
  EXPECT_EQ(c4.tagged_edges("fiber").size(), 2u);
  FiniteGraph s = stretch_fiber(c4, 2);
  EXPECT_EQ(s.num_vertices(), 6u);
  EXPECT_EQ(s.num_edges(), 6u);
}

TEST(Stretch, NeedsFiberEdges) {
  try {
    stretch_fiber(tree_ball(3, 2), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_fiber_edges);
  }
}

TEST(DiestelLeader, LineCase) {
  for (int L = 1; L <= 4; ++L) expect_interior_degree(dl_ball(1, 1, L), 2);
}

TEST(DiestelLeader, InteriorDegree) {
  for (int L = 1; L <= 3; ++L) expect_interior_degree(dl_ball(3, 2, L), 5);
  FiniteGraph g = dl_ball(3, 2, 2);
  EXPECT_EQ(g.degree(g.root()), 5u);
}

TEST(Horocyclic, Degrees) {
  for (int L = 1; L <= 4; ++L) expect_interior_degree(horocyclic_canopy_product(1, 1, L), 2);
  expect_interior_degree(horocyclic_canopy_product(3, 2, 4), 5);
  for (int m = 1; m <= 3; ++m)
    for (int n = 1; n <= 3; ++n) {
      FiniteGraph g = horocyclic_canopy_product(m, n, 1);
      EXPECT_LT(g.root(), g.num_vertices());
      EXPECT_NO_THROW(validate(g));
    }
}

TEST(FreeProduct, RadiusOne) {
  FiniteGraph g = free_product_z2_edge_ball(1);
  EXPECT_EQ(g.num_vertices(), 6u);
  EXPECT_EQ(g.num_edges(), 5u);
  EXPECT_EQ(g.tagged_edges("cut").size(), 1u);
}

TEST(FreeProduct, TNeighborHasFiveNeighbors) {
  FiniteGraph g = free_product_z2_edge_ball(2);
  const Edge t = g.tagged_edges("cut")[0];
  const VertexId tv = t.u == g.root() ? t.v : t.u;
  EXPECT_EQ(g.degree(tv), 5u);
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    if (!g.is_boundary(v)) EXPECT_EQ(g.degree(v), 5u);
}

TEST(FreeProduct, CutEdgesAreBridges) {
  FiniteGraph g = free_product_z2_edge_ball(3);
  ASSERT_FALSE(g.tagged_edges("cut").empty());
  for (const Edge& e : g.tagged_edges("cut")) EXPECT_FALSE(connected_without(g, e));
}

TEST(Hyperbolic, Balls) {
  FiniteGraph g = hyperbolic_ball(7, 1);
  EXPECT_EQ(g.num_vertices(), 8u);
  EXPECT_EQ(g.num_edges(), 14u);
  EXPECT_EQ(hyperbolic_ball(7, 0).num_vertices(), 1u);
  expect_interior_degree(hyperbolic_ball(7, 4), 7);
  EXPECT_THROW(hyperbolic_ball(6, 2), Error);
}

TEST(Generators, InvariantsAndDeterminism) {
  std::vector<FamilySpec> specs;
  FamilySpec s;
  s.family = Family::tree_ball;
  s.n = 4;
  specs.push_back(s);
  s = {};
  s.family = Family::grid_box;
  s.dims = {5, 4};
  specs.push_back(s);
  s = {};
  s.family = Family::canopy;
  s.K = 4;
  specs.push_back(s);
  s = {};
  s.family = Family::product;
  s.n = 2;
  s.L = 3;
  specs.push_back(s);
  s.family = Family::stretched_product;
  s.stretch = 3;
  specs.push_back(s);
  s = {};
  s.family = Family::product;
  s.base = Family::canopy;
  s.K = 3;
  s.half_line = true;
  specs.push_back(s);
  s = {};
  s.family = Family::dl_ball;
  s.m = 3;
  s.n = 2;
  s.L = 2;
  specs.push_back(s);
  s.family = Family::horocyclic_canopy;
  specs.push_back(s);
  s = {};
  s.family = Family::free_product_z2_edge;
  s.n = 3;
  specs.push_back(s);
  s = {};
  s.family = Family::hyperbolic_ball;
  s.n = 3;
  specs.push_back(s);
  for (const auto& spec : specs) {
    FiniteGraph a = build_family(spec), b = build_family(spec);
    EXPECT_NO_THROW(validate(a)) << spec.describe();
    EXPECT_EQ(a.edges(), b.edges()) << spec.describe();
    EXPECT_EQ(a.root(), b.root());
    EXPECT_EQ(std::vector<VertexId>(a.boundary().begin(), a.boundary().end()),
              std::vector<VertexId>(b.boundary().begin(), b.boundary().end()));
    EXPECT_FALSE(a.is_boundary(a.root())) << spec.describe();
    // BFS order from the root.
    const std::vector<int> d = a.distances_from(a.root());
    for (VertexId v = 1; v < a.num_vertices(); ++v) EXPECT_LE(d[v - 1], d[v]) << spec.describe();
    for (VertexId v = 0; v < a.num_vertices(); ++v) {
      auto nb = a.neighbors(v);
      EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
      EXPECT_EQ(std::adjacent_find(nb.begin(), nb.end()), nb.end());
      for (VertexId w : nb) {
        EXPECT_NE(w, v);
        EXPECT_TRUE(a.adjacent(w, v));
      }
    }
  }
}

TEST(Builder, RejectsDisconnectedAndLoops) {
  GraphBuilder b(3);
  b.add_edge(0, 1);
  EXPECT_THROW(std::move(b).build(0, {}, FamilySpec{}), Error);
  GraphBuilder c(2);
  EXPECT_THROW(c.add_edge(1, 1), Error);
}
