#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "bslab/error.hpp"
#include "bslab/generators.hpp"
#include "bslab/limits.hpp"

using namespace bslab;

namespace {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

Adjacency adjacency_of(const FiniteGraph& g) {
  Adjacency a(g.num_vertices());
  for (VertexId v = 0; v < g.num_vertices(); ++v) a[v].assign(g.neighbors(v).begin(), g.neighbors(v).end());
  return a;
}

Adjacency from_edges(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  Adjacency a(n);
  for (auto [u, v] : edges) {
    a[u].push_back(v);
    a[v].push_back(u);
  }
  return a;
}

Adjacency permuted(const Adjacency& a, const std::vector<std::uint32_t>& perm) {
  Adjacency b(a.size());
  for (std::size_t v = 0; v < a.size(); ++v)
    for (auto w : a[v]) b[perm[v]].push_back(perm[w]);
  return b;
}

// Brute-force rooted isomorphism for small graphs.
bool isomorphic(const Adjacency& a, std::uint32_t ra, const Adjacency& b, std::uint32_t rb) {
  if (a.size() != b.size()) return false;
  std::vector<std::uint32_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0u);
  std::set<std::pair<std::uint32_t, std::uint32_t>> eb;
  for (std::size_t v = 0; v < b.size(); ++v)
    for (auto w : b[v]) eb.insert({static_cast<std::uint32_t>(v), w});
  do {
    if (perm[ra] != rb) continue;
    bool ok = true;
    std::size_t count = 0;
    for (std::size_t v = 0; v < a.size() && ok; ++v)
      for (auto w : a[v]) {
        ++count;
        if (!eb.count({perm[v], perm[w]})) {
          ok = false;
          break;
        }
      }
    if (ok && count == eb.size()) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

bool connected(const Adjacency& a) {
  std::vector<char> seen(a.size(), 0);
  std::vector<std::uint32_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : a[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == a.size();
}

NeighborhoodDist dist_of(std::map<Signature, double> m, int r = 1) {
  NeighborhoodDist d;
  d.radius = r;
  d.probability = std::move(m);
  return d;
}

}  // namespace

TEST(RootedBall, Examples) {
  FiniteGraph g = tree_ball(3, 3);
  RootedNeighborhood z = rooted_ball(g, 5, 0);
  EXPECT_EQ(z.graph.num_vertices(), 1u);

  FiniteGraph path = grid_box({5});
  RootedNeighborhood mid = rooted_ball(path, path.root(), 1);
  EXPECT_EQ(mid.graph.num_vertices(), 3u);
  EXPECT_EQ(mid.graph.degree(mid.graph.root()), 2u);
  EXPECT_EQ(canonical_signature(mid), canonical_signature(rooted_ball(grid_box({3}), grid_box({3}).root(), 1)));

  RootedNeighborhood b = rooted_ball(tree_ball(3, 5), 0, 2);
  EXPECT_EQ(canonical_signature(b), canonical_signature(RootedNeighborhood{tree_ball(3, 2), 2}));
  EXPECT_THROW(rooted_ball(g, 1000, 1), Error);
}

TEST(Signature, SmallExamples) {
  EXPECT_EQ(canonical_signature(Adjacency(1), 0), canonical_signature(RootedNeighborhood{tree_ball(3, 0), 0}));
  const Adjacency p1 = from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  const Adjacency p2 = from_edges(4, {{3, 2}, {2, 0}, {0, 1}});
  EXPECT_EQ(canonical_signature(p1, 0), canonical_signature(p2, 3));
  EXPECT_NE(canonical_signature(p1, 0), canonical_signature(p1, 1));
  const Adjacency star = from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  EXPECT_NE(canonical_signature(star, 0), canonical_signature(p1, 0));
}

TEST(Signature, SizeCap) {
  try {
    canonical_signature(RootedNeighborhood{tree_ball(3, 8), 8});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::size_cap_exceeded);
  }
}

TEST(Signature, InvariantUnderRelabeling) {
  std::vector<std::pair<Adjacency, std::uint32_t>> cases;
  for (const FiniteGraph& g : {tree_ball(3, 3), grid_box({4, 4}, true), hyperbolic_ball(7, 2), dl_ball(3, 2, 1),
                               free_product_z2_edge_ball(2), canopy(3, 4), grid_box({5, 3})})
    cases.emplace_back(adjacency_of(g), g.root());
  FiniteGraph dl = dl_ball(3, 2, 3);
  RootedNeighborhood nb = rooted_ball(dl, 17, 2);
  cases.emplace_back(adjacency_of(nb.graph), nb.graph.root());
  std::mt19937_64 rng(7);
  for (const auto& [adj, root] : cases) {
    const Signature s = canonical_signature(adj, root);
    std::vector<std::uint32_t> perm(adj.size());
    std::iota(perm.begin(), perm.end(), 0u);
    for (int t = 0; t < 100; ++t) {
      std::shuffle(perm.begin(), perm.end(), rng);
      Adjacency b = permuted(adj, perm);
      for (auto& nbrs : b) std::shuffle(nbrs.begin(), nbrs.end(), rng);
      ASSERT_EQ(canonical_signature(b, perm[root]), s);
    }
  }
}

TEST(Signature, SeparatesNonIsomorphicRootedGraphs) {
  // Collect 20 pairwise non-isomorphic rooted graphs by brute force.
  std::mt19937_64 rng(11);
  std::vector<std::pair<Adjacency, std::uint32_t>> pool;
  while (pool.size() < 20) {
    const std::size_t n = 4 + rng() % 3;
    std::vector<std::pair<int, int>> edges;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (rng() % 2) edges.emplace_back(u, v);
    Adjacency a = from_edges(n, edges);
    if (!connected(a)) continue;
    const std::uint32_t root = static_cast<std::uint32_t>(rng() % n);
    bool fresh = true;
    for (const auto& [b, rb] : pool) fresh = fresh && !isomorphic(a, root, b, rb);
    if (fresh) pool.emplace_back(a, root);
  }
  std::set<Signature> sigs;
  for (const auto& [a, r] : pool) sigs.insert(canonical_signature(a, r));
  EXPECT_EQ(sigs.size(), 20u);
}

TEST(Signature, AgreesWithBruteForce) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 5;
    auto random_graph = [&] {
      std::vector<std::pair<int, int>> edges;
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
          if (rng() % 2) edges.emplace_back(u, v);
      return from_edges(n, edges);
    };
    Adjacency a = random_graph(), b = random_graph();
    if (!connected(a) || !connected(b)) continue;
    const std::uint32_t ra = rng() % n, rb = rng() % n;
    EXPECT_EQ(canonical_signature(a, ra) == canonical_signature(b, rb), isomorphic(a, ra, b, rb));
  }
}

TEST(Distribution, Examples) {
  NeighborhoodDist c = neighborhood_distribution(grid_box({8}, true), 1);
  ASSERT_EQ(c.probability.size(), 1u);
  EXPECT_DOUBLE_EQ(c.probability.begin()->second, 1.0);

  NeighborhoodDist p = neighborhood_distribution(grid_box({4}), 1);
  ASSERT_EQ(p.probability.size(), 2u);
  for (const auto& [sig, pr] : p.probability) EXPECT_DOUBLE_EQ(pr, 0.5);
  EXPECT_TRUE(p.exact);
  EXPECT_EQ(p.samples, 4u);
}

TEST(Distribution, TreeLeafMass) {
  const Signature leaf = canonical_signature(from_edges(2, {{0, 1}}), 0);
  for (int n = 3; n <= 9; ++n) {
    FiniteGraph g = tree_ball(3, n);
    NeighborhoodDist d = neighborhood_distribution(g, 1);
    const double expected = static_cast<double>(g.boundary().size()) / static_cast<double>(g.num_vertices());
    EXPECT_DOUBLE_EQ(d.probability.at(leaf), expected);
    EXPECT_NEAR(d.probability.at(leaf), 0.5, 2.0 / (1 << n));
    EXPECT_NEAR(d.total(), 1.0, 1e-12);
  }
}

TEST(Distribution, SampledIsDeterministicAcrossThreads) {
  FiniteGraph g = tree_ball(3, 7);
  NeighborhoodDist a = neighborhood_distribution(g, 2, SampleMode::sampled(500, 3), 1);
  NeighborhoodDist b = neighborhood_distribution(g, 2, SampleMode::sampled(500, 3), 4);
  EXPECT_FALSE(a.exact);
  EXPECT_EQ(a.samples, 500u);
  EXPECT_EQ(a.probability, b.probability);
}

TEST(TotalVariation, Examples) {
  NeighborhoodDist p = dist_of({{"a", 0.5}, {"b", 0.5}});
  NeighborhoodDist q = dist_of({{"a", 1.0}});
  NeighborhoodDist r = dist_of({{"c", 1.0}});
  EXPECT_DOUBLE_EQ(tv_distance(p, p), 0.0);
  EXPECT_DOUBLE_EQ(tv_distance(q, r), 1.0);
  EXPECT_DOUBLE_EQ(tv_distance(p, q), 0.5);
  try {
    tv_distance(p, dist_of({{"a", 1.0}}, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::radius_mismatch);
  }
}

TEST(TotalVariation, MetricOnRandomTriples) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_dist = [&] {
    std::map<Signature, double> m;
    double total = 0;
    for (const char* k : {"a", "b", "c", "d", "e"})
      if (u(rng) < 0.7) total += (m[k] = u(rng));
    if (m.empty()) total = m["a"] = 1.0;
    for (auto& [k, v] : m) v /= total;
    return dist_of(m);
  };
  for (int t = 0; t < 200; ++t) {
    NeighborhoodDist a = random_dist(), b = random_dist(), c = random_dist();
    EXPECT_EQ(tv_distance(a, b), tv_distance(b, a));
    EXPECT_LE(tv_distance(a, c), tv_distance(a, b) + tv_distance(b, c) + 1e-12);
  }
}

TEST(CanopyReference, Normalization) {
  for (int r = 0; r <= 3; ++r) {
    NeighborhoodDist d = canopy_reference_distribution(3, r, canopy_min_cutoff(3));
    EXPECT_NEAR(d.total(), 1.0, 1e-12);
    if (r == 0) EXPECT_EQ(d.probability.size(), 1u);
  }
  try {
    canopy_reference_distribution(3, 2, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::cutoff_too_small);
  }
}

TEST(CanopyReference, LevelWeights) {
  // At radius 1 the level-0 root is a leaf, the level-1 root has two leaf
  // children and a parent, and all higher levels look alike.
  NeighborhoodDist d = canopy_reference_distribution(3, 1, canopy_min_cutoff(3));
  const Signature leaf = canonical_signature(from_edges(2, {{0, 1}}), 0);
  const Signature claw = canonical_signature(from_edges(4, {{0, 1}, {0, 2}, {0, 3}}), 0);
  EXPECT_NEAR(d.probability.at(leaf), 0.5, 1e-12);
  EXPECT_NEAR(d.probability.at(claw), 0.5, 1e-12);
  NeighborhoodDist d2 = canopy_reference_distribution(3, 2, canopy_min_cutoff(3));
  // Levels 0, 1 and >= 2 give three distinct radius-2 balls.
  EXPECT_EQ(d2.probability.size(), 3u);
  std::vector<double> masses;
  for (const auto& [s, p] : d2.probability) masses.push_back(p);
  std::sort(masses.begin(), masses.end());
  EXPECT_NEAR(masses[0], 0.25, 1e-12);
  EXPECT_NEAR(masses[1], 0.25, 1e-12);
  EXPECT_NEAR(masses[2], 0.5, 1e-12);
}

TEST(CanopyReference, TreeBallsConverge) {
  const NeighborhoodDist ref = canopy_reference_distribution(3, 2, canopy_min_cutoff(3));
  double prev = 2.0;
  for (int n = 6; n <= 10; ++n) {
    const double tv = tv_distance(neighborhood_distribution(tree_ball(3, n), 2), ref);
    EXPECT_LE(tv, prev);
    prev = tv;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(Cauchy, FlagsLargeSteps) {
  std::vector<NeighborhoodDist> seq = {dist_of({{"a", 1.0}}), dist_of({{"a", 0.5}, {"b", 0.5}}),
                                       dist_of({{"a", 0.48}, {"b", 0.52}})};
  CauchyReport r = cauchy_report(seq, 0.1);
  ASSERT_EQ(r.step_tv.size(), 2u);
  EXPECT_TRUE(r.flagged[0]);
  EXPECT_FALSE(r.flagged[1]);
}
