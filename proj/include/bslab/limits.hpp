#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bslab/graph.hpp"

namespace bslab {

/// Ball of radius `radius` around a vertex, re-rooted there. graph.root() is
/// the center; the ball's sphere is its boundary.
struct RootedNeighborhood {
  FiniteGraph graph;
  int radius = 0;
};

RootedNeighborhood rooted_ball(const FiniteGraph& g, VertexId v, int r);

/// Canonical byte string of a rooted graph: equal iff rooted-isomorphic.
using Signature = std::string;

inline constexpr std::size_t kSignatureCap = 512;

/// Individualization-refinement canonical form. Colors start from the
/// distance to the root and are refined to an equitable partition; ties are
/// broken by individualizing each vertex of the first non-singleton cell in
/// turn, keeping the lexicographically smallest leaf. Automorphisms found on
/// the way prune equivalent branches, so the result stays exact.
Signature canonical_signature(const RootedNeighborhood& nb, std::size_t cap = kSignatureCap);

/// Same, on a raw adjacency list (neighbors need not be sorted).
Signature canonical_signature(const std::vector<std::vector<std::uint32_t>>& adjacency, std::uint32_t root,
                              std::size_t cap = kSignatureCap);

/// Short stable hex digest of a signature for exports.
std::string signature_hex(const Signature& s);

struct NeighborhoodDist {
  int radius = 0;
  std::map<Signature, double> probability;
  bool exact = true;
  std::size_t samples = 0;  // vertices enumerated or drawn

  double total() const;
};

struct SampleMode {
  bool exact = true;
  std::size_t k = 0;
  std::uint64_t seed = 0;

  static SampleMode all() { return {}; }
  static SampleMode sampled(std::size_t k, std::uint64_t seed) { return {false, k, seed}; }
};

/// Empirical law of the radius-r ball around a uniform vertex. Sampled mode
/// draws vertex i from derive_seed(seed, "bs_sample", 0).
NeighborhoodDist neighborhood_distribution(const FiniteGraph& g, int r, SampleMode mode = SampleMode::all(),
                                           unsigned threads = 1);

double tv_distance(const NeighborhoodDist& p, const NeighborhoodDist& q);

/// Law of the radius-r ball of the canopy of T_d under its root law
/// P(level k) = ((d-2)/(d-1)) (d-1)^-k, for k = 0..K, with the tail mass
/// beyond K added to level K. Requires tail mass (d-1)^-(K+1) < 1e-9.
NeighborhoodDist canopy_reference_distribution(int d, int r, int K);

/// Smallest K accepted by canopy_reference_distribution for degree d.
int canopy_min_cutoff(int d);

/// TV between consecutive members of a sequence of distributions; steps
/// above the threshold are flagged as non-Cauchy.
struct CauchyReport {
  std::vector<double> step_tv;
  std::vector<bool> flagged;
  double threshold = 0.0;
};

CauchyReport cauchy_report(const std::vector<NeighborhoodDist>& sequence, double threshold);

}  // namespace bslab
