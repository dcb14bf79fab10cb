#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bslab/graph.hpp"
#include "bslab/stats.hpp"

namespace bslab {

using VertexPair = std::pair<VertexId, VertexId>;

/// Observables recorded by the sweep, indexed by occupation count k.
enum class Observable {
  largest,        // size of the largest open cluster
  root_boundary,  // root open and connected to some boundary site
  boundary_mass,  // number of boundary sites in the root's open cluster
};

std::string observable_name(Observable o);
Observable parse_observable(const std::string& name);

/// Integer sums over replicas. Kept separately from the averaged curve so
/// that batches merge exactly, independent of scheduling.
struct SweepTotals {
  std::size_t n_sites = 0;
  std::size_t replicas = 0;
  std::vector<std::uint64_t> largest;
  std::vector<std::uint64_t> root_boundary;
  std::vector<std::uint64_t> boundary_mass;
  std::vector<std::vector<std::uint64_t>> pairs;
  /// Per replica: the occupation count at which the root first reaches the
  /// boundary (n_sites + 1 if never).
  std::vector<std::uint32_t> first_connection;

  void merge(const SweepTotals& other);
};

struct MicrocanonicalCurve {
  std::size_t n_sites = 0;
  std::size_t replicas = 0;  // 0 for the exhaustive curve
  bool exact = false;
  std::vector<double> largest;
  std::vector<double> root_boundary;
  std::vector<double> boundary_mass;
  std::vector<VertexPair> pairs;
  std::vector<std::vector<double>> pair_connected;
  std::vector<std::uint32_t> first_connection;

  std::span<const double> values(Observable o) const;
};

struct SweepOptions {
  unsigned threads = 1;
  std::vector<VertexPair> pairs;
  /// Replica indices [first_replica, first_replica + replicas) are used for
  /// stream derivation, so disjoint ranges give independent batches.
  std::size_t first_replica = 0;
};

/// Newman-Ziff sweep: sites are occupied one at a time in a seeded uniform
/// order while a union-find tracks clusters; observables are recorded after
/// every insertion. Replica r draws its order from derive_seed(seed,
/// "nz_sweep", r).
SweepTotals nz_sweep_totals(const FiniteGraph& g, std::uint64_t seed, std::size_t replicas,
                            const SweepOptions& options = {});
MicrocanonicalCurve finalize(const SweepTotals& totals, std::vector<VertexPair> pairs = {});
MicrocanonicalCurve nz_sweep(const FiniteGraph& g, std::uint64_t seed, std::size_t replicas,
                             const SweepOptions& options = {});

/// Exact microcanonical averages over all C(N, k) occupied subsets. Feasible
/// up to about 24 sites.
MicrocanonicalCurve exact_microcanonical(const FiniteGraph& g, std::vector<VertexPair> pairs = {});

/// Binomial(N, p) probabilities over the window of k where they are not
/// negligible (below e^-50 of the mode). Computed in log space from the mode
/// outward and normalized.
struct BinomialWindow {
  std::size_t first = 0;
  std::vector<double> weights;
};
BinomialWindow binomial_weights(std::size_t n, double p);

/// sum_k Binomial(N, k; p) * micro[k], with micro indexed 0..N.
double convolve(std::span<const double> micro, double p);

/// Smallest p in [0, 1] with convolve(micro, p) >= level, by bisection.
/// Requires micro to be nondecreasing; nullopt when the level is never reached.
std::optional<double> crossing_point(std::span<const double> micro, double level, double tolerance = 1e-7);

struct CanonicalPoint {
  double p = 0.0;
  double largest = 0.0;           // mean largest-cluster size
  double largest_fraction = 0.0;  // divided by N
  double theta = 0.0;             // P(root <-> boundary)
  Interval theta_ci;
  double boundary_mass = 0.0;
  std::vector<double> pair_connected;
  std::vector<Interval> pair_ci;
};

struct CanonicalCurve {
  std::size_t n_sites = 0;
  std::size_t replicas = 0;
  std::vector<CanonicalPoint> points;
};

CanonicalCurve canonical_curve(const MicrocanonicalCurve& micro, std::span<const double> p_grid);

/// Finite-volume estimate of P_p(root <-> boundary) with Wilson intervals.
CanonicalCurve estimate_theta(const FiniteGraph& g, std::span<const double> p_grid, std::size_t replicas,
                              std::uint64_t seed, unsigned threads = 1);

/// Threshold estimation from per-size crossings.
struct PcOptions {
  /// Crossing observable. boundary_mass is E[# boundary sites joined to the
  /// root]; root_boundary is theta.
  Observable observable = Observable::boundary_mass;
  double level = 0.5;
  ApproachModel model = ApproachModel::power;
  double rate_min = 0.25;
  double rate_max = 3.0;
  /// Replicas are split into this many batches; the bootstrap resamples
  /// batches.
  std::size_t batches = 20;
  std::size_t bootstrap = 200;
  unsigned threads = 1;
};

struct PcSize {
  int size = 0;
  std::size_t n_sites = 0;
  double p_hat = 1.0;
  bool crossed = false;
  Interval ci;
};

struct PcEstimate {
  Observable observable = Observable::boundary_mass;
  double level = 0.5;
  std::vector<PcSize> sizes;
  double extrapolated = 1.0;
  Interval ci;
  ApproachFit fit;
  bool fallback = false;  // extrapolated value is the largest-size crossing
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
};

/// Size n uses the sweep stream derived from (seed, "estimate_pc", n). A size
/// whose curve never reaches the level gets p_hat = 1 and crossed = false.
PcEstimate estimate_pc(const FamilySpec& family, std::span<const int> sizes, std::size_t replicas,
                       std::uint64_t seed, const PcOptions& options = {});

/// Fixed-p site configuration of replica r: v is open iff
/// counter_uniform(derive_seed(seed, "site_config", r), v, 0) < p, which
/// couples all p monotonically.
std::vector<std::uint8_t> site_configuration(std::size_t n, double p, std::uint64_t seed, std::size_t replica);

struct TauProfile {
  double p = 0.0;
  std::uint64_t seed = 0;
  std::size_t replicas = 0;
  std::size_t pairs_per_distance = 0;
  std::vector<int> d;
  std::vector<double> tau;
  std::vector<Interval> ci;
  std::vector<std::size_t> n_pairs;
  /// hits[i][r]: pairs at distance d[i] connected in replica r.
  std::vector<std::vector<std::uint32_t>> hits;
};

/// Pairs at exact distance d are drawn from the bulk (vertices at distance
/// >= buffer from the boundary); the pair set is fixed across replicas.
/// buffer >= d_max is the usual choice; smaller buffers are accepted for
/// graphs whose bulk is thin.
TauProfile connection_profile(const FiniteGraph& g, double p, int d_max, int buffer, std::size_t pairs_per_distance,
                              std::size_t replicas, std::uint64_t seed, unsigned threads = 1);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool r2_defined = false;
  Interval slope_ci;
  std::size_t points = 0;
};

/// Least squares of log tau against d over distances in [d_lo, d_hi] with
/// tau > 0; the slope interval is a replica bootstrap.
DecayFit decay_rate_fit(const TauProfile& t, int d_lo = 0, int d_hi = std::numeric_limits<int>::max(),
                        std::size_t bootstrap = 200);

struct PuRow {
  double p = 0.0;
  bool decay = true;
  bool vanished = false;  // too few positive tau values in the window to fit
  DecayFit fit;
  TauProfile profile;
};

struct PuOptions {
  std::size_t pairs_per_distance = 100;
  int buffer = 0;  // bulk buffer; 0 means d_max
  std::size_t bootstrap = 200;
  unsigned threads = 1;
};

/// Heuristic finite-volume uniqueness threshold: smallest grid p whose decay
/// slope interval over [d_max/2, d_max] contains 0 (1 if none does). Needs
/// d_max >= 6 so that the window holds four distances.
struct PuEstimate {
  std::vector<PuRow> rows;
  double p_u = 1.0;
  bool found = false;
  int size = 0;
  int d_max = 0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
};

PuEstimate estimate_pu(const FamilySpec& family, int size, std::span<const double> p_grid, int d_max,
                       std::size_t replicas, std::uint64_t seed, const PuOptions& options = {});

struct ClusterCounts {
  std::vector<std::size_t> counts;            // per replica
  std::map<std::size_t, std::size_t> histogram;
  double mean = 0.0;
};

/// Number of open clusters of size >= s_min touching the boundary.
ClusterCounts boundary_cluster_count(const FiniteGraph& g, double p, std::size_t s_min, std::size_t replicas,
                                     std::uint64_t seed, unsigned threads = 1);

}  // namespace bslab
