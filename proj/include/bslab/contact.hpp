#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bslab/graph.hpp"
#include "bslab/stats.hpp"

namespace bslab {

/// Graphical representation. Vertex v carries a rate-1 recovery stream and
/// an arrow stream of rate deg(v) * lambda_max; arrow j of v points at a
/// uniform neighbor and carries a mark u uniform on (0, lambda_max), and is
/// used by the process at rate lambda iff u <= lambda. All streams are
/// counter-based functions of (seed, vertex, index), so the same seed and
/// lambda_max couple every lambda <= lambda_max.
struct ContactStats {
  double extinction_time = 0.0;  // horizon when censored
  bool censored = false;
  bool alive_at_horizon = false;
  std::size_t root_reinfections = 0;  // infections of the root after T/2
  int max_distance = 0;               // from the root, over all infected vertices
  bool touched_boundary = false;
};

struct ContactEvent {
  double time = 0.0;
  VertexId vertex = 0;
  bool infected = false;  // true: infection, false: recovery
};

struct ContactOptions {
  double lambda_max = 0.0;  // 0 means lambda
  std::vector<ContactEvent>* trace = nullptr;
};

/// Recovery marks of vertex v in (0, horizon] under `seed`.
std::vector<double> recovery_marks(VertexId v, double horizon, std::uint64_t seed);

ContactStats graphical_sim(const FiniteGraph& g, double lambda, std::span<const VertexId> init, double horizon,
                           std::uint64_t seed, const ContactOptions& options = {});

/// Per replica, the smallest lambda (<= lambda_max) at which each proxy holds;
/// +infinity when it fails even at lambda_max. Both runs of a replica share
/// one graphical representation, and the fully infected start dominates the
/// root start, so weak <= alive_root <= strong.
struct ContactThresholds {
  double weak = 0.0;        // alive at the horizon, started from every vertex
  double alive_root = 0.0;  // alive at the horizon, started from the root
  /// Started from the root: root infected after its first recovery mark at
  /// or after T/2, and alive at the horizon.
  double strong = 0.0;
  double touch = 0.0;  // started from the root: some boundary vertex ever infected
};

ContactThresholds contact_thresholds(const FiniteGraph& g, double horizon, double lambda_max, std::uint64_t seed);

struct SurvivalCurve {
  std::vector<double> lambda;
  std::vector<double> survival;  // weak proxy
  std::vector<Interval> survival_ci;
  std::vector<double> survival_root;
  std::vector<double> reinfect;  // strong proxy
  std::vector<Interval> reinfect_ci;
  std::vector<double> boundary_touch;
  double horizon = 0.0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  std::vector<ContactThresholds> thresholds;  // per replica
};

/// Replica r uses seed derive_seed(seed, "contact", r) at lambda_max = the
/// largest grid value, so every column is exactly nondecreasing in lambda.
SurvivalCurve survival_curve(const FiniteGraph& g, std::span<const double> lambda_grid, double horizon,
                             std::size_t replicas, std::uint64_t seed, unsigned threads = 1);

struct LambdaOptions {
  double level = 0.5;
  double horizon_per_size = 2.0;  // T = horizon_per_size * size
  std::size_t bootstrap = 200;
  unsigned threads = 1;
};

struct LambdaSize {
  int size = 0;
  double horizon = 0.0;
  double lambda_hat = 0.0;
  bool crossed = false;
  Interval ci;
  SurvivalCurve curve;
};

struct LambdaEstimate {
  std::string proxy;  // "weak" or "strong"
  std::vector<LambdaSize> sizes;
  double extrapolated = 0.0;
  Interval ci;
  ApproachFit fit;
  bool fallback = false;
  std::string label = "heuristic finite-volume estimate";
};

struct LambdaPair {
  LambdaEstimate weak;
  LambdaEstimate strong;
};

/// Per size the crossing is the level-quantile of the per-replica
/// thresholds, restricted to the grid range. Extrapolation follows
/// estimate_pc (power law, largest-size fallback; fewer than three sizes
/// always fall back). Throws non_crossing_curve when the largest size
/// never reaches the level on the grid.
/// Both estimates from one set of survival curves.
LambdaPair estimate_lambdas(const FamilySpec& family, std::span<const int> sizes, std::span<const double> lambda_grid,
                            std::size_t replicas, std::uint64_t seed, const LambdaOptions& options = {});

LambdaEstimate estimate_lambda_c(const FamilySpec& family, std::span<const int> sizes,
                                 std::span<const double> lambda_grid, std::size_t replicas, std::uint64_t seed,
                                 const LambdaOptions& options = {});
LambdaEstimate estimate_lambda_s(const FamilySpec& family, std::span<const int> sizes,
                                 std::span<const double> lambda_grid, std::size_t replicas, std::uint64_t seed,
                                 const LambdaOptions& options = {});

}  // namespace bslab
