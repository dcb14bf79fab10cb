#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bslab/graph.hpp"
#include "bslab/stats.hpp"

namespace bslab {

enum class EscapeMethod { exact_solve, monte_carlo };

/// Probability that simple random walk from the root hits the boundary
/// before returning to the root.
struct EscapeResult {
  double escape = 0.0;
  EscapeMethod method = EscapeMethod::exact_solve;
  Interval ci;               // monte carlo only; [escape, escape] for the solve
  std::size_t replicas = 0;  // monte carlo only
  std::uint64_t seed = 0;
  std::size_t n_vertices = 0;
  double residual = 0.0;  // exact only: max harmonic defect over interior vertices
  std::size_t iterations = 0;
};

struct SolveOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 0;  // 0 means 10 * n + 1000
};

/// h = 1 on the boundary, h = 0 at the root, harmonic elsewhere, solved by
/// Jacobi-preconditioned conjugate gradients on the interior Laplacian.
/// Escape = mean of h over the root's neighbors.
EscapeResult escape_probability_exact(const FiniteGraph& g, const SolveOptions& options = {});

/// Harmonic extension used by escape_probability_exact (indexed by vertex).
std::vector<double> harmonic_escape_function(const FiniteGraph& g, const SolveOptions& options = {},
                                             double* residual = nullptr, std::size_t* iterations = nullptr);

/// Walk i uses make_rng(seed, "walk", i).
EscapeResult escape_probability_mc(const FiniteGraph& g, std::size_t replicas, std::uint64_t seed,
                                   unsigned threads = 1);

struct TransienceOptions {
  double floor = 0.1;
  std::size_t trend_window = 3;
  SolveOptions solve;
};

/// Heuristic over finite truncations. The limit is a power-law extrapolation
/// of the escape sequence (the last value when the fit is ill-conditioned).
/// "vanishing": limit below the floor and the last trend_window values
/// nonincreasing. "bounded-below": limit at or above the floor. Otherwise
/// "inconclusive".
struct TransienceProfile {
  FamilySpec family;
  std::vector<int> sizes;
  std::vector<EscapeResult> results;
  bool decreasing = false;  // over the trend window
  double final_value = 0.0;
  double limit = 0.0;
  bool fallback = false;
  std::string verdict;
  double floor = 0.0;
  std::size_t trend_window = 0;
  std::string label = "heuristic finite-truncation verdict";
};

TransienceProfile transience_profile(const FamilySpec& family, std::span<const int> sizes,
                                     const TransienceOptions& options = {});

}  // namespace bslab
