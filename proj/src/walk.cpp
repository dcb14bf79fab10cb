#include "bslab/walk.hpp"

#include <algorithm>
#include <cmath>

#include "bslab/error.hpp"
#include "bslab/generators.hpp"
#include "bslab/parallel.hpp"
#include "bslab/rng.hpp"

namespace bslab {

namespace {

void check_escape_input(const FiniteGraph& g) {
  require(!g.boundary().empty(), ErrorCode::empty_boundary, "escape probability needs a boundary");
  require(!g.is_boundary(g.root()), ErrorCode::parameter_out_of_range, "root lies on the boundary");
}

}  // namespace

std::vector<double> harmonic_escape_function(const FiniteGraph& g, const SolveOptions& options, double* residual,
                                             std::size_t* iterations) {
  check_escape_input(g);
  const std::size_t n = g.num_vertices();
  const VertexId root = g.root();
  auto interior = [&](VertexId v) { return v != root && !g.is_boundary(v); };

  // A = D - adjacency restricted to the interior; b counts boundary neighbors.
  std::vector<double> b(n, 0.0), x(n, 0.0);
  for (VertexId v = 0; v < n; ++v) {
    if (!interior(v)) {
      x[v] = g.is_boundary(v) ? 1.0 : 0.0;
      continue;
    }
    for (VertexId w : g.neighbors(v))
      if (g.is_boundary(w)) b[v] += 1.0;
  }
  auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (VertexId v = 0; v < n; ++v) {
      if (!interior(v)) {
        out[v] = 0.0;
        continue;
      }
      double s = static_cast<double>(g.degree(v)) * in[v];
      for (VertexId w : g.neighbors(v))
        if (interior(w)) s -= in[w];
      out[v] = s;
    }
  };
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
    double s = 0.0;
    for (VertexId v = 0; v < n; ++v)
      if (interior(v)) s += a[v] * c[v];
    return s;
  };
  auto max_abs = [&](const std::vector<double>& a) {
    double m = 0.0;
    for (VertexId v = 0; v < n; ++v)
      if (interior(v)) m = std::max(m, std::abs(a[v]));
    return m;
  };

  std::vector<double> u(n, 0.0), r(n, 0.0), z(n, 0.0), p(n, 0.0), q(n, 0.0);
  for (VertexId v = 0; v < n; ++v) {
    r[v] = interior(v) ? b[v] : 0.0;
    z[v] = interior(v) ? r[v] / static_cast<double>(g.degree(v)) : 0.0;
  }
  p = z;
  double rz = dot(r, z);
  const std::size_t cap = options.max_iterations ? options.max_iterations : 10 * n + 1000;
  std::size_t it = 0;
  // Iterate a little past the target so that the recomputed residual also meets it.
  while (max_abs(r) > 0.01 * options.tolerance && it < cap) {
    apply(p, q);
    const double pq = dot(p, q);
    if (pq <= 0.0) break;
    const double alpha = rz / pq;
    for (VertexId v = 0; v < n; ++v) {
      u[v] += alpha * p[v];
      r[v] -= alpha * q[v];
    }
    for (VertexId v = 0; v < n; ++v) z[v] = interior(v) ? r[v] / static_cast<double>(g.degree(v)) : 0.0;
    const double rz_next = dot(r, z);
    for (VertexId v = 0; v < n; ++v) p[v] = z[v] + (rz_next / rz) * p[v];
    rz = rz_next;
    ++it;
  }

  for (VertexId v = 0; v < n; ++v)
    if (interior(v)) x[v] = u[v];
  // Harmonic defect of the full function at every interior vertex.
  double defect = 0.0;
  for (VertexId v = 0; v < n; ++v) {
    if (!interior(v)) continue;
    double s = static_cast<double>(g.degree(v)) * x[v];
    for (VertexId w : g.neighbors(v)) s -= x[w];
    defect = std::max(defect, std::abs(s));
  }
  require(defect < options.tolerance, ErrorCode::solver_non_convergence,
          "harmonic residual " + std::to_string(defect) + " after " + std::to_string(it) + " iterations");
  if (residual) *residual = defect;
  if (iterations) *iterations = it;
  return x;
}

EscapeResult escape_probability_exact(const FiniteGraph& g, const SolveOptions& options) {
  EscapeResult out;
  out.method = EscapeMethod::exact_solve;
  out.n_vertices = g.num_vertices();
  const std::vector<double> h = harmonic_escape_function(g, options, &out.residual, &out.iterations);
  double s = 0.0;
  for (VertexId w : g.neighbors(g.root())) s += h[w];
  out.escape = g.degree(g.root()) ? s / static_cast<double>(g.degree(g.root())) : 0.0;
  out.ci = {out.escape, out.escape};
  return out;
}

EscapeResult escape_probability_mc(const FiniteGraph& g, std::size_t replicas, std::uint64_t seed,
                                   unsigned threads) {
  check_escape_input(g);
  require(replicas >= 1, ErrorCode::parameter_out_of_range, "replicas must be >= 1");
  const VertexId root = g.root();
  std::vector<std::uint8_t> escaped(replicas, 0);
  if (g.degree(root) > 0) {
    parallel_for(replicas, threads, [&](unsigned, std::size_t i) {
      Rng rng = make_rng(seed, "walk", i);
      VertexId v = root;
      do {
        const auto nb = g.neighbors(v);
        v = nb[std::uniform_int_distribution<std::size_t>(0, nb.size() - 1)(rng)];
      } while (v != root && !g.is_boundary(v));
      escaped[i] = v != root;
    });
  }
  double hits = 0.0;
  for (auto e : escaped) hits += e;
  EscapeResult out;
  out.method = EscapeMethod::monte_carlo;
  out.escape = hits / static_cast<double>(replicas);
  out.ci = wilson_interval(hits, static_cast<double>(replicas));
  out.replicas = replicas;
  out.seed = seed;
  out.n_vertices = g.num_vertices();
  return out;
}

TransienceProfile transience_profile(const FamilySpec& family, std::span<const int> sizes,
                                     const TransienceOptions& options) {
  require(sizes.size() >= 3, ErrorCode::parameter_out_of_range, "need at least three sizes");
  require(options.trend_window >= 2 && options.trend_window <= sizes.size(), ErrorCode::parameter_out_of_range,
          "trend_window must lie in [2, number of sizes]");
  require(options.floor >= 0.0 && options.floor <= 1.0, ErrorCode::parameter_out_of_range,
          "floor must lie in [0, 1]");
  TransienceProfile t;
  t.family = family;
  t.floor = options.floor;
  t.trend_window = options.trend_window;
  std::vector<int> sorted(sizes.begin(), sizes.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> x, y;
  for (int size : sorted) {
    t.sizes.push_back(size);
    t.results.push_back(escape_probability_exact(build_family(family.with_size(size)), options.solve));
    x.push_back(size);
    y.push_back(t.results.back().escape);
  }
  t.final_value = y.back();
  t.decreasing = true;
  for (std::size_t i = y.size() - options.trend_window + 1; i < y.size(); ++i)
    if (y[i] > y[i - 1]) t.decreasing = false;

  const ApproachFit fit = fit_approach(ApproachModel::power, x, y, 0.0, 1.0, 0.25, 3.0);
  t.fallback = !fit.well_conditioned;
  t.limit = t.fallback ? t.final_value : fit.limit;
  if (t.limit < options.floor && t.decreasing) t.verdict = "vanishing";
  else if (t.limit >= options.floor) t.verdict = "bounded-below";
  else t.verdict = "inconclusive";
  return t;
}

}  // namespace bslab
