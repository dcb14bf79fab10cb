#include <algorithm>
#include <cmath>
#include <deque>

#include "bslab/error.hpp"
#include "bslab/generators.hpp"
#include "bslab/parallel.hpp"
#include "bslab/percolation.hpp"
#include "bslab/rng.hpp"
#include "bslab/union_find.hpp"

namespace bslab {

std::vector<std::uint8_t> site_configuration(std::size_t n, double p, std::uint64_t seed, std::size_t replica) {
  const std::uint64_t key = derive_seed(seed, "site_config", replica);
  std::vector<std::uint8_t> open(n);
  for (std::size_t v = 0; v < n; ++v) open[v] = counter_uniform(key, v, 0) < p;
  return open;
}

namespace {

// Union-find over the open sites of one configuration.
UnionFind open_clusters(const FiniteGraph& g, const std::vector<std::uint8_t>& open) {
  UnionFind uf(g.num_vertices());
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (!open[v]) continue;
    for (VertexId w : g.neighbors(v))
      if (w < v && open[w]) uf.unite(v, w);
  }
  return uf;
}

std::vector<int> distance_to_boundary(const FiniteGraph& g) {
  std::vector<int> dist(g.num_vertices(), -1);
  std::deque<VertexId> queue;
  for (VertexId b : g.boundary()) {
    dist[b] = 0;
    queue.push_back(b);
  }
  while (!queue.empty()) {
    VertexId v = queue.front();
    queue.pop_front();
    for (VertexId w : g.neighbors(v))
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
  }
  if (g.boundary().empty()) std::fill(dist.begin(), dist.end(), std::numeric_limits<int>::max());
  return dist;
}

// Vertices at distance 0..depth from x, grouped by distance.
std::vector<std::vector<VertexId>> layers(const FiniteGraph& g, VertexId x, int depth, std::vector<int>& scratch) {
  std::vector<std::vector<VertexId>> out(depth + 1);
  std::vector<VertexId> touched{x};
  scratch[x] = 0;
  for (std::size_t i = 0; i < touched.size(); ++i) {
    const VertexId v = touched[i];
    out[scratch[v]].push_back(v);
    if (scratch[v] == depth) continue;
    for (VertexId w : g.neighbors(v))
      if (scratch[w] < 0) {
        scratch[w] = scratch[v] + 1;
        touched.push_back(w);
      }
  }
  for (VertexId v : touched) scratch[v] = -1;
  return out;
}

}  // namespace

TauProfile connection_profile(const FiniteGraph& g, double p, int d_max, int buffer, std::size_t pairs_per_distance,
                              std::size_t replicas, std::uint64_t seed, unsigned threads) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::parameter_out_of_range, "p must lie in [0, 1]");
  require(d_max >= 0 && buffer >= 0, ErrorCode::parameter_out_of_range, "d_max and buffer must be >= 0");
  require(pairs_per_distance >= 1 && replicas >= 1, ErrorCode::parameter_out_of_range,
          "pairs_per_distance and replicas must be >= 1");

  const std::vector<int> to_boundary = distance_to_boundary(g);
  std::vector<VertexId> bulk;
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    if (to_boundary[v] >= buffer) bulk.push_back(v);
  require(!bulk.empty(), ErrorCode::insufficient_bulk, "no vertex lies at distance >= buffer from the boundary");

  // The pair set is drawn once and shared by all replicas (and all p).
  Rng rng = make_rng(seed, "tau_pairs", 0);
  std::vector<int> scratch(g.num_vertices(), -1);
  std::vector<std::vector<VertexPair>> pairs(d_max + 1);
  std::uniform_int_distribution<std::size_t> pick_bulk(0, bulk.size() - 1);
  // One BFS per source vertex serves every distance still short of pairs.
  std::size_t missing = static_cast<std::size_t>(d_max + 1) * pairs_per_distance;
  std::size_t failures = 0;
  while (missing > 0) {
    const VertexId x = bulk[pick_bulk(rng)];
    std::vector<std::vector<VertexId>> shells = layers(g, x, d_max, scratch);
    bool progress = false;
    for (int d = 0; d <= d_max; ++d) {
      if (pairs[d].size() >= pairs_per_distance) continue;
      std::erase_if(shells[d], [&](VertexId y) { return to_boundary[y] < buffer; });
      if (shells[d].empty()) continue;
      std::uniform_int_distribution<std::size_t> pick_y(0, shells[d].size() - 1);
      pairs[d].emplace_back(x, shells[d][pick_y(rng)]);
      --missing;
      progress = true;
    }
    if (!progress)
      require(++failures < 1000, ErrorCode::insufficient_bulk,
              "no bulk pairs at some distance <= d_max; graph too small for the buffer");
  }

  TauProfile t;
  t.p = p;
  t.seed = seed;
  t.replicas = replicas;
  t.pairs_per_distance = pairs_per_distance;
  t.hits.assign(d_max + 1, std::vector<std::uint32_t>(replicas, 0));
  parallel_for(replicas, threads, [&](unsigned, std::size_t r) {
    const std::vector<std::uint8_t> open = site_configuration(g.num_vertices(), p, seed, r);
    UnionFind uf = open_clusters(g, open);
    for (int d = 0; d <= d_max; ++d) {
      std::uint32_t h = 0;
      for (const auto& [a, b] : pairs[d])
        if (open[a] && open[b] && uf.connected(a, b)) ++h;
      t.hits[d][r] = h;
    }
  });

  const double n = static_cast<double>(pairs_per_distance * replicas);
  for (int d = 0; d <= d_max; ++d) {
    std::uint64_t total = 0;
    for (std::uint32_t h : t.hits[d]) total += h;
    t.d.push_back(d);
    t.tau.push_back(static_cast<double>(total) / n);
    t.ci.push_back(wilson_interval(static_cast<double>(total), n));
    t.n_pairs.push_back(pairs_per_distance * replicas);
  }
  return t;
}

namespace {

std::optional<LinearFit> fit_log(std::span<const int> d, std::span<const double> tau, int lo, int hi) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] >= lo && d[i] <= hi && tau[i] > 0) {
      x.push_back(d[i]);
      y.push_back(std::log(tau[i]));
    }
  if (x.size() < 4) return std::nullopt;
  return linear_fit(x, y);
}

}  // namespace

DecayFit decay_rate_fit(const TauProfile& t, int d_lo, int d_hi, std::size_t bootstrap) {
  std::size_t positive = 0;
  for (std::size_t i = 0; i < t.d.size(); ++i)
    if (t.d[i] >= d_lo && t.d[i] <= d_hi && t.tau[i] > 0) ++positive;
  require(positive > 0, ErrorCode::all_zero_profile, "tau is zero at every distance in the window");
  require(positive >= 4, ErrorCode::all_zero_profile, "fewer than four distances with tau > 0 in the window");

  const LinearFit f = *fit_log(t.d, t.tau, d_lo, d_hi);
  DecayFit out;
  out.slope = f.slope;
  out.intercept = f.intercept;
  out.r2 = f.r2;
  out.r2_defined = f.r2_defined;
  out.points = positive;
  out.slope_ci = {f.slope, f.slope};

  const std::size_t reps = t.hits.empty() ? 0 : t.hits.front().size();
  if (bootstrap == 0 || reps == 0) return out;
  std::vector<double> slopes;
  std::vector<std::size_t> chosen(reps);
  std::vector<double> tau(t.d.size());
  for (std::size_t b = 0; b < bootstrap; ++b) {
    Rng rng = make_rng(t.seed, "tau_bootstrap", b);
    std::uniform_int_distribution<std::size_t> draw(0, reps - 1);
    for (auto& c : chosen) c = draw(rng);
    for (std::size_t i = 0; i < t.d.size(); ++i) {
      std::uint64_t s = 0;
      for (std::size_t c : chosen) s += t.hits[i][c];
      tau[i] = static_cast<double>(s) / static_cast<double>(reps * t.pairs_per_distance);
    }
    // A resample with fewer than four positive points has no finite slope;
    // it counts as steeper than anything observed.
    if (auto fb = fit_log(t.d, tau, d_lo, d_hi)) slopes.push_back(fb->slope);
    else slopes.push_back(-INFINITY);
  }
  out.slope_ci = {quantile(slopes, 0.025), quantile(slopes, 0.975)};
  return out;
}

PuEstimate estimate_pu(const FamilySpec& family, int size, std::span<const double> p_grid, int d_max,
                       std::size_t replicas, std::uint64_t seed, const PuOptions& options) {
  require(!p_grid.empty(), ErrorCode::parameter_out_of_range, "empty p grid");
  require(d_max >= 6, ErrorCode::parameter_out_of_range, "d_max must be >= 6 for a four-point window fit");
  require(options.buffer >= 0, ErrorCode::parameter_out_of_range, "buffer must be >= 0");
  const FiniteGraph g = build_family(family.with_size(size));
  PuEstimate est;
  est.size = size;
  est.d_max = d_max;
  est.replicas = replicas;
  est.seed = seed;
  std::vector<double> grid(p_grid.begin(), p_grid.end());
  std::sort(grid.begin(), grid.end());
  for (double p : grid) {
    PuRow row;
    row.p = p;
    // Same seed at every p: pairs and configurations are coupled across the grid.
    row.profile = connection_profile(g, p, d_max, options.buffer ? options.buffer : d_max, options.pairs_per_distance,
                                     replicas, seed, options.threads);
    try {
      row.fit = decay_rate_fit(row.profile, d_max / 2, d_max, options.bootstrap);
      row.decay = !(row.fit.slope_ci.lo <= 0.0 && row.fit.slope_ci.hi >= 0.0);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::all_zero_profile) throw;
      row.vanished = true;
      row.decay = true;
    }
    if (!row.decay && !est.found) {
      est.found = true;
      est.p_u = p;
    }
    est.rows.push_back(std::move(row));
  }
  return est;
}

ClusterCounts boundary_cluster_count(const FiniteGraph& g, double p, std::size_t s_min, std::size_t replicas,
                                     std::uint64_t seed, unsigned threads) {
  require(!g.boundary().empty(), ErrorCode::empty_boundary, "cluster count needs a boundary");
  require(p >= 0.0 && p <= 1.0, ErrorCode::parameter_out_of_range, "p must lie in [0, 1]");
  require(replicas >= 1, ErrorCode::parameter_out_of_range, "replicas must be >= 1");
  ClusterCounts out;
  out.counts.assign(replicas, 0);
  parallel_for(replicas, threads, [&](unsigned, std::size_t r) {
    const std::vector<std::uint8_t> open = site_configuration(g.num_vertices(), p, seed, r);
    UnionFind uf = open_clusters(g, open);
    std::vector<VertexId> roots;
    for (VertexId b : g.boundary())
      if (open[b] && uf.size_of(b) >= s_min) roots.push_back(uf.find(b));
    std::sort(roots.begin(), roots.end());
    out.counts[r] = static_cast<std::size_t>(std::unique(roots.begin(), roots.end()) - roots.begin());
  });
  double sum = 0;
  for (std::size_t c : out.counts) {
    ++out.histogram[c];
    sum += static_cast<double>(c);
  }
  out.mean = sum / static_cast<double>(replicas);
  return out;
}

}  // namespace bslab
