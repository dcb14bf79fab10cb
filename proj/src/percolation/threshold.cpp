#include <algorithm>
#include <cmath>

#include "bslab/error.hpp"
#include "bslab/generators.hpp"
#include "bslab/percolation.hpp"
#include "bslab/rng.hpp"

namespace bslab {

namespace {

std::vector<std::uint64_t>& pick(SweepTotals& t, Observable o) {
  switch (o) {
    case Observable::largest: return t.largest;
    case Observable::root_boundary: return t.root_boundary;
    case Observable::boundary_mass: return t.boundary_mass;
  }
  return t.largest;
}

struct SizeData {
  std::size_t n_sites = 0;
  std::vector<std::vector<std::uint64_t>> batch_sums;
  std::vector<std::size_t> batch_replicas;
};

std::optional<double> crossing_from(const SizeData& s, std::span<const std::size_t> batches, double level) {
  std::vector<std::uint64_t> sum(s.n_sites + 1, 0);
  std::size_t reps = 0;
  for (std::size_t b : batches) {
    for (std::size_t k = 0; k <= s.n_sites; ++k) sum[k] += s.batch_sums[b][k];
    reps += s.batch_replicas[b];
  }
  std::vector<double> micro(s.n_sites + 1);
  for (std::size_t k = 0; k <= s.n_sites; ++k) micro[k] = static_cast<double>(sum[k]) / static_cast<double>(reps);
  return crossing_point(micro, level);
}

// Extrapolated value, falling back to the largest-size crossing when the
// fit is ill-conditioned or lands far outside the observed drift.
double extrapolate(std::span<const double> x, std::span<const double> y, const PcOptions& o, ApproachFit* fit_out,
                   bool* fallback) {
  ApproachFit fit = fit_approach(o.model, x, y, 0.0, 1.0, o.rate_min, o.rate_max);
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double drift = *hi - *lo;
  const bool wild = std::abs(fit.limit - y.back()) > 3.0 * drift + 1e-12;
  const bool fb = !fit.well_conditioned || wild;
  if (fit_out) *fit_out = fit;
  if (fallback) *fallback = fb;
  return fb ? y.back() : fit.limit;
}

}  // namespace

PcEstimate estimate_pc(const FamilySpec& family, std::span<const int> sizes, std::size_t replicas,
                       std::uint64_t seed, const PcOptions& options) {
  require(sizes.size() >= 3, ErrorCode::parameter_out_of_range, "estimate_pc needs at least three sizes");
  require(replicas >= 1, ErrorCode::parameter_out_of_range, "replicas must be >= 1");
  require(options.level > 0, ErrorCode::parameter_out_of_range, "crossing level must be positive");
  const std::size_t n_batches = std::clamp<std::size_t>(options.batches, 1, replicas);

  PcEstimate est;
  est.observable = options.observable;
  est.level = options.level;
  est.replicas = replicas;
  est.seed = seed;

  std::vector<SizeData> data;
  for (int size : sizes) {
    const FiniteGraph g = build_family(family.with_size(size));
    require(!g.boundary().empty(), ErrorCode::empty_boundary, "crossing observables need a boundary");
    const std::uint64_t size_seed = derive_seed(seed, "estimate_pc", static_cast<std::uint64_t>(size));
    SizeData sd;
    sd.n_sites = g.num_vertices();
    for (std::size_t b = 0; b < n_batches; ++b) {
      const std::size_t first = replicas * b / n_batches, last = replicas * (b + 1) / n_batches;
      SweepOptions so;
      so.threads = options.threads;
      so.first_replica = first;
      SweepTotals t = nz_sweep_totals(g, size_seed, last - first, so);
      sd.batch_sums.push_back(std::move(pick(t, options.observable)));
      sd.batch_replicas.push_back(last - first);
    }
    std::vector<std::size_t> all(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) all[b] = b;
    PcSize ps;
    ps.size = size;
    ps.n_sites = sd.n_sites;
    if (auto c = crossing_from(sd, all, options.level)) {
      ps.p_hat = *c;
      ps.crossed = true;
    }
    est.sizes.push_back(ps);
    data.push_back(std::move(sd));
  }

  std::vector<double> x, y;
  for (const PcSize& s : est.sizes) {
    x.push_back(s.size);
    y.push_back(s.p_hat);
  }
  est.extrapolated = extrapolate(x, y, options, &est.fit, &est.fallback);

  if (options.bootstrap > 0) {
    std::vector<std::vector<double>> per_size(sizes.size());
    std::vector<double> limits;
    std::vector<std::size_t> chosen(n_batches);
    for (std::size_t i = 0; i < options.bootstrap; ++i) {
      Rng rng = make_rng(seed, "pc_bootstrap", i);
      std::vector<double> yb(sizes.size());
      for (std::size_t s = 0; s < sizes.size(); ++s) {
        std::uniform_int_distribution<std::size_t> draw(0, n_batches - 1);
        for (auto& c : chosen) c = draw(rng);
        yb[s] = crossing_from(data[s], chosen, options.level).value_or(1.0);
        per_size[s].push_back(yb[s]);
      }
      // The interval follows the estimator selected on the full data.
      limits.push_back(est.fallback ? yb.back()
                                    : fit_approach(options.model, x, yb, 0.0, 1.0, options.rate_min,
                                                   options.rate_max).limit);
    }
    for (std::size_t s = 0; s < sizes.size(); ++s)
      est.sizes[s].ci = {quantile(per_size[s], 0.025), quantile(per_size[s], 0.975)};
    est.ci = {quantile(limits, 0.025), quantile(limits, 0.975)};
  } else {
    est.ci = {est.extrapolated, est.extrapolated};
    for (auto& s : est.sizes) s.ci = {s.p_hat, s.p_hat};
  }
  return est;
}

}  // namespace bslab
