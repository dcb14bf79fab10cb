#include <algorithm>
#include <cmath>

#include "bslab/error.hpp"
#include "bslab/percolation.hpp"

namespace bslab {

BinomialWindow binomial_weights(std::size_t n, double p) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::parameter_out_of_range, "p must lie in [0, 1]");
  if (p == 0.0) return {0, {1.0}};
  if (p == 1.0) return {n, {1.0}};

  const double log_odds = std::log(p) - std::log1p(-p);
  const auto mode = static_cast<std::size_t>(std::min<double>(static_cast<double>(n), std::floor((n + 1) * p)));
  constexpr double kCut = -50.0;

  // log w(k) - log w(mode), walking outward with the ratio
  // w(k+1) / w(k) = (n - k) / (k + 1) * p / (1 - p).
  std::vector<double> up{0.0};
  for (std::size_t k = mode; k < n; ++k) {
    double next = up.back() + std::log(static_cast<double>(n - k)) - std::log(static_cast<double>(k + 1)) + log_odds;
    if (next < kCut) break;
    up.push_back(next);
  }
  std::vector<double> down;
  double cur = 0.0;
  for (std::size_t k = mode; k > 0; --k) {
    cur += std::log(static_cast<double>(k)) - std::log(static_cast<double>(n - k + 1)) - log_odds;
    if (cur < kCut) break;
    down.push_back(cur);
  }
  BinomialWindow w;
  w.first = mode - down.size();
  w.weights.reserve(down.size() + up.size());
  for (auto it = down.rbegin(); it != down.rend(); ++it) w.weights.push_back(std::exp(*it));
  for (double l : up) w.weights.push_back(std::exp(l));
  double total = 0.0;
  for (double x : w.weights) total += x;
  for (double& x : w.weights) x /= total;
  return w;
}

double convolve(std::span<const double> micro, double p) {
  require(!micro.empty(), ErrorCode::parameter_out_of_range, "empty microcanonical curve");
  const BinomialWindow w = binomial_weights(micro.size() - 1, p);
  double sum = 0.0;
  for (std::size_t i = 0; i < w.weights.size(); ++i) sum += w.weights[i] * micro[w.first + i];
  return sum;
}

std::optional<double> crossing_point(std::span<const double> micro, double level, double tolerance) {
  if (convolve(micro, 1.0) < level) return std::nullopt;
  if (convolve(micro, 0.0) >= level) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (convolve(micro, mid) >= level) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

CanonicalCurve canonical_curve(const MicrocanonicalCurve& micro, std::span<const double> p_grid) {
  require(micro.largest.size() == micro.n_sites + 1, ErrorCode::parameter_out_of_range,
          "microcanonical curve has the wrong length");
  CanonicalCurve out;
  out.n_sites = micro.n_sites;
  out.replicas = micro.replicas;
  const double trials = micro.exact ? 0.0 : static_cast<double>(micro.replicas);
  for (double p : p_grid) {
    require(p >= 0.0 && p <= 1.0, ErrorCode::parameter_out_of_range, "p must lie in [0, 1]");
    const BinomialWindow w = binomial_weights(micro.n_sites, p);
    auto mix = [&](const std::vector<double>& q) {
      double s = 0.0;
      for (std::size_t i = 0; i < w.weights.size(); ++i) s += w.weights[i] * q[w.first + i];
      return s;
    };
    CanonicalPoint pt;
    pt.p = p;
    pt.largest = mix(micro.largest);
    pt.largest_fraction = pt.largest / static_cast<double>(micro.n_sites);
    pt.theta = mix(micro.root_boundary);
    pt.theta_ci = micro.exact ? Interval{pt.theta, pt.theta} : wilson_interval(pt.theta * trials, trials);
    pt.boundary_mass = mix(micro.boundary_mass);
    for (const auto& q : micro.pair_connected) {
      const double v = mix(q);
      pt.pair_connected.push_back(v);
      pt.pair_ci.push_back(micro.exact ? Interval{v, v} : wilson_interval(v * trials, trials));
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

CanonicalCurve estimate_theta(const FiniteGraph& g, std::span<const double> p_grid, std::size_t replicas,
                              std::uint64_t seed, unsigned threads) {
  require(!g.boundary().empty(), ErrorCode::empty_boundary, "root-boundary connection needs a boundary");
  SweepOptions options;
  options.threads = threads;
  return canonical_curve(nz_sweep(g, seed, replicas, options), p_grid);
}

}  // namespace bslab
