#include "bslab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bslab/error.hpp"

namespace bslab {

Interval wilson_interval(double successes, double n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double phat = std::clamp(successes / n, 0.0, 1.0);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::parameter_out_of_range,
          "linear_fit needs at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = mean(x), my = mean(y);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0, ErrorCode::parameter_out_of_range, "linear_fit needs distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += r * r;
  }
  // Relative tolerance: exact inputs leave rounding-level residuals.
  fit.r2_defined = syy > 1e-24 * std::max(1.0, my * my) * n;
  fit.r2 = fit.r2_defined ? std::max(0.0, 1.0 - rss / syy) : 0.0;
  fit.slope_se = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  return fit;
}

namespace {

// Best (limit, amplitude) for a fixed rate, and the residual sum of squares.
double basis(ApproachModel model, double rate, double x) {
  return model == ApproachModel::exponential ? std::exp(-rate * x) : std::pow(x, -rate);
}

ApproachFit solve_for_rate(ApproachModel model, std::span<const double> x, std::span<const double> y, double rate) {
  // Scaled by the first basis value to keep the exponential columns O(1).
  const double scale = basis(model, rate, x.front());
  std::vector<double> e(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) e[i] = basis(model, rate, x[i]) / scale;
  const double n = static_cast<double>(x.size());
  const double me = mean(e), my = mean(y);
  double see = 0, sey = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    see += (e[i] - me) * (e[i] - me);
    sey += (e[i] - me) * (y[i] - my);
  }
  ApproachFit f;
  f.rate = rate;
  if (see <= 1e-300 * n) {
    f.limit = my;
    f.amplitude = 0;
  } else {
    const double a = sey / see;
    f.limit = my - a * me;
    f.amplitude = a / scale;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.limit + f.amplitude * basis(model, rate, x[i]));
    f.rss += r * r;
  }
  return f;
}

}  // namespace

ApproachFit fit_approach(ApproachModel model, std::span<const double> x, std::span<const double> y, double lo,
                         double hi, double rate_min, double rate_max) {
  require(x.size() == y.size() && x.size() >= 3, ErrorCode::parameter_out_of_range,
          "approach fit needs at least three points");
  if (model == ApproachModel::power)
    for (double v : x) require(v > 0, ErrorCode::parameter_out_of_range, "power-law fit needs positive sizes");
  const int grid = 200;
  const double log_min = std::log(rate_min), log_max = std::log(rate_max);
  int best = 0;
  double best_rss = INFINITY;
  for (int i = 0; i <= grid; ++i) {
    double rate = std::exp(log_min + (log_max - log_min) * i / grid);
    double rss = solve_for_rate(model, x, y, rate).rss;
    if (rss < best_rss) {
      best_rss = rss;
      best = i;
    }
  }
  auto at = [&](double t) { return solve_for_rate(model, x, y, std::exp(t)).rss; };
  double a = log_min + (log_max - log_min) * std::max(0, best - 1) / grid;
  double b = log_min + (log_max - log_min) * std::min(grid, best + 1) / grid;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    if (at(c) < at(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - phi * (b - a);
    d = a + phi * (b - a);
  }
  ApproachFit fit = solve_for_rate(model, x, y, std::exp((a + b) / 2));
  const bool on_bound = best == 0 || best == grid;
  fit.well_conditioned = !on_bound && std::isfinite(fit.limit) && fit.limit >= lo && fit.limit <= hi;
  return fit;
}

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), ErrorCode::parameter_out_of_range, "quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= values.size()) return values.back();
  return values[i] * (1 - frac) + values[i + 1] * frac;
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace bslab
