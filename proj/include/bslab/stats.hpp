#pragma once

#include <span>
#include <vector>

namespace bslab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion. `successes` may be
/// fractional (a mean times n); n == 0 gives [0, 1].
Interval wilson_interval(double successes, double n, double z = 1.96);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool r2_defined = false;  // false when y has zero variance
  double slope_se = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Least-squares fit of a finite-size approach y = limit + a * f(rate, x),
/// with f = exp(-rate * x) or x^-rate.
struct ApproachFit {
  double limit = 0.0;
  double amplitude = 0.0;
  double rate = 0.0;
  double rss = 0.0;
  bool well_conditioned = false;
};

enum class ApproachModel { exponential, power };

/// The rate is profiled over a log grid on [rate_min, rate_max] and refined
/// by golden-section search; for a fixed rate the model is linear. A fit
/// whose rate sits on a search bound, or whose limit leaves [lo, hi], is
/// flagged ill-conditioned.
ApproachFit fit_approach(ApproachModel model, std::span<const double> x, std::span<const double> y,
                         double lo = 0.0, double hi = 1.0, double rate_min = 1e-3, double rate_max = 5.0);

/// Linear-interpolated quantile of a sample (q in [0, 1]).
double quantile(std::vector<double> values, double q);

double mean(std::span<const double> values);

}  // namespace bslab
