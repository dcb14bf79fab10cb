#include "bslab/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>

#include "bslab/error.hpp"
#include "bslab/generators.hpp"
#include "bslab/parallel.hpp"
#include "bslab/rng.hpp"

namespace bslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum Kind : std::uint8_t { kRecovery = 0, kArrow = 1 };

struct Event {
  double time;
  VertexId v;
  Kind kind;
  std::uint64_t index;
  std::uint32_t generation;
  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (v != o.v) return v > o.v;
    return kind > o.kind;
  }
};

// Min-max process on the graphical representation. value[v] is the smallest
// lambda <= cutoff at which v is infected at the current time (infinity if
// none). A recovery mark resets it; an arrow v -> w with mark u lowers w to
// max(value[v], u).
class Engine {
 public:
  Engine(const FiniteGraph& g, double lambda_max, double cutoff, std::uint64_t seed)
      : g_(g),
        lambda_max_(lambda_max),
        cutoff_(cutoff),
        key_rec_(derive_seed(seed, "contact_recovery", 0)),
        key_arrow_(derive_seed(seed, "contact_arrow", 0)),
        key_target_(derive_seed(seed, "contact_target", 0)),
        key_mark_(derive_seed(seed, "contact_mark", 0)),
        value_(g.num_vertices(), kInf),
        rec_(g.num_vertices()),
        arr_(g.num_vertices()),
        generation_(g.num_vertices(), 0) {}

  struct Cursor {
    std::uint64_t index = 0;
    double time = -1.0;  // time of mark `index`; negative until first use
  };

  double recovery_time(VertexId v, std::uint64_t j) const { return -std::log(counter_uniform(key_rec_, v, j)); }

  // Moves a stream cursor to its first mark strictly after t.
  void advance(Cursor& c, VertexId v, double t, bool arrow) const {
    const double rate = arrow ? static_cast<double>(g_.degree(v)) * lambda_max_ : 1.0;
    if (rate <= 0) {
      c.time = kInf;
      return;
    }
    const std::uint64_t key = arrow ? key_arrow_ : key_rec_;
    if (c.time < 0) c.time = -std::log(counter_uniform(key, v, 0)) / rate;
    while (c.time <= t) {
      ++c.index;
      c.time += -std::log(counter_uniform(key, v, c.index)) / rate;
    }
  }

  /// First recovery mark of v at or after t.
  double next_recovery_at_or_after(VertexId v, double t) const {
    double time = recovery_time(v, 0);
    for (std::uint64_t j = 1; time < t; ++j) time += recovery_time(v, j);
    return time;
  }

  template <class OnChange>
  void run(std::span<const VertexId> init, double horizon, OnChange&& on_change) {
    for (VertexId v : init) {
      require(v < g_.num_vertices(), ErrorCode::invalid_vertex, "initial vertex out of range");
      if (value_[v] == 0.0) continue;
      set(v, 0.0, 0.0, on_change);
    }
    while (!queue_.empty()) {
      const Event e = queue_.top();
      queue_.pop();
      if (e.time > horizon) break;
      if (value_[e.v] == kInf || generation_[e.v] != e.generation) continue;
      if (e.kind == kRecovery) {
        const double old = value_[e.v];
        value_[e.v] = kInf;
        --active_;
        on_change(e.time, e.v, old, kInf);
        advance(rec_[e.v], e.v, e.time, false);
        continue;
      }
      const std::size_t deg = g_.degree(e.v);
      const auto k = static_cast<std::size_t>(counter_uniform(key_target_, e.v, e.index) * static_cast<double>(deg));
      const VertexId w = g_.neighbors(e.v)[std::min(k, deg - 1)];
      const double mark = counter_uniform(key_mark_, e.v, e.index) * lambda_max_;
      const double cand = std::max(value_[e.v], mark);
      if (cand <= cutoff_ && cand < value_[w]) set(w, cand, e.time, on_change);
      advance(arr_[e.v], e.v, e.time, true);
      if (arr_[e.v].time <= horizon) queue_.push({arr_[e.v].time, e.v, kArrow, arr_[e.v].index, e.generation});
    }
  }

  double value(VertexId v) const { return value_[v]; }
  std::size_t active() const { return active_; }

 private:
  template <class OnChange>
  void set(VertexId w, double val, double now, OnChange& on_change) {
    const double old = value_[w];
    value_[w] = val;
    on_change(now, w, old, val);
    if (old != kInf) return;
    ++active_;
    const std::uint32_t gen = ++generation_[w];
    advance(rec_[w], w, now, false);
    advance(arr_[w], w, now, true);
    queue_.push({rec_[w].time, w, kRecovery, rec_[w].index, gen});
    if (std::isfinite(arr_[w].time)) queue_.push({arr_[w].time, w, kArrow, arr_[w].index, gen});
  }

  const FiniteGraph& g_;
  double lambda_max_;
  double cutoff_;
  std::uint64_t key_rec_, key_arrow_, key_target_, key_mark_;
  std::vector<double> value_;
  std::vector<Cursor> rec_, arr_;
  std::vector<std::uint32_t> generation_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::size_t active_ = 0;
};

void check_inputs(double lambda, std::span<const VertexId> init, double horizon) {
  require(lambda >= 0 && std::isfinite(lambda), ErrorCode::parameter_out_of_range, "lambda must be >= 0");
  require(horizon > 0 && std::isfinite(horizon), ErrorCode::parameter_out_of_range, "horizon must be > 0");
  require(!init.empty(), ErrorCode::parameter_out_of_range, "initial infected set is empty");
}


}  // namespace

std::vector<double> recovery_marks(VertexId v, double horizon, std::uint64_t seed) {
  const std::uint64_t key = derive_seed(seed, "contact_recovery", 0);
  std::vector<double> marks;
  double t = -std::log(counter_uniform(key, v, 0));
  for (std::uint64_t j = 1; t <= horizon; ++j) {
    marks.push_back(t);
    t += -std::log(counter_uniform(key, v, j));
  }
  return marks;
}

ContactStats graphical_sim(const FiniteGraph& g, double lambda, std::span<const VertexId> init, double horizon,
                           std::uint64_t seed, const ContactOptions& options) {
  check_inputs(lambda, init, horizon);
  const double lambda_max = options.lambda_max > 0 ? options.lambda_max : lambda;
  require(lambda <= lambda_max, ErrorCode::parameter_out_of_range, "lambda exceeds lambda_max");
  const std::vector<int> dist = g.distances_from(g.root());

  ContactStats st;
  Engine engine(g, lambda_max, lambda, seed);
  double extinct_at = -1.0;
  engine.run(init, horizon, [&](double t, VertexId v, double old, double now) {
    const bool was = old != kInf, is = now != kInf;
    if (was == is) return;
    if (options.trace) options.trace->push_back({t, v, is});
    if (is) {
      st.max_distance = std::max(st.max_distance, dist[v]);
      if (g.is_boundary(v)) st.touched_boundary = true;
      if (v == g.root() && t > horizon / 2) ++st.root_reinfections;
    } else if (engine.active() == 0) {
      extinct_at = t;
    }
  });
  // The engine stops pushing events once nothing is infected, so the
  // recorded extinction time is final.
  if (extinct_at >= 0 && engine.active() == 0) {
    st.extinction_time = extinct_at;
  } else {
    st.extinction_time = horizon;
    st.censored = true;
    st.alive_at_horizon = true;
  }
  return st;
}

ContactThresholds contact_thresholds(const FiniteGraph& g, double horizon, double lambda_max, std::uint64_t seed) {
  require(lambda_max > 0 && std::isfinite(lambda_max), ErrorCode::parameter_out_of_range, "lambda_max must be > 0");
  require(horizon > 0 && std::isfinite(horizon), ErrorCode::parameter_out_of_range, "horizon must be > 0");
  ContactThresholds th{kInf, kInf, kInf, kInf};
  auto lowest = [&](const Engine& e) {
    double m = kInf;
    for (VertexId v = 0; v < g.num_vertices(); ++v) m = std::min(m, e.value(v));
    return m;
  };
  {
    std::vector<VertexId> all(g.num_vertices());
    for (VertexId v = 0; v < all.size(); ++v) all[v] = v;
    Engine engine(g, lambda_max, lambda_max, seed);
    engine.run(all, horizon, [](double, VertexId, double, double) {});
    th.weak = lowest(engine);
  }
  const VertexId root = g.root();
  Engine engine(g, lambda_max, lambda_max, seed);
  const double tau_star = engine.next_recovery_at_or_after(root, horizon / 2);
  double reinfect = kInf;
  const VertexId start[] = {root};
  engine.run(start, horizon, [&](double t, VertexId v, double, double now) {
    if (now == kInf) return;
    if (g.is_boundary(v)) th.touch = std::min(th.touch, now);
    if (v == root && t > tau_star) reinfect = std::min(reinfect, now);
  });
  th.alive_root = lowest(engine);
  th.strong = std::max(reinfect, th.alive_root);
  return th;
}

SurvivalCurve survival_curve(const FiniteGraph& g, std::span<const double> lambda_grid, double horizon,
                             std::size_t replicas, std::uint64_t seed, unsigned threads) {
  require(!lambda_grid.empty(), ErrorCode::parameter_out_of_range, "empty lambda grid");
  require(replicas >= 1, ErrorCode::parameter_out_of_range, "replicas must be >= 1");
  for (double l : lambda_grid)
    require(l >= 0 && std::isfinite(l), ErrorCode::parameter_out_of_range, "lambda must be >= 0");
  const double lambda_max = std::max(*std::max_element(lambda_grid.begin(), lambda_grid.end()), 1e-12);

  SurvivalCurve c;
  c.lambda.assign(lambda_grid.begin(), lambda_grid.end());
  c.horizon = horizon;
  c.replicas = replicas;
  c.seed = seed;
  c.thresholds.resize(replicas);
  parallel_for(replicas, threads, [&](unsigned, std::size_t r) {
    c.thresholds[r] = contact_thresholds(g, horizon, lambda_max, derive_seed(seed, "contact", r));
  });
  const double n = static_cast<double>(replicas);
  for (double l : c.lambda) {
    std::size_t weak = 0, alive_root = 0, strong = 0, touch = 0;
    for (const auto& th : c.thresholds) {
      weak += th.weak <= l;
      alive_root += th.alive_root <= l;
      strong += th.strong <= l;
      touch += th.touch <= l;
    }
    c.survival.push_back(weak / n);
    c.survival_ci.push_back(wilson_interval(static_cast<double>(weak), n));
    c.survival_root.push_back(alive_root / n);
    c.reinfect.push_back(strong / n);
    c.reinfect_ci.push_back(wilson_interval(static_cast<double>(strong), n));
    c.boundary_touch.push_back(touch / n);
  }
  return c;
}

namespace {

// Smallest lambda in [lo, hi] at which at least `level` of the thresholds
// are <= lambda.
std::optional<double> crossing(std::vector<double> th, double level, double lo, double hi) {
  std::sort(th.begin(), th.end());
  const auto need = static_cast<std::size_t>(std::ceil(level * static_cast<double>(th.size())));
  const double v = th[std::max<std::size_t>(need, 1) - 1];
  if (v > hi) return std::nullopt;
  return std::max(v, lo);
}

double extrapolate(std::span<const double> x, std::span<const double> y, double hi, ApproachFit* fit_out,
                   bool* fallback) {
  if (x.size() < 3) {
    if (fallback) *fallback = true;
    return y.back();
  }
  ApproachFit fit = fit_approach(ApproachModel::power, x, y, 0.0, hi, 0.25, 3.0);
  const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
  const bool fb = !fit.well_conditioned || std::abs(fit.limit - y.back()) > 3.0 * (*mx - *mn) + 1e-12;
  if (fit_out) *fit_out = fit;
  if (fallback) *fallback = fb;
  return fb ? y.back() : fit.limit;
}

struct SizeCurves {
  std::vector<int> sizes;
  std::vector<SurvivalCurve> curves;
};

SizeCurves run_sizes(const FamilySpec& family, std::span<const int> sizes, std::span<const double> lambda_grid,
                     std::size_t replicas, std::uint64_t seed, const LambdaOptions& options) {
  require(sizes.size() >= 2, ErrorCode::parameter_out_of_range, "need at least two sizes");
  require(!lambda_grid.empty(), ErrorCode::parameter_out_of_range, "empty lambda grid");
  require(options.horizon_per_size > 0, ErrorCode::parameter_out_of_range, "horizon_per_size must be > 0");
  SizeCurves out;
  for (int size : sizes) {
    const FiniteGraph g = build_family(family.with_size(size));
    out.sizes.push_back(size);
    out.curves.push_back(survival_curve(g, lambda_grid, options.horizon_per_size * size, replicas,
                                        derive_seed(seed, "estimate_lambda", static_cast<std::uint64_t>(size)),
                                        options.threads));
  }
  return out;
}

LambdaEstimate estimate_from(const SizeCurves& runs, std::span<const double> lambda_grid, std::uint64_t seed,
                             const LambdaOptions& options, bool strong) {
  const auto [gmin, gmax] = std::minmax_element(lambda_grid.begin(), lambda_grid.end());
  const std::size_t n_sizes = runs.sizes.size();
  LambdaEstimate est;
  est.proxy = strong ? "strong" : "weak";
  std::vector<std::vector<double>> th(n_sizes);
  for (std::size_t s = 0; s < n_sizes; ++s) {
    LambdaSize ls;
    ls.size = runs.sizes[s];
    ls.horizon = runs.curves[s].horizon;
    ls.curve = runs.curves[s];
    for (const auto& t : ls.curve.thresholds) th[s].push_back(strong ? t.strong : t.weak);
    if (auto c = crossing(th[s], options.level, *gmin, *gmax)) {
      ls.lambda_hat = *c;
      ls.crossed = true;
    } else {
      ls.lambda_hat = *gmax;
    }
    est.sizes.push_back(std::move(ls));
  }
  require(est.sizes.back().crossed, ErrorCode::non_crossing_curve,
          std::string(strong ? "root-reinfection" : "survival") + " curve of the largest size never reaches " +
              std::to_string(options.level) + " on the lambda grid");

  std::vector<double> x, y;
  for (const auto& s : est.sizes) {
    x.push_back(s.size);
    y.push_back(s.lambda_hat);
  }
  est.extrapolated = extrapolate(x, y, *gmax, &est.fit, &est.fallback);

  std::vector<std::vector<double>> per_size(n_sizes);
  std::vector<double> limits;
  for (std::size_t b = 0; b < options.bootstrap; ++b) {
    Rng rng = make_rng(seed, strong ? "lambda_s_bootstrap" : "lambda_c_bootstrap", b);
    std::vector<double> yb(n_sizes);
    for (std::size_t s = 0; s < n_sizes; ++s) {
      std::uniform_int_distribution<std::size_t> draw(0, th[s].size() - 1);
      std::vector<double> sample(th[s].size());
      for (auto& v : sample) v = th[s][draw(rng)];
      yb[s] = crossing(std::move(sample), options.level, *gmin, *gmax).value_or(*gmax);
      per_size[s].push_back(yb[s]);
    }
    // The interval follows the estimator selected on the full data.
    limits.push_back(est.fallback ? yb.back() : fit_approach(ApproachModel::power, x, yb, 0.0, *gmax, 0.25, 3.0).limit);
  }
  if (options.bootstrap > 0) {
    for (std::size_t s = 0; s < n_sizes; ++s)
      est.sizes[s].ci = {quantile(per_size[s], 0.025), quantile(per_size[s], 0.975)};
    est.ci = {quantile(limits, 0.025), quantile(limits, 0.975)};
  } else {
    est.ci = {est.extrapolated, est.extrapolated};
  }
  return est;
}

}  // namespace

LambdaPair estimate_lambdas(const FamilySpec& family, std::span<const int> sizes, std::span<const double> lambda_grid,
                            std::size_t replicas, std::uint64_t seed, const LambdaOptions& options) {
  const SizeCurves runs = run_sizes(family, sizes, lambda_grid, replicas, seed, options);
  return {estimate_from(runs, lambda_grid, seed, options, false), estimate_from(runs, lambda_grid, seed, options, true)};
}

LambdaEstimate estimate_lambda_c(const FamilySpec& family, std::span<const int> sizes,
                                 std::span<const double> lambda_grid, std::size_t replicas, std::uint64_t seed,
                                 const LambdaOptions& options) {
  return estimate_from(run_sizes(family, sizes, lambda_grid, replicas, seed, options), lambda_grid, seed, options,
                       false);
}

LambdaEstimate estimate_lambda_s(const FamilySpec& family, std::span<const int> sizes,
                                 std::span<const double> lambda_grid, std::size_t replicas, std::uint64_t seed,
                                 const LambdaOptions& options) {
  return estimate_from(run_sizes(family, sizes, lambda_grid, replicas, seed, options), lambda_grid, seed, options,
                       true);
}

}  // namespace bslab
