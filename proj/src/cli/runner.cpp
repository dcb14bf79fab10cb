#include "bslab/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "bslab/contact.hpp"
#include "bslab/error.hpp"
#include "bslab/export.hpp"
#include "bslab/generators.hpp"
#include "bslab/limits.hpp"
#include "bslab/percolation.hpp"
#include "bslab/rng.hpp"
#include "bslab/walk.hpp"

namespace bslab {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::config_invalid, "field '" + key + "': " + what);
}

// Every key parsed and range-checked before any computation starts.
struct Settings {
  std::string experiment;
  FamilySpec family;
  std::vector<int> sizes;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  std::size_t replicas = 0;
  std::vector<double> p_grid;
  std::vector<double> lambda_grid;
  int radius = 0;
  std::size_t samples = 0;
  std::string reference;
  int reference_cutoff = 0;
  int reference_size = 0;
  double cauchy_threshold = 0.0;
  Observable observable = Observable::boundary_mass;
  double level = 0.5;
  std::size_t batches = 0;
  std::size_t bootstrap = 0;
  int size = 0;
  int d_max = 0;
  bool d_max_set = false;
  int buffer = 0;
  std::size_t pairs_per_distance = 0;
  double p = 0.0;
  std::size_t s_min = 0;
  int fit_lo = 0;
  int fit_hi = 0;
  double horizon = 0.0;
  double horizon_per_size = 0.0;
  std::string walk_method;
  double floor = 0.0;
  std::size_t trend_window = 0;
  std::string kind;
  std::string pair;
  std::vector<int> g_sizes;
  std::vector<int> h_sizes;
  int pu_size = 0;
};

void check(bool ok, const std::string& key, const std::string& what) {
  if (!ok) invalid(key, what);
}

void check_one_of(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (value == a) return;
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : " | ") + std::string(a);
  invalid(key, "'" + value + "' is not one of " + list);
}

std::size_t count_key(const ExperimentConfig& cfg, const std::string& key, long long min) {
  const int v = cfg.get_int(key);
  check(v >= min, key, "must be >= " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

Settings resolve(const ExperimentConfig& cfg) {
  Settings s;
  s.experiment = cfg.get("experiment");
  check_one_of("experiment", s.experiment,
               {"generate", "bslimit", "theta", "pc", "pu", "tau", "clusters", "contact", "walk", "question"});
  s.family = cfg.family();
  s.sizes = cfg.get_int_list("sizes");
  for (int v : s.sizes) check(v >= 0, "sizes", "sizes must be >= 0");
  s.seed = cfg.get_u64("seed");
  s.threads = static_cast<unsigned>(count_key(cfg, "threads", 1));
  s.out = cfg.get("out");
  check(!s.out.empty(), "out", "empty output directory");
  s.replicas = count_key(cfg, "replicas", 1);
  s.p_grid = cfg.get_grid("p_grid");
  for (double p : s.p_grid) check(p >= 0.0 && p <= 1.0, "p_grid", "values must lie in [0, 1]");
  s.lambda_grid = cfg.get_grid("lambda_grid");
  for (double l : s.lambda_grid) check(l >= 0.0, "lambda_grid", "values must be >= 0");
  s.radius = static_cast<int>(count_key(cfg, "radius", 0));
  s.samples = count_key(cfg, "samples", 0);
  s.reference = cfg.get("reference");
  check_one_of("reference", s.reference, {"none", "canopy", "horocyclic"});
  s.reference_cutoff = static_cast<int>(count_key(cfg, "reference_cutoff", 0));
  s.reference_size = static_cast<int>(count_key(cfg, "reference_size", 1));
  s.cauchy_threshold = cfg.get_double("cauchy_threshold");
  check(s.cauchy_threshold >= 0.0, "cauchy_threshold", "must be >= 0");
  try {
    s.observable = parse_observable(cfg.get("observable"));
  } catch (const Error&) {
    invalid("observable", "unknown observable '" + cfg.get("observable") + "'");
  }
  s.level = cfg.get_double("level");
  check(s.level > 0.0, "level", "must be > 0");
  s.batches = count_key(cfg, "batches", 2);
  s.bootstrap = count_key(cfg, "bootstrap", 0);
  s.size = static_cast<int>(count_key(cfg, "size", 0));
  s.d_max = static_cast<int>(count_key(cfg, "d_max", 0));
  s.d_max_set = !cfg.is_default("d_max");
  s.buffer = static_cast<int>(count_key(cfg, "buffer", 0));
  s.pairs_per_distance = count_key(cfg, "pairs_per_distance", 1);
  s.p = cfg.get_double("p");
  check(s.p >= 0.0 && s.p <= 1.0, "p", "must lie in [0, 1]");
  s.s_min = count_key(cfg, "s_min", 1);
  s.fit_lo = static_cast<int>(count_key(cfg, "fit_lo", 0));
  s.fit_hi = cfg.get_int("fit_hi");
  check(s.fit_hi >= -1, "fit_hi", "must be >= -1");
  s.horizon = cfg.get_double("horizon");
  check(s.horizon >= 0.0, "horizon", "must be >= 0");
  s.horizon_per_size = cfg.get_double("horizon_per_size");
  check(s.horizon_per_size > 0.0, "horizon_per_size", "must be > 0");
  s.walk_method = cfg.get("walk_method");
  check_one_of("walk_method", s.walk_method, {"exact", "mc", "profile"});
  s.floor = cfg.get_double("floor");
  check(s.floor >= 0.0 && s.floor <= 1.0, "floor", "must lie in [0, 1]");
  s.trend_window = count_key(cfg, "trend_window", 2);
  s.kind = cfg.get("kind");
  check_one_of("kind", s.kind, {"q1", "q2"});
  s.pair = cfg.get("pair");
  s.g_sizes = cfg.get_int_list("g_sizes");
  s.h_sizes = cfg.get_int_list("h_sizes");
  s.pu_size = static_cast<int>(count_key(cfg, "pu_size", 0));

  // Requirements of the selected experiment.
  const std::string& e = s.experiment;
  if (e == "pc") check(s.sizes.size() >= 3, "sizes", "pc needs at least three sizes");
  if (e == "walk" && s.walk_method == "profile")
    check(s.sizes.size() >= 3, "sizes", "a transience profile needs at least three sizes");
  if (e == "pu") check(s.d_max >= 6, "d_max", "pu needs d_max >= 6");
  if (e == "contact" && !s.sizes.empty()) check(s.sizes.size() >= 2, "sizes", "contact estimates need two sizes");
  return s;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Collects CSV text; the first row is the seed / config-digest comment.
class Csv {
 public:
  Csv(const Settings& s, const std::string& digest, std::vector<std::string> header) {
    text_ = "# seed=" + std::to_string(s.seed) + ",config_digest=" + digest + ",experiment=" + s.experiment + "\n";
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
  }

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

class Outputs {
 public:
  explicit Outputs(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    require(!ec, ErrorCode::io_failure, "cannot create " + dir_ + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& text) {
    write_text_file((fs::path(dir_) / name).string(), text);
    files_.push_back({name, content_digest(text), text.size()});
  }

  const std::string& dir() const { return dir_; }
  const std::vector<OutputFile>& files() const { return files_; }

 private:
  std::string dir_;
  std::vector<OutputFile> files_;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<int> sizes_or_own(const Settings& s) {
  return s.sizes.empty() ? std::vector<int>{s.family.size()} : s.sizes;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

// ---------------------------------------------------------------- experiments

void run_generate(const Settings& s, const std::string&, Outputs& out) {
  out.write("graph.json", graph_to_json(build_family(s.family)));
}

NeighborhoodDist reference_distribution(const Settings& s) {
  if (s.reference == "canopy")
    return canopy_reference_distribution(s.family.d, s.radius,
                                         s.reference_cutoff ? s.reference_cutoff : canopy_min_cutoff(s.family.d));
  const FiniteGraph ref = horocyclic_canopy_product(s.family.m, s.family.n, s.reference_size);
  return neighborhood_distribution(ref, s.radius, SampleMode::all(), s.threads);
}

void run_bslimit(const Settings& s, const std::string& digest, Outputs& out) {
  std::optional<NeighborhoodDist> ref;
  if (s.reference != "none") {
    ref = reference_distribution(s);
    out.write("reference.json", distribution_to_json(*ref));
  }
  std::vector<NeighborhoodDist> seq;
  std::vector<int> sizes = sizes_or_own(s);
  std::vector<std::size_t> n_vertices;
  for (int size : sizes) {
    const FiniteGraph g = build_family(s.family.with_size(size));
    n_vertices.push_back(g.num_vertices());
    const SampleMode mode = s.samples == 0
                                ? SampleMode::all()
                                : SampleMode::sampled(s.samples, derive_seed(s.seed, "bslimit", size));
    seq.push_back(neighborhood_distribution(g, s.radius, mode, s.threads));
    out.write("dist_" + std::to_string(size) + ".json", distribution_to_json(seq.back()));
  }
  const CauchyReport cauchy = cauchy_report(seq, s.cauchy_threshold);
  Csv csv(s, digest, {"size", "n_vertices", "radius", "n_types", "provenance", "tv_reference", "step_tv", "flagged"});
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    csv.row({std::to_string(sizes[i]), std::to_string(n_vertices[i]), std::to_string(s.radius),
             std::to_string(seq[i].probability.size()), seq[i].exact ? "exact" : "sampled",
             ref ? fmt(tv_distance(seq[i], *ref)) : "", i ? fmt(cauchy.step_tv[i - 1]) : "",
             i ? bool_str(cauchy.flagged[i - 1]) : ""});
  }
  out.write("bslimit.csv", csv.text());
}

void run_theta(const Settings& s, const std::string& digest, Outputs& out) {
  const FiniteGraph g = build_family(s.family);
  const CanonicalCurve c = estimate_theta(g, s.p_grid, s.replicas, s.seed, s.threads);
  Csv csv(s, digest, {"observable", "p", "estimate", "ci_lo", "ci_hi", "replicas", "seed"});
  for (const auto& pt : c.points)
    csv.row({"theta", fmt(pt.p), fmt(pt.theta), fmt(pt.theta_ci.lo), fmt(pt.theta_ci.hi), std::to_string(s.replicas),
             std::to_string(s.seed)});
  for (const auto& pt : c.points)
    csv.row({"largest_fraction", fmt(pt.p), fmt(pt.largest_fraction), "", "", std::to_string(s.replicas),
             std::to_string(s.seed)});
  for (const auto& pt : c.points)
    csv.row({"boundary_mass", fmt(pt.p), fmt(pt.boundary_mass), "", "", std::to_string(s.replicas),
             std::to_string(s.seed)});
  out.write("theta.csv", csv.text());
}

PcOptions pc_options(const Settings& s) {
  PcOptions o;
  o.observable = s.observable;
  o.level = s.level;
  o.batches = s.batches;
  o.bootstrap = s.bootstrap;
  o.threads = s.threads;
  return o;
}

void write_pc(const Settings& s, const std::string& digest, Outputs& out, const PcEstimate& e,
              const std::string& prefix) {
  Csv csv(s, digest, {"size", "n_sites", "p_hat", "ci_lo", "ci_hi", "crossed"});
  for (const auto& z : e.sizes)
    csv.row({std::to_string(z.size), std::to_string(z.n_sites), fmt(z.p_hat), fmt(z.ci.lo), fmt(z.ci.hi),
             bool_str(z.crossed)});
  out.write(prefix + ".csv", csv.text());
  Csv fit(s, digest,
          {"observable", "level", "extrapolated", "ci_lo", "ci_hi", "fallback", "fit_limit", "fit_amplitude",
           "fit_rate", "fit_rss", "replicas", "seed"});
  fit.row({observable_name(e.observable), fmt(e.level), fmt(e.extrapolated), fmt(e.ci.lo), fmt(e.ci.hi),
           bool_str(e.fallback), fmt(e.fit.limit), fmt(e.fit.amplitude), fmt(e.fit.rate), fmt(e.fit.rss),
           std::to_string(e.replicas), std::to_string(e.seed)});
  out.write(prefix + "_fit.csv", fit.text());
}

void run_pc(const Settings& s, const std::string& digest, Outputs& out) {
  write_pc(s, digest, out, estimate_pc(s.family, s.sizes, s.replicas, s.seed, pc_options(s)), "pc");
}

void tau_rows(Csv& csv, const TauProfile& t) {
  for (std::size_t i = 0; i < t.d.size(); ++i)
    csv.row({fmt(t.p), std::to_string(t.d[i]), fmt(t.tau[i]), fmt(t.ci[i].lo), fmt(t.ci[i].hi),
             std::to_string(t.n_pairs[i])});
}

PuOptions pu_options(const Settings& s) {
  PuOptions o;
  o.pairs_per_distance = s.pairs_per_distance;
  o.buffer = s.buffer;
  o.bootstrap = s.bootstrap;
  o.threads = s.threads;
  return o;
}

void write_pu(const Settings& s, const std::string& digest, Outputs& out, const PuEstimate& e,
              const std::string& prefix) {
  Csv rows(s, digest, {"p", "decay", "vanished", "slope", "slope_ci_lo", "slope_ci_hi", "r2", "points"});
  Csv tau(s, digest, {"p", "d", "tau", "ci_lo", "ci_hi", "n_pairs"});
  for (const auto& r : e.rows) {
    rows.row({fmt(r.p), bool_str(r.decay), bool_str(r.vanished), r.vanished ? "" : fmt(r.fit.slope),
              r.vanished ? "" : fmt(r.fit.slope_ci.lo), r.vanished ? "" : fmt(r.fit.slope_ci.hi),
              r.vanished || !r.fit.r2_defined ? "" : fmt(r.fit.r2), std::to_string(r.fit.points)});
    tau_rows(tau, r.profile);
  }
  out.write(prefix + ".csv", rows.text());
  out.write(prefix + "_tau.csv", tau.text());
  Csv sum(s, digest, {"size", "d_max", "p_u", "found", "replicas", "seed", "label"});
  sum.row({std::to_string(e.size), std::to_string(e.d_max), fmt(e.p_u), bool_str(e.found),
           std::to_string(e.replicas), std::to_string(e.seed), "heuristic finite-volume estimate"});
  out.write(prefix + "_summary.csv", sum.text());
}

void run_pu(const Settings& s, const std::string& digest, Outputs& out) {
  const int size = s.size ? s.size : s.family.size();
  write_pu(s, digest, out, estimate_pu(s.family, size, s.p_grid, s.d_max, s.replicas, s.seed, pu_options(s)), "pu");
}

void run_tau(const Settings& s, const std::string& digest, Outputs& out) {
  const FiniteGraph g = build_family(s.family);
  const TauProfile t = connection_profile(g, s.p, s.d_max, s.buffer ? s.buffer : s.d_max, s.pairs_per_distance,
                                          s.replicas, s.seed, s.threads);
  Csv csv(s, digest, {"p", "d", "tau", "ci_lo", "ci_hi", "n_pairs"});
  tau_rows(csv, t);
  out.write("tau.csv", csv.text());
  Csv fit(s, digest, {"status", "d_lo", "d_hi", "slope", "slope_ci_lo", "slope_ci_hi", "intercept", "r2", "points"});
  const int hi = s.fit_hi < 0 ? s.d_max : s.fit_hi;
  try {
    const DecayFit f = decay_rate_fit(t, s.fit_lo, hi, s.bootstrap);
    fit.row({"ok", std::to_string(s.fit_lo), std::to_string(hi), fmt(f.slope), fmt(f.slope_ci.lo),
             fmt(f.slope_ci.hi), fmt(f.intercept), f.r2_defined ? fmt(f.r2) : "", std::to_string(f.points)});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::all_zero_profile) throw;
    fit.row({"all_zero_profile", std::to_string(s.fit_lo), std::to_string(hi), "", "", "", "", "", ""});
  }
  out.write("tau_fit.csv", fit.text());
}

void run_clusters(const Settings& s, const std::string& digest, Outputs& out) {
  const FiniteGraph g = build_family(s.family);
  const ClusterCounts c = boundary_cluster_count(g, s.p, s.s_min, s.replicas, s.seed, s.threads);
  Csv csv(s, digest, {"count", "frequency", "fraction"});
  for (const auto& [count, freq] : c.histogram)
    csv.row({std::to_string(count), std::to_string(freq),
             fmt(static_cast<double>(freq) / static_cast<double>(s.replicas))});
  out.write("clusters.csv", csv.text());
  Csv sum(s, digest, {"p", "s_min", "mean", "replicas", "seed"});
  sum.row({fmt(s.p), std::to_string(s.s_min), fmt(c.mean), std::to_string(s.replicas), std::to_string(s.seed)});
  out.write("clusters_summary.csv", sum.text());
}

void survival_rows(Csv& csv, const SurvivalCurve& c, int size) {
  for (std::size_t i = 0; i < c.lambda.size(); ++i)
    csv.row({fmt(c.lambda[i]), fmt(c.horizon), std::to_string(size), fmt(c.survival[i]), fmt(c.survival_ci[i].lo),
             fmt(c.survival_ci[i].hi), fmt(c.reinfect[i]), fmt(c.reinfect_ci[i].lo), fmt(c.reinfect_ci[i].hi),
             fmt(c.boundary_touch[i]), std::to_string(c.replicas), std::to_string(c.seed)});
}

const std::vector<std::string> kSurvivalHeader = {
    "lambda",  "T",           "size",  "survival_hat",           "survival_ci_lo", "survival_ci_hi",
    "reinfect_hat", "reinfect_ci_lo", "reinfect_ci_hi", "boundary_touch_fraction", "replicas", "seed"};

void lambda_rows(Csv& csv, const LambdaEstimate& e, const std::string& family) {
  for (const auto& z : e.sizes)
    csv.row({family, e.proxy, std::to_string(z.size), fmt(z.horizon), fmt(z.lambda_hat), fmt(z.ci.lo), fmt(z.ci.hi),
             bool_str(z.crossed), "", e.label});
  csv.row({family, e.proxy, "extrapolated", "", fmt(e.extrapolated), fmt(e.ci.lo), fmt(e.ci.hi), "",
           bool_str(e.fallback), e.label});
}

const std::vector<std::string> kLambdaHeader = {"family", "proxy", "size",     "T",        "lambda_hat",
                                                "ci_lo",  "ci_hi", "crossed", "fallback", "label"};

LambdaOptions lambda_options(const Settings& s) {
  LambdaOptions o;
  o.level = s.level;
  o.horizon_per_size = s.horizon_per_size;
  o.bootstrap = s.bootstrap;
  o.threads = s.threads;
  return o;
}

void run_contact(const Settings& s, const std::string& digest, Outputs& out) {
  Csv curves(s, digest, kSurvivalHeader);
  if (s.sizes.empty()) {
    const FiniteGraph g = build_family(s.family);
    const double T = s.horizon > 0 ? s.horizon : s.horizon_per_size * s.family.size();
    require(T > 0, ErrorCode::config_invalid, "field 'horizon': the family size is 0, set horizon explicitly");
    survival_rows(curves, survival_curve(g, s.lambda_grid, T, s.replicas, s.seed, s.threads), s.family.size());
    out.write("survival.csv", curves.text());
    return;
  }
  const LambdaPair est = estimate_lambdas(s.family, s.sizes, s.lambda_grid, s.replicas, s.seed, lambda_options(s));
  for (const auto& z : est.weak.sizes) survival_rows(curves, z.curve, z.size);
  out.write("survival.csv", curves.text());
  Csv lam(s, digest, kLambdaHeader);
  lambda_rows(lam, est.weak, family_name(s.family.family));
  lambda_rows(lam, est.strong, family_name(s.family.family));
  out.write("lambda.csv", lam.text());
}

void run_walk(const Settings& s, const std::string& digest, Outputs& out) {
  Csv csv(s, digest, {"family", "size", "method", "escape", "ci_lo", "ci_hi", "verdict"});
  const std::string fam = s.family.describe();
  if (s.walk_method == "profile") {
    TransienceOptions o;
    o.floor = s.floor;
    o.trend_window = s.trend_window;
    const TransienceProfile t = transience_profile(s.family, s.sizes, o);
    for (std::size_t i = 0; i < t.sizes.size(); ++i)
      csv.row({family_name(s.family.family), std::to_string(t.sizes[i]), "exact", fmt(t.results[i].escape),
               fmt(t.results[i].ci.lo), fmt(t.results[i].ci.hi), t.verdict});
    out.write("walk.csv", csv.text());
    Csv sum(s, digest, {"final", "limit", "fallback", "decreasing", "floor", "trend_window", "verdict", "label"});
    sum.row({fmt(t.final_value), fmt(t.limit), bool_str(t.fallback), bool_str(t.decreasing), fmt(t.floor),
             std::to_string(t.trend_window), t.verdict, t.label});
    out.write("walk_summary.csv", sum.text());
    return;
  }
  const FiniteGraph g = build_family(s.family);
  const EscapeResult r = s.walk_method == "exact" ? escape_probability_exact(g)
                                                  : escape_probability_mc(g, s.replicas, s.seed, s.threads);
  csv.row({family_name(s.family.family), std::to_string(s.family.size()), s.walk_method == "exact" ? "exact" : "mc",
           fmt(r.escape), fmt(r.ci.lo), fmt(r.ci.hi), ""});
  out.write("walk.csv", csv.text());
}

// ------------------------------------------------------------------ questions

struct PairSpec {
  std::string g_name, h_name;
  FamilySpec g, h;
  std::vector<int> h_sizes_q1;
  int pu_size = 0;
  int d_max = 0;
  int buffer = 0;
  std::vector<int> g_sizes_q2, h_sizes_q2;
};

FamilySpec make(Family f) {
  FamilySpec s;
  s.family = f;
  return s;
}

PairSpec catalog(const std::string& name) {
  PairSpec p;
  if (name == "t3_canopy") {
    p.g_name = "T_3";
    p.h_name = "canopy(3)";
    p.g = make(Family::tree_ball);
    p.h = make(Family::canopy);
    p.h_sizes_q1 = {4, 5, 6, 7, 8, 9, 10};
    p.pu_size = 14;
    p.d_max = 8;
    p.g_sizes_q2 = {6, 8, 10};
    p.h_sizes_q2 = {6, 8, 10};
  } else if (name == "z2_z2") {
    p.g_name = p.h_name = "Z^2";
    p.g = p.h = make(Family::grid_box);
    p.g.dims = p.h.dims = {0, 0};
    p.h_sizes_q1 = {16, 32, 64, 128};
    p.pu_size = 256;
    p.d_max = 32;
    p.g_sizes_q2 = p.h_sizes_q2 = {8, 12, 16};
  } else if (name == "t3z_canopyz") {
    p.g_name = "T_3 x Z";
    p.h_name = "canopy(3) x Z";
    p.g = make(Family::product);
    p.g.L = 40;
    p.h = make(Family::product);
    p.h.base = Family::canopy;
    p.h_sizes_q1 = {4, 5, 6, 7, 8};
    p.pu_size = 10;
    p.d_max = 8;
    p.g_sizes_q2 = {3, 4, 5};
    p.h_sizes_q2 = {3, 4, 5};
  } else if (name == "dl_horocyclic") {
    p.g_name = "DL(3,2)";
    p.h_name = "horocyclic canopy product (3,2)";
    p.g = make(Family::dl_ball);
    p.h = make(Family::horocyclic_canopy);
    p.g.m = p.h.m = 3;
    p.g.n = p.h.n = 2;
    p.h_sizes_q1 = {2, 3, 4};
    p.pu_size = 5;
    p.d_max = 6;
    p.buffer = 2;  // every vertex lies within L of the band frontier
    p.g_sizes_q2 = p.h_sizes_q2 = {1, 2, 3};
  } else if (name == "z2edge_ball") {
    // The limit of these balls has no closed form; the ball family itself,
    // viewed from its own roots, serves as the empirical H reference.
    p.g_name = "Z^2 * Z/2 balls";
    p.h_name = "ball-limit empirical reference";
    p.g = p.h = make(Family::free_product_z2_edge);
    p.h_sizes_q1 = {3, 4, 5, 6};
    p.pu_size = 10;
    p.d_max = 6;
    p.g_sizes_q2 = p.h_sizes_q2 = {2, 3, 4};
  } else {
    throw Error(ErrorCode::unknown_pair, "no catalog pair named '" + name + "'");
  }
  return p;
}

const std::vector<std::string> kQuestionHeader = {"pair",  "quantity", "family", "size",
                                                  "estimate", "ci_lo", "ci_hi",  "note"};

void question_q1(const Settings& s, const std::string& digest, const PairSpec& pair, Outputs& out) {
  const std::vector<int> h_sizes = s.h_sizes.empty() ? pair.h_sizes_q1 : s.h_sizes;
  const int pu_size = s.pu_size ? s.pu_size : pair.pu_size;
  const int d_max = s.d_max_set ? s.d_max : pair.d_max;
  PuOptions pu_opts = pu_options(s);
  if (s.buffer == 0) pu_opts.buffer = pair.buffer;
  require(h_sizes.size() >= 3, ErrorCode::config_invalid, "field 'h_sizes': p_c needs at least three sizes");

  Csv csv(s, digest, kQuestionHeader);
  const PcEstimate pc = estimate_pc(pair.h, h_sizes, s.replicas, derive_seed(s.seed, "question_pc", 0), pc_options(s));
  for (const auto& z : pc.sizes)
    csv.row({s.pair, "p_c(H)", pair.h_name, std::to_string(z.size), fmt(z.p_hat), fmt(z.ci.lo), fmt(z.ci.hi),
             z.crossed ? "" : "no crossing"});
  csv.row({s.pair, "p_c(H)", pair.h_name, "extrapolated", fmt(pc.extrapolated), fmt(pc.ci.lo), fmt(pc.ci.hi),
           pc.fallback ? "largest-size fallback" : "power-law extrapolation"});

  std::vector<double> grid = s.p_grid;
  std::sort(grid.begin(), grid.end());
  const PuEstimate pu =
      estimate_pu(pair.g, pu_size, grid, d_max, s.replicas, derive_seed(s.seed, "question_pu", 0), pu_opts);
  // The bracket is the grid step below p_u (or the top of the grid if none).
  double below = 0.0;
  for (const auto& r : pu.rows)
    if (r.p < pu.p_u) below = r.p;
  csv.row({s.pair, "p_u(G)", pair.g_name, std::to_string(pu_size), fmt(pu.p_u), fmt(pu.found ? below : grid.back()),
           fmt(pu.p_u), pu.found ? "grid bracket; heuristic" : "decay at every grid p; heuristic"});
  write_pu(s, digest, out, pu, "question_pu");

  if (s.pair == "dl_horocyclic") {
    csv.row({s.pair, "p_c(H) < 1 probe", pair.h_name, "extrapolated", pc.ci.hi < 1.0 ? "1" : "0", fmt(pc.ci.lo),
             fmt(pc.ci.hi), "1 when the whole interval lies below 1; reported without verdict"});
    // TV of DL band truncations against the horocyclic construction.
    const int ref_size = h_sizes.back() + 1;
    const NeighborhoodDist ref =
        neighborhood_distribution(build_family(pair.h.with_size(ref_size)), s.radius, SampleMode::all(), s.threads);
    for (int size : h_sizes) {
      const NeighborhoodDist d =
          neighborhood_distribution(build_family(pair.g.with_size(size)), s.radius, SampleMode::all(), s.threads);
      csv.row({s.pair, "tv(DL ball, horocyclic reference)", pair.g_name, std::to_string(size),
               fmt(tv_distance(d, ref)), "", "",
               "radius " + std::to_string(s.radius) + "; reference L=" + std::to_string(ref_size)});
    }
  }
  out.write("question_q1.csv", csv.text());
}

void question_q2(const Settings& s, const std::string& digest, const PairSpec& pair, Outputs& out) {
  const std::vector<int> g_sizes = s.g_sizes.empty() ? pair.g_sizes_q2 : s.g_sizes;
  const std::vector<int> h_sizes = s.h_sizes.empty() ? pair.h_sizes_q2 : s.h_sizes;
  const LambdaOptions o = lambda_options(s);
  Csv csv(s, digest, kQuestionHeader);
  auto rows = [&](auto&& estimate, const std::string& quantity, const std::string& fam) {
    LambdaEstimate e;
    try {
      e = estimate();
    } catch (const Error& err) {
      if (err.code() != ErrorCode::non_crossing_curve) throw;
      csv.row({s.pair, quantity, fam, "extrapolated", "nan", "nan", "nan", "no crossing on the lambda grid"});
      return;
    }
    for (const auto& z : e.sizes)
      csv.row({s.pair, quantity, fam, std::to_string(z.size), fmt(z.lambda_hat), fmt(z.ci.lo), fmt(z.ci.hi),
               z.crossed ? e.label : "no crossing"});
    csv.row({s.pair, quantity, fam, "extrapolated", fmt(e.extrapolated), fmt(e.ci.lo), fmt(e.ci.hi),
             (e.fallback ? "largest-size fallback; " : "power-law extrapolation; ") + e.label});
  };
  rows([&] {
    return estimate_lambda_c(pair.h, h_sizes, s.lambda_grid, s.replicas, derive_seed(s.seed, "question_h", 0), o);
  }, "lambda_c(H)", pair.h_name);
  rows([&] {
    return estimate_lambda_s(pair.g, g_sizes, s.lambda_grid, s.replicas, derive_seed(s.seed, "question_g", 0), o);
  }, "lambda_s(G)", pair.g_name);
  out.write("question_q2.csv", csv.text());
}

void run_question(const Settings& s, const std::string& digest, Outputs& out) {
  const PairSpec pair = catalog(s.pair);
  if (s.kind == "q1") question_q1(s, digest, pair, out);
  else question_q2(s, digest, pair, out);
}

RunResult execute(const ExperimentConfig& cfg) {
  const Settings s = resolve(cfg);
  if (s.experiment == "question") catalog(s.pair);  // unknown pairs fail before any output
  const std::string digest = cfg.digest();
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  Outputs out(s.out);

  if (s.experiment == "generate") run_generate(s, digest, out);
  else if (s.experiment == "bslimit") run_bslimit(s, digest, out);
  else if (s.experiment == "theta") run_theta(s, digest, out);
  else if (s.experiment == "pc") run_pc(s, digest, out);
  else if (s.experiment == "pu") run_pu(s, digest, out);
  else if (s.experiment == "tau") run_tau(s, digest, out);
  else if (s.experiment == "clusters") run_clusters(s, digest, out);
  else if (s.experiment == "contact") run_contact(s, digest, out);
  else if (s.experiment == "walk") run_walk(s, digest, out);
  else run_question(s, digest, out);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  nlohmann::json m;
  m["tool"] = "bslab";
  m["tool_version"] = kToolVersion;
  m["experiment"] = s.experiment;
  m["config"] = cfg.values();
  m["config_digest"] = digest;
  m["seed"] = s.seed;
  m["seed_scheme"] = "derive_seed(master, stream label, index) = splitmix64 mixing of FNV-1a(label)";
  m["started_utc"] = started;
  m["wall_clock_seconds"] = seconds;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : out.files()) files.push_back({{"name", f.name}, {"digest", f.digest}, {"bytes", f.bytes}});
  m["files"] = files;
  const Family fam = s.experiment == "question" ? catalog(s.pair).g.family : s.family.family;
  if (fam == Family::dl_ball || fam == Family::horocyclic_canopy)
    m["coordinate_encoding"] =
        "tree vertex = (height, index); height decreases away from the fixed end, index enumerates the vertices of "
        "that height left to right below the band top, root ray = index 0; pairs satisfy h1 + h2 = 0";
  if (s.experiment == "walk" && s.walk_method == "profile") {
    m["transience_floor"] = s.floor;
    m["transience_trend_window"] = s.trend_window;
  }
  RunResult r;
  r.experiment = s.experiment;
  r.out_dir = out.dir();
  r.files = out.files();
  r.manifest = (fs::path(out.dir()) / "manifest.json").string();
  write_text_file(r.manifest, m.dump(2) + "\n");
  return r;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) { return execute(cfg); }

QuestionKind parse_question_kind(const std::string& name) {
  if (name == "q1") return QuestionKind::q1;
  if (name == "q2") return QuestionKind::q2;
  throw Error(ErrorCode::config_invalid, "field 'kind': expected q1 or q2, got '" + name + "'");
}

RunResult question_report(QuestionKind kind, const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.set("experiment", "question");
  c.set("kind", kind == QuestionKind::q1 ? "q1" : "q2");
  return execute(c);
}

}  // namespace bslab
