// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "bslab/config.hpp"
#include "bslab/contact.hpp"
#include "bslab/error.hpp"
#include "bslab/export.hpp"
#include "bslab/generators.hpp"
#include "bslab/limits.hpp"
#include "bslab/percolation.hpp"
#include "bslab/runner.hpp"
#include "bslab/walk.hpp"
#include "oracles.hpp"

using namespace bslab;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  std::string out(std::snprintf(nullptr, 0, f, args...), '\0');
  std::snprintf(out.data(), out.size() + 1, f, args...);
  return out;
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (int i = 0; lo + i * step <= hi + 1e-9; ++i) g.push_back(lo + i * step);
  return g;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back((ok ? "" : "[x] ") + what);
  }
};

int failures = 0;
std::FILE* report = nullptr;

void emit(const std::string& line) {
  std::printf("%s\n", line.c_str());
  std::fflush(stdout);
  if (report) {
    std::fprintf(report, "%s\n", line.c_str());
    std::fflush(report);
  }
}

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  const double secs = seconds_since(t0);
  std::string detail;
  for (const auto& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
  emit(fmt("criterion %2d %s: %s (%.1fs) | %s", id, o.pass ? "PASS" : "FAIL", title.c_str(), secs, detail.c_str()));
  if (!o.pass) ++failures;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("bslab_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig config(const std::string& text, const fs::path& out) {
  ExperimentConfig c = ExperimentConfig::parse(text);
  c.set("out", out.string());
  return c;
}

bool same_outputs(const RunResult& a, const RunResult& b) {
  if (a.files.size() != b.files.size()) return false;
  for (std::size_t i = 0; i < a.files.size(); ++i)
    if (a.files[i].name != b.files[i].name || a.files[i].digest != b.files[i].digest) return false;
  return !a.files.empty();
}

std::string pc_summary(const PcEstimate& e) {
  return fmt("p_c=%.4f [%.4f, %.4f]%s", e.extrapolated, e.ci.lo, e.ci.hi, e.fallback ? " (largest size)" : "");
}

}  // namespace

// An optional argument names a file that receives a copy of the report.
int main(int argc, char** argv) {
  if (argc > 1) report = std::fopen(argv[1], "w");
  criterion(1, "tree threshold", [](Outcome& o) {
    const auto t0 = Clock::now();
    FamilySpec f;
    f.family = Family::tree_ball;
    const std::vector<int> sizes = {8, 9, 10, 11, 12, 13, 14};
    PcEstimate e = estimate_pc(f, sizes, 2000, 1);
    const double secs = seconds_since(t0);
    o.check(std::abs(e.extrapolated - 0.5) <= 0.02, pc_summary(e) + " within 0.50 +- 0.02");
    o.check(secs < 120, fmt("%.1fs < 120s", secs));
  });

  criterion(2, "amenable equality probe on Z^2", [](Outcome& o) {
    const auto t0 = Clock::now();
    FamilySpec f;
    f.family = Family::grid_box;
    f.dims = {0, 0};
    const std::vector<int> sizes = {16, 32, 64, 128, 256, 512};
    PcEstimate pc = estimate_pc(f, sizes, 2000, 1);
    o.check(std::abs(pc.extrapolated - 0.593) <= 0.01, pc_summary(pc) + " within 0.593 +- 0.01");
    // p_u from the decay window [128, 256] on a 1024^2 box.
    PuEstimate pu = estimate_pu(f, 1024, grid(0.57, 0.63, 0.01), 256, 100, 1);
    o.check(pu.found && std::abs(pu.p_u - pc.extrapolated) <= 0.01 + 1e-9,
            fmt("p_u=%.2f (1024^2, d_max 256), |p_u - p_c| <= 0.01", pu.p_u));
    const double secs = seconds_since(t0);
    o.check(secs < 600, fmt("%.1fs < 600s", secs));
  });

  criterion(3, "canopy degeneracy and tree p_u", [](Outcome& o) {
    FamilySpec f;
    f.family = Family::canopy;
    const std::vector<int> sizes = {4, 5, 6, 7, 8, 9, 10};
    PcEstimate e = estimate_pc(f, sizes, 2000, 1);
    bool increasing = true;
    std::string seq;
    for (std::size_t i = 0; i < e.sizes.size(); ++i) {
      if (i > 0 && !(e.sizes[i].p_hat > e.sizes[i - 1].p_hat)) increasing = false;
      seq += fmt("%s%.3f", i ? "," : "", e.sizes[i].p_hat);
    }
    o.check(increasing, "p_c(canopy(3,K)), K=4..10 strictly increasing: " + seq);
    o.check(e.sizes.back().p_hat > 0.85, fmt("p_c(canopy(3,10))=%.3f > 0.85", e.sizes.back().p_hat));

    FamilySpec t;
    t.family = Family::tree_ball;
    PuEstimate pu = estimate_pu(t, 14, grid(0.5, 0.95, 0.05), 8, 100, 1);
    bool all_decay = true;
    for (const auto& r : pu.rows) all_decay = all_decay && r.decay;
    o.check(all_decay && !pu.found, fmt("tree_ball(3,14) decay at all %zu grid p <= 0.95", pu.rows.size()));
  });

  criterion(4, "upper bound on p_u(T3 x Z) and p_c(canopy x Z)", [](Outcome& o) {
    FamilySpec g;
    g.family = Family::product;
    g.base = Family::tree_ball;
    g.L = 40;
    PuEstimate pu = estimate_pu(g, 10, grid(0.3, 0.9, 0.05), 8, 200, 1);
    o.check(pu.p_u <= 0.76 + 1e-9, fmt("p_u(T3(10) x Z(40))=%.2f <= 0.76", pu.p_u));
    for (int stretch : {1, 2, 4}) {
      FamilySpec h;
      h.family = Family::stretched_product;
      h.base = Family::canopy;
      h.stretch = stretch;
      const std::vector<int> sizes = {4, 5, 6, 7, 8};
      PcEstimate e = estimate_pc(h, sizes, 500, 1);
      o.check(e.extrapolated <= 0.76, fmt("stretch %d: ", stretch) + pc_summary(e) + " <= 0.76");
    }
  });

  criterion(5, "subcritical decay on tree_ball(3,12)", [](Outcome& o) {
    TauProfile t = connection_profile(tree_ball(3, 12), 0.3, 6, 6, 200, 400, 1);
    DecayFit f = decay_rate_fit(t, 0, 6, 200);
    o.check(f.slope < 0, fmt("slope=%.4f [%.4f, %.4f] < 0", f.slope, f.slope_ci.lo, f.slope_ci.hi));
    o.check(f.r2_defined && f.r2 > 0.95, fmt("R^2=%.5f > 0.95", f.r2));
  });

  criterion(6, "BS convergence of tree balls to the canopy", [](Outcome& o) {
    const NeighborhoodDist ref = canopy_reference_distribution(3, 2, canopy_min_cutoff(3));
    std::vector<double> tv;
    std::string seq;
    for (int n = 6; n <= 14; ++n) {
      tv.push_back(tv_distance(neighborhood_distribution(tree_ball(3, n), 2), ref));
      seq += fmt("%s%.4f", n > 6 ? "," : "", tv.back());
    }
    bool nonincreasing = true;
    for (std::size_t i = 1; i < tv.size(); ++i) nonincreasing = nonincreasing && tv[i] <= tv[i - 1];
    o.check(nonincreasing, "TV n=6..14 nonincreasing: " + seq);
    o.check(tv[12 - 6] < 0.05, fmt("TV at n=12 = %.4f < 0.05", tv[12 - 6]));
  });

  criterion(7, "brute-force oracle equivalence", [](Outcome& o) {
    double worst = 0;
    const auto suite = oracle::small_suite();
    for (const FiniteGraph& g : suite) {
      std::vector<VertexPair> pairs = {{0, static_cast<VertexId>(g.num_vertices() - 1)}};
      MicrocanonicalCurve m = exact_microcanonical(g, pairs);
      const std::vector<double> ps = grid(0.0, 1.0, 0.05);
      CanonicalCurve c = canonical_curve(m, ps);
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto b = oracle::brute_force(g, ps[i], pairs);
        const auto& pt = c.points[i];
        for (double d : {pt.theta - b.theta, pt.largest - b.largest, pt.boundary_mass - b.boundary_mass,
                         pt.pair_connected[0] - b.pairs[0]})
          worst = std::max(worst, std::abs(d));
      }
    }
    o.check(worst <= 1e-9, fmt("%zu graphs, max deviation %.2e <= 1e-9", suite.size(), worst));
  });

  criterion(8, "contact process", [](Outcome& o) {
    FamilySpec z;
    z.family = Family::grid_box;
    z.dims = {0};
    const std::vector<int> z_sizes = {51, 101, 201, 401};
    LambdaEstimate zc = estimate_lambda_c(z, z_sizes, grid(1.0, 2.6, 0.02), 100, 1);
    o.check(std::abs(zc.extrapolated - 1.65) <= 0.15,
            fmt("Z: lambda_c=%.3f [%.3f, %.3f] within 1.65 +- 0.15", zc.extrapolated, zc.ci.lo, zc.ci.hi));

    FamilySpec t;
    t.family = Family::tree_ball;
    const std::vector<int> t_sizes = {6, 7, 8, 9, 10};
    LambdaPair tp = estimate_lambdas(t, t_sizes, grid(0.2, 2.0, 0.02), 200, 1);
    o.check(tp.weak.ci.hi < tp.strong.ci.lo && tp.weak.extrapolated < tp.strong.extrapolated,
            fmt("T3: lambda_c=%.3f [%.3f, %.3f] < lambda_s=%.3f [%.3f, %.3f], disjoint", tp.weak.extrapolated,
                tp.weak.ci.lo, tp.weak.ci.hi, tp.strong.extrapolated, tp.strong.ci.lo, tp.strong.ci.hi));

    // Coupling: on shared seeds the infected set at lambda is contained in
    // the one at lambda' >= lambda at every event time.
    FiniteGraph g = tree_ball(3, 6);
    const VertexId root[] = {g.root()};
    const std::vector<double> lambdas = {0.4, 0.8, 1.2, 1.6, 2.0};
    std::size_t violations = 0, checked = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      std::vector<std::vector<ContactEvent>> traces(lambdas.size());
      for (std::size_t i = 0; i < lambdas.size(); ++i) {
        ContactOptions co;
        co.lambda_max = 2.0;
        co.trace = &traces[i];
        graphical_sim(g, lambdas[i], root, 30.0, seed, co);
      }
      std::vector<std::vector<char>> state(lambdas.size(), std::vector<char>(g.num_vertices(), 0));
      std::vector<std::size_t> pos(lambdas.size(), 0);
      for (;;) {
        double t = INFINITY;
        for (std::size_t i = 0; i < lambdas.size(); ++i)
          if (pos[i] < traces[i].size()) t = std::min(t, traces[i][pos[i]].time);
        if (!std::isfinite(t)) break;
        for (std::size_t i = 0; i < lambdas.size(); ++i)
          for (; pos[i] < traces[i].size() && traces[i][pos[i]].time == t; ++pos[i])
            state[i][traces[i][pos[i]].vertex] = traces[i][pos[i]].infected;
        for (std::size_t i = 1; i < lambdas.size(); ++i)
          for (VertexId v = 0; v < g.num_vertices(); ++v, ++checked) violations += state[i - 1][v] > state[i][v];
      }
    }
    o.check(violations == 0, fmt("coupling: %zu violations in %zu comparisons", violations, checked));

    const fs::path out = scratch("q2");
    ExperimentConfig q2 = config(
        "experiment = question\nkind = q2\npair = t3_canopy\nreplicas = 100\nlambda_grid = 0.2:2:0.05\n"
        "bootstrap = 50\n",
        out);
    question_report(QuestionKind::q2, q2);
    const std::string table = read_text_file((out / "question_q2.csv").string());
    o.check(table.find("lambda") != std::string::npos, "Q2 table emitted (reported, no verdict)");
  });

  criterion(9, "random walk escape and transience", [](Outcome& o) {
    double worst = 0, residual = 0;
    for (int L : {2, 5, 10, 50, 200}) {
      EscapeResult r = escape_probability_exact(half_line(L));
      worst = std::max(worst, std::abs(r.escape - 1.0 / L));
      residual = std::max(residual, r.residual);
    }
    o.check(worst < 1e-10 && residual < 1e-10, fmt("paths: |escape - 1/L| <= %.1e, residual %.1e", worst, residual));
    const double tree = escape_probability_exact(tree_ball(3, 2)).escape;
    o.check(std::abs(tree - 2.0 / 3.0) < 1e-10, fmt("tree_ball(3,2): %.12f", tree));

    const std::vector<int> sizes = {6, 8, 10, 12, 14};
    FamilySpec cz;
    cz.family = Family::product;
    cz.base = Family::canopy;
    TransienceProfile a = transience_profile(cz, sizes);
    o.check(a.verdict == "bounded-below", fmt("canopy x path: %s (limit %.3f)", a.verdict.c_str(), a.limit));
    FamilySpec c;
    c.family = Family::canopy;
    TransienceProfile b = transience_profile(c, sizes);
    o.check(b.verdict == "vanishing", fmt("canopy: %s (limit %.3f)", b.verdict.c_str(), b.limit));
  });

  criterion(10, "performance and determinism", [](Outcome& o) {
    FiniteGraph g = grid_box({1000, 1000});
    const auto t0 = Clock::now();
    nz_sweep(g, 1, 1);
    const double secs = seconds_since(t0);
    o.check(secs < 5.0, fmt("one sweep on %zu sites: %.2fs < 5s", g.num_vertices(), secs));

    const std::vector<std::string> runs = {
        "experiment = pc\nfamily = grid_box\nsizes = 16,32,64\nreplicas = 200\nbootstrap = 50\n",
        "experiment = tau\nfamily = tree_ball\nn = 9\np = 0.45\nd_max = 6\nreplicas = 100\n",
        "experiment = clusters\nfamily = grid_box\ndims = 40,40\np = 0.6\nreplicas = 100\n",
        "experiment = contact\nfamily = tree_ball\nsizes = 4,5\nreplicas = 50\nlambda_grid = 0.2:2:0.1\n"
        "bootstrap = 20\n",
        "experiment = bslimit\nfamily = hyperbolic_ball\nsizes = 3,4\nradius = 2\nsamples = 200\n",
        "experiment = walk\nwalk_method = mc\nfamily = grid_box\ndims = 15,15\nreplicas = 2000\n",
    };
    int k = 0;
    for (const auto& text : runs) {
      std::vector<RunResult> results;
      for (const char* threads : {"1", "3"}) {
        ExperimentConfig c = config(text + "seed = 11\n", scratch(fmt("det_%d_%s", k, threads)));
        c.set("threads", threads);
        results.push_back(run_experiment(c));
      }
      o.check(same_outputs(results[0], results[1]),
              results[0].experiment + ": identical outputs at 1 and 3 threads");
      ++k;
    }
  });

  criterion(11, "open-question artifacts for (DL(3,2), horocyclic product)", [](Outcome& o) {
    const std::string text =
        "experiment = question\nkind = q1\npair = dl_horocyclic\nreplicas = 100\np_grid = 0.3:0.9:0.1\n"
        "bootstrap = 50\npairs_per_distance = 50\n";
    RunResult a = question_report(QuestionKind::q1, config(text, scratch("q1_a")));
    RunResult b = question_report(QuestionKind::q1, config(text, scratch("q1_b")));
    const std::string table = read_text_file(a.out_dir + "/question_q1.csv");
    o.check(table.find("p_c(H) < 1 probe") != std::string::npos, "p_c(H) < 1 probe row present");
    o.check(table.find("tv(DL ball, horocyclic reference)") != std::string::npos, "TV convergence rows present");
    o.check(fs::exists(a.manifest), "manifest written");
    o.check(same_outputs(a, b), fmt("two runs give identical digests (%zu files)", a.files.size()));
  });

  emit(fmt("%d of 11 criteria failed", failures));
  if (report) std::fclose(report);
  return failures == 0 ? 0 : 1;
}
