#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "bslab/error.hpp"
#include "bslab/parallel.hpp"
#include "bslab/percolation.hpp"
#include "bslab/rng.hpp"
#include "bslab/union_find.hpp"

namespace bslab {

std::string observable_name(Observable o) {
  switch (o) {
    case Observable::largest: return "largest";
    case Observable::root_boundary: return "root_boundary";
    case Observable::boundary_mass: return "boundary_mass";
  }
  return "unknown";
}

Observable parse_observable(const std::string& name) {
  for (Observable o : {Observable::largest, Observable::root_boundary, Observable::boundary_mass})
    if (observable_name(o) == name) return o;
  throw Error(ErrorCode::config_invalid, "unknown observable '" + name + "'");
}

void SweepTotals::merge(const SweepTotals& other) {
  if (replicas == 0 && largest.empty()) {
    *this = other;
    return;
  }
  require(n_sites == other.n_sites && pairs.size() == other.pairs.size(), ErrorCode::parameter_out_of_range,
          "cannot merge sweeps of different graphs");
  replicas += other.replicas;
  for (std::size_t k = 0; k < largest.size(); ++k) {
    largest[k] += other.largest[k];
    root_boundary[k] += other.root_boundary[k];
    boundary_mass[k] += other.boundary_mass[k];
  }
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t k = 0; k < pairs[i].size(); ++k) pairs[i][k] += other.pairs[i][k];
  first_connection.insert(first_connection.end(), other.first_connection.begin(), other.first_connection.end());
}

std::span<const double> MicrocanonicalCurve::values(Observable o) const {
  switch (o) {
    case Observable::largest: return largest;
    case Observable::root_boundary: return root_boundary;
    case Observable::boundary_mass: return boundary_mass;
  }
  return {};
}

namespace {

SweepTotals empty_totals(std::size_t n, std::size_t n_pairs) {
  SweepTotals t;
  t.n_sites = n;
  t.largest.assign(n + 1, 0);
  t.root_boundary.assign(n + 1, 0);
  t.boundary_mass.assign(n + 1, 0);
  t.pairs.assign(n_pairs, std::vector<std::uint64_t>(n + 1, 0));
  return t;
}

// One replica of the sweep, accumulated into `out`.
class SweepWorker {
 public:
  SweepWorker(const FiniteGraph& g, std::span<const VertexPair> pairs)
      : g_(g), pairs_(pairs), uf_(g.num_vertices()), open_(g.num_vertices(), 0), order_(g.num_vertices()) {}

  std::uint32_t run(Rng& rng, SweepTotals& out) {
    const std::size_t n = g_.num_vertices();
    std::iota(order_.begin(), order_.end(), VertexId{0});
    std::shuffle(order_.begin(), order_.end(), rng);
    std::fill(open_.begin(), open_.end(), 0);

    const VertexId root = g_.root();
    std::uint32_t largest = 0;
    std::uint32_t first_connection = static_cast<std::uint32_t>(n + 1);
    for (std::size_t step = 0; step < n; ++step) {
      const VertexId s = order_[step];
      open_[s] = 1;
      uf_.reset(s, g_.is_boundary(s));
      for (VertexId w : g_.neighbors(s))
        if (open_[w]) uf_.unite(s, w);
      largest = std::max(largest, uf_.size_of(s));

      const std::size_t k = step + 1;
      out.largest[k] += largest;
      if (open_[root]) {
        const std::uint32_t mass = uf_.marked_in(root);
        out.boundary_mass[k] += mass;
        if (mass > 0) {
          out.root_boundary[k] += 1;
          if (first_connection > n) first_connection = static_cast<std::uint32_t>(k);
        }
      }
      for (std::size_t i = 0; i < pairs_.size(); ++i) {
        const auto [a, b] = pairs_[i];
        if (open_[a] && open_[b] && uf_.connected(a, b)) out.pairs[i][k] += 1;
      }
    }
    return first_connection;
  }

 private:
  const FiniteGraph& g_;
  std::span<const VertexPair> pairs_;
  UnionFind uf_;
  std::vector<std::uint8_t> open_;
  std::vector<VertexId> order_;
};

}  // namespace

SweepTotals nz_sweep_totals(const FiniteGraph& g, std::uint64_t seed, std::size_t replicas,
                            const SweepOptions& options) {
  const std::size_t n = g.num_vertices();
  require(n > 0, ErrorCode::invalid_graph, "empty graph");
  require(replicas >= 1, ErrorCode::parameter_out_of_range, "replicas must be >= 1");
  for (const auto& [a, b] : options.pairs)
    require(a < n && b < n, ErrorCode::invalid_vertex, "pair vertex out of range");

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(replicas)));
  std::vector<SweepTotals> partial(threads, empty_totals(n, options.pairs.size()));
  std::vector<std::uint32_t> first(replicas);
  std::vector<std::unique_ptr<SweepWorker>> workers(threads);
  parallel_for(replicas, threads, [&](unsigned w, std::size_t r) {
    if (!workers[w]) workers[w] = std::make_unique<SweepWorker>(g, options.pairs);
    Rng rng = make_rng(seed, "nz_sweep", options.first_replica + r);
    first[r] = workers[w]->run(rng, partial[w]);
  });

  SweepTotals total = empty_totals(n, options.pairs.size());
  for (const SweepTotals& p : partial) {
    for (std::size_t k = 0; k <= n; ++k) {
      total.largest[k] += p.largest[k];
      total.root_boundary[k] += p.root_boundary[k];
      total.boundary_mass[k] += p.boundary_mass[k];
    }
    for (std::size_t i = 0; i < p.pairs.size(); ++i)
      for (std::size_t k = 0; k <= n; ++k) total.pairs[i][k] += p.pairs[i][k];
  }
  total.replicas = replicas;
  total.first_connection = std::move(first);
  return total;
}

MicrocanonicalCurve finalize(const SweepTotals& totals, std::vector<VertexPair> pairs) {
  MicrocanonicalCurve c;
  c.n_sites = totals.n_sites;
  c.replicas = totals.replicas;
  const double r = static_cast<double>(totals.replicas);
  auto average = [r](const std::vector<std::uint64_t>& sums) {
    std::vector<double> out(sums.size());
    for (std::size_t k = 0; k < sums.size(); ++k) out[k] = static_cast<double>(sums[k]) / r;
    return out;
  };
  c.largest = average(totals.largest);
  c.root_boundary = average(totals.root_boundary);
  c.boundary_mass = average(totals.boundary_mass);
  for (const auto& p : totals.pairs) c.pair_connected.push_back(average(p));
  c.pairs = std::move(pairs);
  c.first_connection = totals.first_connection;
  return c;
}

MicrocanonicalCurve nz_sweep(const FiniteGraph& g, std::uint64_t seed, std::size_t replicas,
                             const SweepOptions& options) {
  return finalize(nz_sweep_totals(g, seed, replicas, options), options.pairs);
}

MicrocanonicalCurve exact_microcanonical(const FiniteGraph& g, std::vector<VertexPair> pairs) {
  const std::size_t n = g.num_vertices();
  require(n <= 24, ErrorCode::size_cap_exceeded, "exhaustive enumeration is limited to 24 sites");
  for (const auto& [a, b] : pairs) require(a < n && b < n, ErrorCode::invalid_vertex, "pair vertex out of range");

  SweepTotals sums = empty_totals(n, pairs.size());
  std::vector<std::uint64_t> subsets(n + 1, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    UnionFind uf(n);
    for (VertexId s = 0; s < n; ++s) {
      if (!(mask >> s & 1)) continue;
      uf.reset(s, g.is_boundary(s));
      for (VertexId w : g.neighbors(s))
        if (w < s && (mask >> w & 1)) uf.unite(s, w);
    }
    const std::size_t k = static_cast<std::size_t>(std::popcount(mask));
    ++subsets[k];
    std::uint32_t largest = 0;
    for (VertexId s = 0; s < n; ++s)
      if (mask >> s & 1) largest = std::max(largest, uf.size_of(s));
    sums.largest[k] += largest;
    if (mask >> g.root() & 1) {
      const std::uint32_t mass = uf.marked_in(g.root());
      sums.boundary_mass[k] += mass;
      sums.root_boundary[k] += mass > 0 ? 1 : 0;
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto [a, b] = pairs[i];
      if ((mask >> a & 1) && (mask >> b & 1) && uf.connected(a, b)) sums.pairs[i][k] += 1;
    }
  }
  MicrocanonicalCurve c;
  c.n_sites = n;
  c.exact = true;
  auto average = [&](const std::vector<std::uint64_t>& s) {
    std::vector<double> out(n + 1);
    for (std::size_t k = 0; k <= n; ++k) out[k] = static_cast<double>(s[k]) / static_cast<double>(subsets[k]);
    return out;
  };
  c.largest = average(sums.largest);
  c.root_boundary = average(sums.root_boundary);
  c.boundary_mass = average(sums.boundary_mass);
  for (const auto& p : sums.pairs) c.pair_connected.push_back(average(p));
  c.pairs = std::move(pairs);
  return c;
}

}  // namespace bslab
