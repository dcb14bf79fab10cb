#include "bslab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>

#include "bslab/error.hpp"
#include "bslab/parallel.hpp"
#include "bslab/rng.hpp"
#include "bslab/union_find.hpp"

namespace bslab {

namespace {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

class Canonizer {
 public:
  Canonizer(const Adjacency& adj, std::uint32_t root) : adj_(adj), n_(adj.size()) {
    std::vector<int> color(n_, static_cast<int>(n_));
    std::vector<std::uint32_t> queue{root};
    color[root] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i)
      for (std::uint32_t w : adj_[queue[i]])
        if (color[w] == static_cast<int>(n_)) {
          color[w] = color[queue[i]] + 1;
          queue.push_back(w);
        }
    compress(color);
    std::vector<std::uint32_t> path;
    search(color, path);
  }

  const Signature& result() const { return best_; }

 private:
  static constexpr int kNone = -1;

  // Renames colors to dense ranks 0..k-1, preserving order. Returns k.
  static int compress(std::vector<int>& color) {
    std::vector<int> values = color;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (int& c : color) c = static_cast<int>(std::lower_bound(values.begin(), values.end(), c) - values.begin());
    return static_cast<int>(values.size());
  }

  // Color refinement to the coarsest equitable partition finer than `color`.
  void refine(std::vector<int>& color) const {
    int cells = compress(color);
    std::vector<std::vector<int>> nbr(n_);
    std::vector<std::uint32_t> order(n_);
    while (cells < static_cast<int>(n_)) {
      for (std::size_t v = 0; v < n_; ++v) {
        nbr[v].clear();
        for (std::uint32_t w : adj_[v]) nbr[v].push_back(color[w]);
        std::sort(nbr[v].begin(), nbr[v].end());
      }
      std::iota(order.begin(), order.end(), 0u);
      auto less = [&](std::uint32_t a, std::uint32_t b) {
        if (color[a] != color[b]) return color[a] < color[b];
        return nbr[a] < nbr[b];
      };
      std::sort(order.begin(), order.end(), less);
      std::vector<int> next(n_);
      int rank = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        if (i > 0 && less(order[i - 1], order[i])) ++rank;
        next[order[i]] = rank;
      }
      const int next_cells = rank + 1;
      color.swap(next);
      if (next_cells == cells) break;
      cells = next_cells;
    }
  }

  Signature serialize(const std::vector<int>& lab) const {
    std::vector<std::pair<int, int>> edges;
    for (std::size_t v = 0; v < n_; ++v)
      for (std::uint32_t w : adj_[v])
        if (lab[v] < lab[w]) edges.emplace_back(lab[v], lab[w]);
    std::sort(edges.begin(), edges.end());
    Signature s;
    auto put = [&s](int x) {
      s.push_back(static_cast<char>(x >> 8 & 0xff));
      s.push_back(static_cast<char>(x & 0xff));
    };
    put(static_cast<int>(n_));
    for (auto [a, b] : edges) {
      put(a);
      put(b);
    }
    return s;
  }

  std::size_t common_prefix(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) const {
    std::size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    return i;
  }

  // Records the automorphism taking this leaf's labeling onto `other`'s.
  void record_automorphism(const std::vector<int>& lab, const std::vector<int>& other) {
    std::vector<std::uint32_t> inv(n_);
    for (std::size_t v = 0; v < n_; ++v) inv[other[v]] = static_cast<std::uint32_t>(v);
    std::vector<std::uint32_t> gamma(n_);
    for (std::size_t v = 0; v < n_; ++v) gamma[v] = inv[lab[v]];
    autos_.push_back(std::move(gamma));
  }

  int leaf(const std::vector<int>& lab, const std::vector<std::uint32_t>& path) {
    Signature s = serialize(lab);
    if (first_lab_.empty()) {
      first_lab_ = lab;
      first_path_ = path;
      first_ = s;
      best_ = std::move(s);
      best_lab_ = lab;
      best_path_ = path;
      return kNone;
    }
    if (s == first_) {
      record_automorphism(lab, first_lab_);
      return static_cast<int>(common_prefix(path, first_path_));
    }
    if (s == best_) {
      record_automorphism(lab, best_lab_);
      return static_cast<int>(common_prefix(path, best_path_));
    }
    if (s < best_) {
      best_ = std::move(s);
      best_lab_ = lab;
      best_path_ = path;
    }
    return kNone;
  }

  // Orbit representatives under the stored automorphisms that fix `path`.
  UnionFind orbits(const std::vector<std::uint32_t>& path) const {
    UnionFind uf(n_);
    for (const auto& g : autos_) {
      bool fixes = std::all_of(path.begin(), path.end(), [&](std::uint32_t v) { return g[v] == v; });
      if (!fixes) continue;
      for (std::size_t v = 0; v < n_; ++v) uf.unite(static_cast<std::uint32_t>(v), g[v]);
    }
    return uf;
  }

  int search(std::vector<int> color, std::vector<std::uint32_t>& path) {
    refine(color);
    // First non-singleton cell.
    std::vector<std::size_t> cell_size(n_, 0);
    for (int c : color) ++cell_size[c];
    int target = -1;
    for (std::size_t c = 0; c < n_; ++c)
      if (cell_size[c] > 1) {
        target = static_cast<int>(c);
        break;
      }
    if (target < 0) return leaf(color, path);

    std::vector<std::uint32_t> cell;
    for (std::size_t v = 0; v < n_; ++v)
      if (color[v] == target) cell.push_back(static_cast<std::uint32_t>(v));
    const int depth = static_cast<int>(path.size());
    std::vector<std::uint32_t> tried;
    for (std::uint32_t v : cell) {
      if (!tried.empty()) {
        UnionFind uf = orbits(path);
        if (std::any_of(tried.begin(), tried.end(), [&](std::uint32_t u) { return uf.connected(u, v); })) continue;
      }
      tried.push_back(v);
      std::vector<int> child(n_);
      for (std::size_t u = 0; u < n_; ++u) child[u] = 2 * color[u] + (color[u] == target && u != v ? 1 : 0);
      path.push_back(v);
      const int jump = search(std::move(child), path);
      path.pop_back();
      if (jump != kNone && jump < depth) return jump;
    }
    return kNone;
  }

  const Adjacency& adj_;
  std::size_t n_;
  std::vector<std::vector<std::uint32_t>> autos_;
  Signature first_, best_;
  std::vector<int> first_lab_, best_lab_;
  std::vector<std::uint32_t> first_path_, best_path_;
};

// Ball of radius r around v as a local adjacency list rooted at 0.
Adjacency local_ball(const FiniteGraph& g, VertexId v, int r, std::vector<int>& local) {
  std::vector<VertexId> verts{v};
  std::vector<int> dist{0};
  local[v] = 0;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (dist[i] == r) continue;
    for (VertexId w : g.neighbors(verts[i]))
      if (local[w] < 0) {
        local[w] = static_cast<int>(verts.size());
        verts.push_back(w);
        dist.push_back(dist[i] + 1);
      }
  }
  Adjacency adj(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i)
    for (VertexId w : g.neighbors(verts[i]))
      if (local[w] >= 0) adj[i].push_back(static_cast<std::uint32_t>(local[w]));
  for (VertexId u : verts) local[u] = -1;
  return adj;
}

}  // namespace

RootedNeighborhood rooted_ball(const FiniteGraph& g, VertexId v, int r) {
  require(v < g.num_vertices(), ErrorCode::invalid_vertex, "vertex out of range");
  require(r >= 0, ErrorCode::parameter_out_of_range, "radius must be >= 0");
  std::vector<int> local(g.num_vertices(), -1);
  const Adjacency adj = local_ball(g, v, r, local);
  GraphBuilder b(adj.size());
  for (std::size_t i = 0; i < adj.size(); ++i)
    for (std::uint32_t j : adj[i])
      if (i < j) b.add_edge(static_cast<VertexId>(i), j);
  // Local ids are already in BFS order, so distances are monotone in id.
  std::vector<VertexId> sphere;
  {
    std::vector<int> dist(adj.size(), -1);
    std::vector<std::uint32_t> q{0};
    dist[0] = 0;
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::uint32_t w : adj[q[i]])
        if (dist[w] < 0) {
          dist[w] = dist[q[i]] + 1;
          q.push_back(w);
        }
    for (std::size_t i = 0; i < adj.size(); ++i)
      if (dist[i] == r) sphere.push_back(static_cast<VertexId>(i));
  }
  return {std::move(b).build(0, sphere, FamilySpec{}), r};
}

Signature canonical_signature(const Adjacency& adjacency, std::uint32_t root, std::size_t cap) {
  require(adjacency.size() <= cap, ErrorCode::size_cap_exceeded,
          "neighborhood has " + std::to_string(adjacency.size()) + " vertices, cap is " + std::to_string(cap));
  require(root < adjacency.size(), ErrorCode::invalid_vertex, "root out of range");
  return Canonizer(adjacency, root).result();
}

Signature canonical_signature(const RootedNeighborhood& nb, std::size_t cap) {
  const FiniteGraph& g = nb.graph;
  Adjacency adj(g.num_vertices());
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    auto nbrs = g.neighbors(v);
    adj[v].assign(nbrs.begin(), nbrs.end());
  }
  return canonical_signature(adj, g.root(), cap);
}

std::string signature_hex(const Signature& s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(mix64(label_hash(s))));
  return buf;
}

double NeighborhoodDist::total() const {
  double t = 0.0;
  for (const auto& [sig, pr] : probability) t += pr;
  return t;
}

NeighborhoodDist neighborhood_distribution(const FiniteGraph& g, int r, SampleMode mode, unsigned threads) {
  require(r >= 0, ErrorCode::parameter_out_of_range, "radius must be >= 0");
  require(g.num_vertices() > 0, ErrorCode::invalid_graph, "empty graph");
  std::vector<VertexId> centers;
  if (mode.exact) {
    centers.resize(g.num_vertices());
    std::iota(centers.begin(), centers.end(), VertexId{0});
  } else {
    require(mode.k >= 1, ErrorCode::parameter_out_of_range, "sample count must be >= 1");
    Rng rng = make_rng(mode.seed, "bs_sample", 0);
    std::uniform_int_distribution<VertexId> draw(0, static_cast<VertexId>(g.num_vertices() - 1));
    for (std::size_t i = 0; i < mode.k; ++i) centers.push_back(draw(rng));
  }

  threads = std::max(1u, threads);
  std::vector<std::map<Signature, std::size_t>> partial(threads);
  std::vector<std::vector<int>> scratch(threads);
  parallel_for(centers.size(), threads, [&](unsigned w, std::size_t i) {
    if (scratch[w].empty()) scratch[w].assign(g.num_vertices(), -1);
    ++partial[w][canonical_signature(local_ball(g, centers[i], r, scratch[w]), 0)];
  });
  std::map<Signature, std::size_t> counts;
  for (const auto& p : partial)
    for (const auto& [sig, c] : p) counts[sig] += c;

  NeighborhoodDist out;
  out.radius = r;
  out.exact = mode.exact;
  out.samples = centers.size();
  for (const auto& [sig, c] : counts)
    out.probability[sig] = static_cast<double>(c) / static_cast<double>(centers.size());
  return out;
}

double tv_distance(const NeighborhoodDist& p, const NeighborhoodDist& q) {
  require(p.radius == q.radius, ErrorCode::radius_mismatch, "distributions have different radii");
  double sum = 0.0;
  auto a = p.probability.begin(), b = q.probability.begin();
  while (a != p.probability.end() || b != q.probability.end()) {
    if (b == q.probability.end() || (a != p.probability.end() && a->first < b->first)) {
      sum += a->second;
      ++a;
    } else if (a == p.probability.end() || b->first < a->first) {
      sum += b->second;
      ++b;
    } else {
      sum += std::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return std::min(1.0, 0.5 * sum);
}

int canopy_min_cutoff(int d) {
  require(d >= 3, ErrorCode::parameter_out_of_range, "canopy needs d >= 3");
  int K = 0;
  while (std::pow(static_cast<double>(d - 1), -(K + 1)) >= 1e-9) ++K;
  return K;
}

NeighborhoodDist canopy_reference_distribution(int d, int r, int K) {
  require(d >= 3, ErrorCode::parameter_out_of_range, "canopy needs d >= 3");
  require(r >= 0, ErrorCode::parameter_out_of_range, "radius must be >= 0");
  require(K >= canopy_min_cutoff(d), ErrorCode::cutoff_too_small,
          "level cutoff " + std::to_string(K) + " leaves tail mass >= 1e-9; need K >= " +
              std::to_string(canopy_min_cutoff(d)));
  const std::int64_t b = d - 1;
  const double base = static_cast<double>(b);

  NeighborhoodDist out;
  out.radius = r;
  out.exact = true;
  for (int k = 0; k <= K; ++k) {
    // Implicit canopy: (level, index); the parent of (l, i) is (l + 1, i / b)
    // and every level above 0 has b children. The root sits at (k, 0).
    using Node = std::pair<int, std::int64_t>;
    std::map<Node, std::uint32_t> id;
    std::vector<Node> nodes{{k, 0}};
    std::vector<int> dist{0};
    id[{k, 0}] = 0;
    auto around = [b](const Node& x) {
      std::vector<Node> nb{{x.first + 1, x.second / b}};
      if (x.first > 0)
        for (std::int64_t c = 0; c < b; ++c) nb.push_back({x.first - 1, x.second * b + c});
      return nb;
    };
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (dist[i] == r) continue;
      for (const Node& y : around(nodes[i]))
        if (!id.count(y)) {
          id[y] = static_cast<std::uint32_t>(nodes.size());
          nodes.push_back(y);
          dist.push_back(dist[i] + 1);
        }
    }
    Adjacency adj(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (const Node& y : around(nodes[i]))
        if (auto it = id.find(y); it != id.end()) adj[i].push_back(it->second);

    double w = (base - 1) / base * std::pow(base, -k);
    if (k == K) w += std::pow(base, -(K + 1));
    out.probability[canonical_signature(adj, 0)] += w;
    out.samples += 1;
  }
  return out;
}

CauchyReport cauchy_report(const std::vector<NeighborhoodDist>& sequence, double threshold) {
  CauchyReport rep;
  rep.threshold = threshold;
  for (std::size_t i = 1; i < sequence.size(); ++i) {
    rep.step_tv.push_back(tv_distance(sequence[i - 1], sequence[i]));
    rep.flagged.push_back(rep.step_tv.back() > threshold);
  }
  return rep;
}

}  // namespace bslab
