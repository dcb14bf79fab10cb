#include "bslab/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "bslab/error.hpp"

namespace bslab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parameter_out_of_range: return "parameter-out-of-range";
    case ErrorCode::no_fiber_edges: return "no-fiber-edges";
    case ErrorCode::invalid_vertex: return "invalid-vertex";
    case ErrorCode::invalid_graph: return "invalid-graph";
    case ErrorCode::size_cap_exceeded: return "size-cap-exceeded";
    case ErrorCode::radius_mismatch: return "radius-mismatch";
    case ErrorCode::cutoff_too_small: return "cutoff-too-small";
    case ErrorCode::empty_boundary: return "empty-boundary";
    case ErrorCode::non_crossing_curve: return "non-crossing-curve";
    case ErrorCode::insufficient_bulk: return "insufficient-bulk";
    case ErrorCode::all_zero_profile: return "all-zero-profile";
    case ErrorCode::solver_non_convergence: return "solver-non-convergence";
    case ErrorCode::config_invalid: return "config-invalid";
    case ErrorCode::io_failure: return "io-failure";
    case ErrorCode::unknown_pair: return "unknown-pair";
  }
  return "unknown-error";
}

namespace {

const std::vector<std::pair<Family, std::string>>& family_names() {
  static const std::vector<std::pair<Family, std::string>> names = {
      {Family::tree_ball, "tree_ball"},
      {Family::grid_box, "grid_box"},
      {Family::canopy, "canopy"},
      {Family::product, "product"},
      {Family::stretched_product, "stretched_product"},
      {Family::dl_ball, "dl_ball"},
      {Family::horocyclic_canopy, "horocyclic_canopy"},
      {Family::free_product_z2_edge, "free_product_z2_edge"},
      {Family::hyperbolic_ball, "hyperbolic_ball"},
      {Family::custom, "custom"},
  };
  return names;
}

}  // namespace

std::string family_name(Family family) {
  for (const auto& [f, name] : family_names())
    if (f == family) return name;
  return "custom";
}

Family parse_family(const std::string& name) {
  for (const auto& [f, n] : family_names())
    if (n == name) return f;
  throw Error(ErrorCode::config_invalid, "unknown family '" + name + "'");
}

std::vector<std::pair<std::string, std::string>> FamilySpec::params() const {
  using P = std::vector<std::pair<std::string, std::string>>;
  auto s = [](int v) { return std::to_string(v); };
  switch (family) {
    case Family::tree_ball: return P{{"d", s(d)}, {"n", s(n)}};
    case Family::grid_box: {
      std::string joined;
      for (std::size_t i = 0; i < dims.size(); ++i) joined += (i ? "x" : "") + s(dims[i]);
      return P{{"dims", joined}, {"periodic", periodic ? "true" : "false"}};
    }
    case Family::canopy: return P{{"d", s(d)}, {"K", s(K)}};
    case Family::product:
    case Family::stretched_product: {
      P p{{"base", family_name(base)}, {"d", s(d)}};
      p.emplace_back(base == Family::canopy ? "K" : "n", s(base == Family::canopy ? K : n));
      p.emplace_back("L", s(L == 0 ? size() : L));
      p.emplace_back("half_line", half_line ? "true" : "false");
      if (family == Family::stretched_product) p.emplace_back("stretch", s(stretch));
      return p;
    }
    case Family::dl_ball:
    case Family::horocyclic_canopy: return P{{"m", s(m)}, {"n", s(n)}, {"L", s(L)}};
    case Family::free_product_z2_edge: return P{{"r", s(n)}};
    case Family::hyperbolic_ball: return P{{"q", s(q)}, {"n", s(n)}};
    case Family::custom: return P{};
  }
  return P{};
}

std::string FamilySpec::describe() const {
  std::ostringstream out;
  out << family_name(family) << "(";
  bool first = true;
  for (const auto& [k, v] : params()) {
    out << (first ? "" : ",") << k << "=" << v;
    first = false;
  }
  out << ")";
  return out.str();
}

FamilySpec FamilySpec::with_size(int size) const {
  FamilySpec s = *this;
  switch (family) {
    case Family::tree_ball:
    case Family::free_product_z2_edge:
    case Family::hyperbolic_ball: s.n = size; break;
    case Family::grid_box:
      if (s.dims.empty()) s.dims = {size, size};
      for (auto& side : s.dims) side = size;
      break;
    case Family::canopy: s.K = size; break;
    case Family::product:
    case Family::stretched_product:
      if (base == Family::canopy) s.K = size;
      else s.n = size;
      break;
    case Family::dl_ball:
    case Family::horocyclic_canopy: s.L = size; break;
    case Family::custom: break;
  }
  return s;
}

int FamilySpec::size() const {
  switch (family) {
    case Family::tree_ball:
    case Family::free_product_z2_edge:
    case Family::hyperbolic_ball: return n;
    case Family::grid_box: return dims.empty() ? 0 : dims.front();
    case Family::canopy: return K;
    case Family::product:
    case Family::stretched_product: return base == Family::canopy ? K : n;
    case Family::dl_ball:
    case Family::horocyclic_canopy: return L;
    case Family::custom: return 0;
  }
  return 0;
}

bool FiniteGraph::adjacent(VertexId u, VertexId v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::span<const Edge> FiniteGraph::tagged_edges(const std::string& tag) const {
  auto it = edge_tags_.find(tag);
  if (it == edge_tags_.end()) return {};
  return it->second;
}

std::vector<Edge> FiniteGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (VertexId u = 0; u < num_vertices(); ++u)
    for (VertexId v : neighbors(u))
      if (u < v) out.push_back({u, v});
  return out;
}

std::vector<int> FiniteGraph::distances_from(VertexId source) const {
  std::vector<int> dist(num_vertices(), -1);
  std::vector<VertexId> queue{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    VertexId u = queue[head];
    for (VertexId w : neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

GraphBuilder::GraphBuilder(std::size_t num_vertices) : num_vertices_(num_vertices) {}

VertexId GraphBuilder::add_vertex() { return static_cast<VertexId>(num_vertices_++); }

void GraphBuilder::add_edge(VertexId u, VertexId v) {
  require(u != v, ErrorCode::invalid_graph, "self-loop at vertex " + std::to_string(u));
  require(u < num_vertices_ && v < num_vertices_, ErrorCode::invalid_vertex,
          "edge endpoint out of range");
  edges_.push_back({std::min(u, v), std::max(u, v)});
}

void GraphBuilder::tag_edge(const std::string& tag, VertexId u, VertexId v) {
  add_edge(u, v);
  tags_[tag].push_back({std::min(u, v), std::max(u, v)});
}

void GraphBuilder::set_label(const std::string& name, std::vector<std::int64_t> values) {
  labels_[name] = std::move(values);
}

FiniteGraph GraphBuilder::build(VertexId root, std::vector<VertexId> boundary, FamilySpec family,
                                bool relabel) && {
  const std::size_t n = num_vertices_;
  require(n > 0, ErrorCode::invalid_graph, "graph has no vertices");
  require(root < n, ErrorCode::invalid_vertex, "root out of range");
  for (VertexId b : boundary) require(b < n, ErrorCode::invalid_vertex, "boundary vertex out of range");
  for (const auto& [name, values] : labels_)
    require(values.size() == n, ErrorCode::invalid_graph, "label '" + name + "' has wrong length");

  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  // Unrelabelled CSR, used for the BFS ordering.
  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  std::vector<std::size_t> offsets(n + 1, 0);
  std::partial_sum(degree.begin(), degree.end(), offsets.begin() + 1);
  std::vector<VertexId> adj(offsets[n]);
  {
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (const Edge& e : edges_) {
      adj[fill[e.u]++] = e.v;
      adj[fill[e.v]++] = e.u;
    }
  }

  std::vector<VertexId> new_id(n);
  std::vector<VertexId> order;
  order.reserve(n);
  {
    std::vector<std::uint8_t> seen(n, 0);
    order.push_back(root);
    seen[root] = 1;
    for (std::size_t head = 0; head < order.size(); ++head) {
      VertexId u = order[head];
      // edges_ is sorted, so adjacency slices are sorted by original id.
      for (std::size_t i = offsets[u]; i < offsets[u + 1]; ++i) {
        VertexId w = adj[i];
        if (!seen[w]) {
          seen[w] = 1;
          order.push_back(w);
        }
      }
    }
    require(order.size() == n, ErrorCode::invalid_graph,
            "graph is disconnected (" + std::to_string(order.size()) + " of " + std::to_string(n) +
                " vertices reachable from the root)");
  }
  if (relabel) {
    for (std::size_t i = 0; i < n; ++i) new_id[order[i]] = static_cast<VertexId>(i);
  } else {
    std::iota(new_id.begin(), new_id.end(), VertexId{0});
  }

  FiniteGraph g;
  g.offsets_.assign(n + 1, 0);
  for (VertexId old = 0; old < n; ++old) g.offsets_[new_id[old] + 1] = degree[old];
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.neighbors_.resize(adj.size());
  for (VertexId old = 0; old < n; ++old) {
    std::size_t dst = g.offsets_[new_id[old]];
    for (std::size_t i = offsets[old]; i < offsets[old + 1]; ++i) g.neighbors_[dst++] = new_id[adj[i]];
    std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[new_id[old]]),
              g.neighbors_.begin() + static_cast<std::ptrdiff_t>(dst));
  }

  g.root_ = new_id[root];
  for (VertexId& b : boundary) b = new_id[b];
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  g.boundary_ = std::move(boundary);
  g.boundary_mask_.assign(n, 0);
  for (VertexId b : g.boundary_) g.boundary_mask_[b] = 1;

  for (auto& [name, values] : labels_) {
    std::vector<std::int64_t> relabeled(n);
    for (VertexId old = 0; old < n; ++old) relabeled[new_id[old]] = values[old];
    g.labels_[name] = std::move(relabeled);
  }
  for (auto& [tag, list] : tags_) {
    std::vector<Edge> relabeled;
    relabeled.reserve(list.size());
    for (const Edge& e : list) {
      VertexId a = new_id[e.u], b = new_id[e.v];
      relabeled.push_back({std::min(a, b), std::max(a, b)});
    }
    std::sort(relabeled.begin(), relabeled.end());
    relabeled.erase(std::unique(relabeled.begin(), relabeled.end()), relabeled.end());
    g.edge_tags_[tag] = std::move(relabeled);
  }
  g.family_ = std::move(family);
  return g;
}

void validate(const FiniteGraph& g) {
  const std::size_t n = g.num_vertices();
  require(n > 0, ErrorCode::invalid_graph, "empty graph");
  require(g.root() < n, ErrorCode::invalid_graph, "root out of range");
  for (VertexId u = 0; u < n; ++u) {
    auto nb = g.neighbors(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      require(nb[i] < n, ErrorCode::invalid_graph, "neighbor out of range");
      require(nb[i] != u, ErrorCode::invalid_graph, "self-loop");
      require(i == 0 || nb[i - 1] < nb[i], ErrorCode::invalid_graph, "unsorted or duplicate neighbors");
      require(g.adjacent(nb[i], u), ErrorCode::invalid_graph, "asymmetric adjacency");
    }
  }
  for (VertexId b : g.boundary()) require(b < n, ErrorCode::invalid_graph, "boundary out of range");
  auto dist = g.distances_from(g.root());
  require(std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; }), ErrorCode::invalid_graph,
          "graph is disconnected");
}

}  // namespace bslab
