#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bslab {

using VertexId = std::uint32_t;

struct Edge {
  VertexId u;
  VertexId v;
  auto operator<=>(const Edge&) const = default;
};

enum class Family {
  tree_ball,
  grid_box,
  canopy,
  product,
  stretched_product,
  dl_ball,
  horocyclic_canopy,
  free_product_z2_edge,
  hyperbolic_ball,
  custom,
};

std::string family_name(Family family);
Family parse_family(const std::string& name);

/// Parameters of a generator family. Which fields are meaningful depends on
/// the family:
///   tree_ball            d, n (radius)
///   grid_box             dims, periodic
///   canopy               d, K (height)
///   product              base (tree_ball: d, n | canopy: d, K) x path with
///                        half-length L; half_line puts the root at the path
///                        end (the N-truncation) instead of the middle (Z)
///   stretched_product    as product, fiber edges subdivided into stretch edges
///   dl_ball              m, n, L (height band)
///   horocyclic_canopy    m, n, L
///   free_product_z2_edge n (radius)
///   hyperbolic_ball      q, n (radius)
/// L == 0 on a product means "same as the base size".
struct FamilySpec {
  Family family = Family::custom;
  int d = 3;
  int n = 0;
  int K = 0;
  int m = 0;
  int L = 0;
  int stretch = 1;
  int q = 7;
  std::vector<int> dims;
  bool periodic = false;
  Family base = Family::tree_ball;
  bool half_line = false;

  /// Parameters that matter for this family, in a fixed order.
  std::vector<std::pair<std::string, std::string>> params() const;
  std::string describe() const;
  /// Template instantiation: sets the size parameter of the family.
  FamilySpec with_size(int size) const;
  /// The size parameter this spec was instantiated with.
  int size() const;
};

/// Immutable rooted finite graph in compressed sparse row form. Vertex ids are
/// assigned in BFS order from the root by GraphBuilder.
class FiniteGraph {
 public:
  FiniteGraph() = default;

  std::size_t num_vertices() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return neighbors_.size() / 2; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool adjacent(VertexId u, VertexId v) const;

  VertexId root() const { return root_; }
  std::span<const VertexId> boundary() const { return boundary_; }
  bool is_boundary(VertexId v) const { return boundary_mask_[v] != 0; }

  const FamilySpec& family() const { return family_; }
  const std::map<std::string, std::vector<std::int64_t>>& labels() const { return labels_; }
  const std::map<std::string, std::vector<Edge>>& edge_tags() const { return edge_tags_; }
  std::span<const Edge> tagged_edges(const std::string& tag) const;

  /// All edges with u < v, sorted.
  std::vector<Edge> edges() const;

  /// Hop distances from a source; unreachable vertices get -1.
  std::vector<int> distances_from(VertexId source) const;

 private:
  friend class GraphBuilder;

  std::vector<std::size_t> offsets_;
  std::vector<VertexId> neighbors_;
  VertexId root_ = 0;
  std::vector<VertexId> boundary_;
  std::vector<std::uint8_t> boundary_mask_;
  FamilySpec family_;
  std::map<std::string, std::vector<std::int64_t>> labels_;
  std::map<std::string, std::vector<Edge>> edge_tags_;
};

/// Collects an undirected edge list and produces a validated FiniteGraph.
/// Duplicate edges are merged; self-loops are rejected.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t num_vertices = 0);

  VertexId add_vertex();
  std::size_t num_vertices() const { return num_vertices_; }
  void add_edge(VertexId u, VertexId v);
  void tag_edge(const std::string& tag, VertexId u, VertexId v);
  void set_label(const std::string& name, std::vector<std::int64_t> values);

  /// Validates (symmetry, connectivity, root/boundary ranges) and, when
  /// relabel is set, renumbers vertices in BFS order from the root.
  FiniteGraph build(VertexId root, std::vector<VertexId> boundary, FamilySpec family,
                    bool relabel = true) &&;

 private:
  std::size_t num_vertices_;
  std::vector<Edge> edges_;
  std::map<std::string, std::vector<Edge>> tags_;
  std::map<std::string, std::vector<std::int64_t>> labels_;
};

/// Checks the structural invariants of a graph and throws invalid_graph on
/// the first violation.
void validate(const FiniteGraph& g);

}  // namespace bslab
