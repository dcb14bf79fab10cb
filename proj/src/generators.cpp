#include "bslab/generators.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "bslab/error.hpp"

namespace bslab {

namespace {

void check(bool ok, const std::string& what) { require(ok, ErrorCode::parameter_out_of_range, what); }

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

constexpr std::int64_t kMaxVertices = std::int64_t{1} << 31;

}  // namespace

FiniteGraph tree_ball(int d, int n) {
  check(d >= 3, "tree_ball needs d >= 3");
  check(n >= 0, "tree_ball needs n >= 0");
  check(n <= 40 && 1 + d * ipow(d - 1, std::min(n, 30)) < kMaxVertices, "tree_ball too large");

  GraphBuilder b(1);
  std::vector<std::int64_t> depth{0};
  std::vector<VertexId> frontier{0};
  for (int level = 1; level <= n; ++level) {
    std::vector<VertexId> next;
    for (VertexId u : frontier) {
      int children = (level == 1) ? d : d - 1;
      for (int c = 0; c < children; ++c) {
        VertexId w = b.add_vertex();
        b.add_edge(u, w);
        depth.push_back(level);
        next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  std::vector<VertexId> boundary = frontier;
  b.set_label("depth", std::move(depth));
  FamilySpec spec{.family = Family::tree_ball, .d = d, .n = n};
  return std::move(b).build(0, std::move(boundary), spec);
}

FiniteGraph grid_box(const std::vector<int>& dims, bool periodic) {
  check(!dims.empty(), "grid_box needs at least one dimension");
  std::int64_t total = 1;
  for (int side : dims) {
    check(side >= 1, "grid_box sides must be >= 1");
    total *= side;
    check(total < kMaxVertices, "grid_box too large");
  }
  const std::size_t k = dims.size();
  std::vector<std::int64_t> stride(k, 1);
  for (std::size_t i = 1; i < k; ++i) stride[i] = stride[i - 1] * dims[i - 1];

  GraphBuilder b(static_cast<std::size_t>(total));
  std::vector<std::vector<std::int64_t>> coords(k, std::vector<std::int64_t>(total));
  std::vector<VertexId> boundary;
  std::vector<int> x(k, 0);
  for (std::int64_t id = 0; id < total; ++id) {
    bool on_face = false;
    for (std::size_t i = 0; i < k; ++i) {
      coords[i][id] = x[i];
      if (x[i] == 0 || x[i] == dims[i] - 1) on_face = true;
      if (x[i] + 1 < dims[i]) {
        b.add_edge(static_cast<VertexId>(id), static_cast<VertexId>(id + stride[i]));
      } else if (periodic && dims[i] > 2) {
        b.add_edge(static_cast<VertexId>(id), static_cast<VertexId>(id - (dims[i] - 1) * stride[i]));
      }
    }
    if (on_face && !periodic) boundary.push_back(static_cast<VertexId>(id));
    for (std::size_t i = 0; i < k; ++i) {
      if (++x[i] < dims[i]) break;
      x[i] = 0;
    }
  }
  std::int64_t root = 0;
  for (std::size_t i = 0; i < k; ++i) root += ((dims[i] - 1) / 2) * stride[i];
  for (std::size_t i = 0; i < k; ++i) b.set_label("x" + std::to_string(i), std::move(coords[i]));
  FamilySpec spec{.family = Family::grid_box, .dims = dims, .periodic = periodic};
  return std::move(b).build(static_cast<VertexId>(root), std::move(boundary), spec);
}

FiniteGraph half_line(int L) {
  check(L >= 1, "half_line needs L >= 1");
  GraphBuilder b(static_cast<std::size_t>(L) + 1);
  std::vector<std::int64_t> pos(static_cast<std::size_t>(L) + 1);
  for (int i = 0; i <= L; ++i) {
    pos[i] = i;
    if (i < L) b.add_edge(i, i + 1);
  }
  b.set_label("x0", std::move(pos));
  FamilySpec spec{.family = Family::custom, .L = L, .half_line = true};
  return std::move(b).build(0, {static_cast<VertexId>(L)}, spec);
}

FiniteGraph canopy(int d, int K) {
  check(d >= 3, "canopy needs d >= 3");
  check(K >= 1, "canopy needs K >= 1");
  const int arity = d - 1;
  check(ipow(arity, std::min(K + 1, 40)) < kMaxVertices && K <= 40, "canopy too large");

  // Heap layout from the apex: children of i are arity*i + 1 .. arity*i + arity.
  std::int64_t total = 0;
  for (int l = 0; l <= K; ++l) total += ipow(arity, l);
  GraphBuilder b(static_cast<std::size_t>(total));
  std::vector<std::int64_t> level(total);
  std::int64_t first = 0;
  for (int depth = 0; depth <= K; ++depth) {
    std::int64_t count = ipow(arity, depth);
    for (std::int64_t i = first; i < first + count; ++i) {
      level[i] = K - depth;
      if (depth < K)
        for (int c = 1; c <= arity; ++c) b.add_edge(static_cast<VertexId>(i), static_cast<VertexId>(arity * i + c));
    }
    first += count;
  }
  const std::int64_t leftmost_leaf = total - ipow(arity, K);
  b.set_label("level", std::move(level));
  FamilySpec spec{.family = Family::canopy, .d = d, .K = K};
  return std::move(b).build(static_cast<VertexId>(leftmost_leaf), {0}, spec);
}

FiniteGraph cartesian_product(const FiniteGraph& a, const FiniteGraph& b) {
  return cartesian_product(a, b, FamilySpec{.family = Family::custom});
}

FiniteGraph cartesian_product(const FiniteGraph& a, const FiniteGraph& b, FamilySpec family) {
  const std::size_t na = a.num_vertices(), nb = b.num_vertices();
  check(static_cast<std::int64_t>(na) * static_cast<std::int64_t>(nb) < kMaxVertices, "product too large");
  auto id = [nb](VertexId u, VertexId v) { return static_cast<VertexId>(u * nb + v); };

  GraphBuilder out(na * nb);
  for (VertexId u = 0; u < na; ++u) {
    for (VertexId v = 0; v < nb; ++v) {
      for (VertexId w : a.neighbors(u))
        if (u < w) out.add_edge(id(u, v), id(w, v));
      for (VertexId w : b.neighbors(v))
        if (v < w) out.tag_edge("fiber", id(u, v), id(u, w));
    }
  }
  std::vector<VertexId> boundary;
  for (VertexId u = 0; u < na; ++u)
    for (VertexId v = 0; v < nb; ++v)
      if (a.is_boundary(u) || b.is_boundary(v)) boundary.push_back(id(u, v));

  for (const auto& [name, values] : a.labels()) {
    std::vector<std::int64_t> lifted(na * nb);
    for (VertexId u = 0; u < na; ++u)
      for (VertexId v = 0; v < nb; ++v) lifted[id(u, v)] = values[u];
    out.set_label(name, std::move(lifted));
  }
  std::vector<std::int64_t> fiber(na * nb);
  for (VertexId u = 0; u < na; ++u)
    for (VertexId v = 0; v < nb; ++v) fiber[id(u, v)] = v;
  out.set_label("fiber", std::move(fiber));
  return std::move(out).build(id(a.root(), b.root()), std::move(boundary), std::move(family));
}

FiniteGraph stretch_fiber(const FiniteGraph& g, int stretch) {
  check(stretch >= 1, "stretch must be >= 1");
  auto fiber = g.tagged_edges("fiber");
  require(!fiber.empty(), ErrorCode::no_fiber_edges, "graph has no fiber-tagged edges");

  const std::size_t n = g.num_vertices();
  GraphBuilder out(n);
  std::vector<Edge> fiber_sorted(fiber.begin(), fiber.end());
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId w : g.neighbors(u)) {
      if (u >= w) continue;
      if (std::binary_search(fiber_sorted.begin(), fiber_sorted.end(), Edge{u, w})) continue;
      out.add_edge(u, w);
    }
  }
  std::vector<VertexId> inserted_from;  // original endpoint u of each new vertex
  for (const Edge& e : fiber_sorted) {
    VertexId prev = e.u;
    for (int i = 1; i < stretch; ++i) {
      VertexId w = out.add_vertex();
      inserted_from.push_back(e.u);
      out.tag_edge("fiber", prev, w);
      prev = w;
    }
    out.tag_edge("fiber", prev, e.v);
  }
  const std::size_t total = out.num_vertices();
  for (const auto& [name, values] : g.labels()) {
    std::vector<std::int64_t> extended(values.begin(), values.end());
    extended.reserve(total);
    for (VertexId from : inserted_from) extended.push_back(name == "fiber" ? -1 : values[from]);
    out.set_label(name, std::move(extended));
  }
  std::vector<std::int64_t> subdivision(total, 0);
  std::fill(subdivision.begin() + static_cast<std::ptrdiff_t>(n), subdivision.end(), 1);
  out.set_label("subdivision", std::move(subdivision));

  FamilySpec spec = g.family();
  if (spec.family == Family::product) spec.family = Family::stretched_product;
  spec.stretch = stretch * (g.family().family == Family::stretched_product ? g.family().stretch : 1);
  std::vector<VertexId> boundary(g.boundary().begin(), g.boundary().end());
  return std::move(out).build(g.root(), std::move(boundary), spec);
}

FiniteGraph dl_ball(int m, int n, int L) {
  check(m >= 1 && n >= 1, "dl_ball needs m, n >= 1");
  check(L >= 1, "dl_ball needs L >= 1");
  // Layer h in [-L, L] holds m^(L-h) * n^(L+h) pairs.
  std::vector<std::int64_t> offset(2 * L + 2, 0);
  auto x_count = [&](int h) { return ipow(m, L - h); };
  auto y_count = [&](int h) { return ipow(n, L + h); };
  for (int h = -L; h <= L; ++h) {
    std::int64_t layer = x_count(h) * y_count(h);
    check(layer < kMaxVertices, "dl_ball too large");
    offset[h + L + 1] = offset[h + L] + layer;
    check(offset[h + L + 1] < kMaxVertices, "dl_ball too large");
  }
  auto id = [&](int h, std::int64_t i, std::int64_t j) {
    return static_cast<VertexId>(offset[h + L] + i * y_count(h) + j);
  };

  const std::int64_t total = offset.back();
  GraphBuilder b(static_cast<std::size_t>(total));
  std::vector<std::int64_t> height(total), xi(total), yj(total);
  std::vector<VertexId> boundary;
  for (int h = -L; h <= L; ++h) {
    for (std::int64_t i = 0; i < x_count(h); ++i) {
      for (std::int64_t j = 0; j < y_count(h); ++j) {
        VertexId v = id(h, i, j);
        height[v] = h;
        xi[v] = i;
        yj[v] = j;
        if (h == L || h == -L) boundary.push_back(v);
        // x moves up (towards its end), y moves down into one of n children.
        if (h < L)
          for (int c = 0; c < n; ++c) b.add_edge(v, id(h + 1, i / m, j * n + c));
      }
    }
  }
  b.set_label("height", std::move(height));
  b.set_label("x_index", std::move(xi));
  b.set_label("y_index", std::move(yj));
  FamilySpec spec{.family = Family::dl_ball, .n = n, .m = m, .L = L};
  return std::move(b).build(id(0, 0, 0), std::move(boundary), spec);
}

FiniteGraph horocyclic_canopy_product(int m, int n, int L) {
  check(m >= 1 && n >= 1, "horocyclic_canopy_product needs m, n >= 1");
  check(L >= 1, "horocyclic_canopy_product needs L >= 1");
  const int height = 2 * L;

  // Explicit canopy trees: vertices listed per level, with parent links.
  struct Canopy {
    std::vector<std::vector<std::int64_t>> parent;  // parent[level][k]
    std::vector<std::vector<std::vector<std::int64_t>>> children;
  };
  auto make = [&](int arity) {
    Canopy c;
    c.parent.resize(height + 1);
    c.children.resize(height + 1);
    for (int level = height; level >= 0; --level) {
      std::int64_t count = ipow(arity, height - level);
      check(count < kMaxVertices, "horocyclic_canopy_product too large");
      c.parent[level].assign(count, -1);
      c.children[level].assign(count, {});
      if (level < height)
        for (std::int64_t k = 0; k < count; ++k) {
          std::int64_t p = k / arity;
          c.parent[level][k] = p;
          c.children[level + 1][p].push_back(k);
        }
    }
    return c;
  };
  const Canopy first = make(m), second = make(n);

  std::vector<std::int64_t> offset(height + 2, 0);
  for (int l1 = 0; l1 <= height; ++l1) {
    std::int64_t layer = static_cast<std::int64_t>(first.parent[l1].size()) *
                         static_cast<std::int64_t>(second.parent[height - l1].size());
    offset[l1 + 1] = offset[l1] + layer;
    check(offset[l1 + 1] < kMaxVertices, "horocyclic_canopy_product too large");
  }
  auto id = [&](int l1, std::int64_t x, std::int64_t y) {
    return static_cast<VertexId>(offset[l1] + x * static_cast<std::int64_t>(second.parent[height - l1].size()) + y);
  };

  const std::int64_t total = offset.back();
  GraphBuilder b(static_cast<std::size_t>(total));
  std::vector<std::int64_t> level1(total), level2(total);
  std::vector<VertexId> boundary;
  for (int l1 = 0; l1 <= height; ++l1) {
    const int l2 = height - l1;
    for (std::int64_t x = 0; x < static_cast<std::int64_t>(first.parent[l1].size()); ++x) {
      for (std::int64_t y = 0; y < static_cast<std::int64_t>(second.parent[l2].size()); ++y) {
        VertexId v = id(l1, x, y);
        level1[v] = l1;
        level2[v] = l2;
        if (l1 == height || l2 == height) boundary.push_back(v);
        // First coordinate up to its parent, second down to each child.
        if (l1 < height)
          for (std::int64_t child : second.children[l2][y]) b.add_edge(v, id(l1 + 1, first.parent[l1][x], child));
      }
    }
  }
  // The root-leaf ancestor chain is index 0 at every level.
  b.set_label("level1", std::move(level1));
  b.set_label("level2", std::move(level2));
  FamilySpec spec{.family = Family::horocyclic_canopy, .n = n, .m = m, .L = L};
  return std::move(b).build(id(L, 0, 0), std::move(boundary), spec);
}

FiniteGraph free_product_z2_edge_ball(int r) {
  check(r >= 1, "free_product_z2_edge_ball needs r >= 1");
  check(r <= 16, "free_product_z2_edge_ball radius too large");

  // Tokens are kept in a parallel structure to avoid ambiguity in the flat
  // encoding: kinds[i] == 0 for t, 1 for a lattice element.
  struct Element {
    std::vector<std::uint8_t> kinds;
    std::vector<std::pair<int, int>> lattice;  // one entry per lattice token
    auto operator<=>(const Element&) const = default;
  };
  const int steps[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

  std::map<Element, VertexId> index;
  std::vector<Element> elements;
  std::vector<int> dist;
  GraphBuilder b;
  auto intern = [&](Element e, int d) -> std::pair<VertexId, bool> {
    auto [it, inserted] = index.try_emplace(std::move(e), 0);
    if (inserted) {
      it->second = b.add_vertex();
      elements.push_back(it->first);
      dist.push_back(d);
    }
    return {it->second, inserted};
  };

  intern(Element{}, 0);
  for (std::size_t head = 0; head < elements.size(); ++head) {
    if (dist[head] == r) continue;
    const Element cur = elements[head];
    const VertexId u = static_cast<VertexId>(head);
    for (const auto& s : steps) {
      Element next = cur;
      if (!next.kinds.empty() && next.kinds.back() == 1) {
        auto& last = next.lattice.back();
        last.first += s[0];
        last.second += s[1];
        if (last == std::pair{0, 0}) {
          next.lattice.pop_back();
          next.kinds.pop_back();
        }
      } else {
        next.kinds.push_back(1);
        next.lattice.emplace_back(s[0], s[1]);
      }
      VertexId v = intern(std::move(next), dist[head] + 1).first;
      b.add_edge(u, v);
    }
    Element next = cur;
    if (!next.kinds.empty() && next.kinds.back() == 0) next.kinds.pop_back();
    else next.kinds.push_back(0);
    VertexId v = intern(std::move(next), dist[head] + 1).first;
    b.tag_edge("cut", u, v);
  }
  std::vector<VertexId> boundary;
  std::vector<std::int64_t> depth(dist.begin(), dist.end()), t_letters(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (dist[i] == r) boundary.push_back(static_cast<VertexId>(i));
    t_letters[i] = std::count(elements[i].kinds.begin(), elements[i].kinds.end(), 0);
  }
  b.set_label("depth", std::move(depth));
  b.set_label("t_letters", std::move(t_letters));
  FamilySpec spec{.family = Family::free_product_z2_edge, .n = r};
  return std::move(b).build(0, std::move(boundary), spec);
}

FiniteGraph hyperbolic_ball(int q, int n) {
  check(q >= 7, "hyperbolic_ball needs q >= 7");
  check(n >= 0, "hyperbolic_ball needs n >= 0");

  GraphBuilder b(1);
  std::vector<std::int64_t> layer_of{0};
  if (n == 0) {
    b.set_label("layer", std::move(layer_of));
    return std::move(b).build(0, {0}, FamilySpec{.family = Family::hyperbolic_ball, .n = 0, .q = q});
  }
  // Current layer as a cycle, with the number of neighbors each vertex has
  // in the previous layer.
  std::vector<VertexId> cycle;
  std::vector<int> back;
  for (int i = 0; i < q; ++i) {
    VertexId v = b.add_vertex();
    layer_of.push_back(1);
    b.add_edge(0, v);
    cycle.push_back(v);
    back.push_back(1);
  }
  for (int k = 1;; ++k) {
    for (std::size_t i = 0; i < cycle.size(); ++i) b.add_edge(cycle[i], cycle[(i + 1) % cycle.size()]);
    if (k == n) break;
    check(cycle.size() < (std::size_t{1} << 28), "hyperbolic_ball too large");

    // Each vertex v_i needs q - back_i - 2 outward neighbors; consecutive
    // vertices share one, which closes the triangle v_i v_{i+1} s_{i+1}.
    const std::size_t M = cycle.size();
    std::vector<VertexId> shared(M);
    for (std::size_t i = 0; i < M; ++i) {
      shared[i] = b.add_vertex();
      layer_of.push_back(k + 1);
    }
    std::vector<VertexId> next;
    std::vector<int> next_back;
    for (std::size_t i = 0; i < M; ++i) {
      const int outward = q - back[i] - 2;
      check(outward >= 2, "hyperbolic layering failed");
      VertexId first = shared[i];
      VertexId last = shared[(i + 1) % M];
      b.add_edge(cycle[i], first);
      next.push_back(first);
      next_back.push_back(2);
      for (int p = 0; p < outward - 2; ++p) {
        VertexId w = b.add_vertex();
        layer_of.push_back(k + 1);
        b.add_edge(cycle[i], w);
        next.push_back(w);
        next_back.push_back(1);
      }
      b.add_edge(cycle[i], last);
    }
    // shared[0] was counted as adjacent to cycle[M-1] and cycle[0].
    cycle = std::move(next);
    back = std::move(next_back);
  }
  std::vector<VertexId> boundary(cycle.begin(), cycle.end());
  b.set_label("layer", std::move(layer_of));
  return std::move(b).build(0, std::move(boundary), FamilySpec{.family = Family::hyperbolic_ball, .n = n, .q = q});
}

FiniteGraph build_family(const FamilySpec& spec) {
  switch (spec.family) {
    case Family::tree_ball: return tree_ball(spec.d, spec.n);
    case Family::grid_box: return grid_box(spec.dims, spec.periodic);
    case Family::canopy: return canopy(spec.d, spec.K);
    case Family::product:
    case Family::stretched_product: {
      check(spec.base == Family::tree_ball || spec.base == Family::canopy,
            "product base must be tree_ball or canopy");
      FiniteGraph base = spec.base == Family::canopy ? canopy(spec.d, spec.K) : tree_ball(spec.d, spec.n);
      const int L = spec.L == 0 ? spec.size() : spec.L;
      check(L >= 1, "product path length must be >= 1");
      FiniteGraph path = spec.half_line ? half_line(L) : grid_box({2 * L + 1});
      FamilySpec product_spec = spec;
      product_spec.family = Family::product;
      product_spec.stretch = 1;
      FiniteGraph g = cartesian_product(base, path, product_spec);
      if (spec.family == Family::product) return g;
      check(spec.stretch >= 1, "stretch must be >= 1");
      return stretch_fiber(g, spec.stretch);
    }
    case Family::dl_ball: return dl_ball(spec.m, spec.n, spec.L);
    case Family::horocyclic_canopy: return horocyclic_canopy_product(spec.m, spec.n, spec.L);
    case Family::free_product_z2_edge: return free_product_z2_edge_ball(spec.n);
    case Family::hyperbolic_ball: return hyperbolic_ball(spec.q, spec.n);
    case Family::custom: break;
  }
  throw Error(ErrorCode::parameter_out_of_range, "cannot build family " + family_name(spec.family));
}

}  // namespace bslab
