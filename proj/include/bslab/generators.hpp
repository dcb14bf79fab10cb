#pragma once

#include <vector>

#include "bslab/graph.hpp"

namespace bslab {

/// Ball of radius n around a vertex of the d-regular tree.
FiniteGraph tree_ball(int d, int n);

/// Box in Z^k with the given side lengths. Root is the center cell (floor of
/// (side-1)/2 per axis); boundary is every cell on a face, or empty when
/// periodic.
FiniteGraph grid_box(const std::vector<int>& dims, bool periodic = false);

/// Path 0..L rooted at 0 with boundary {L}: the truncation of N.
FiniteGraph half_line(int L);

/// Depth-K truncation of the canopy of T_d: the complete (d-1)-ary tree of
/// height K, rooted at its leftmost leaf, boundary = {apex}. Label "level"
/// counts up from the leaves.
FiniteGraph canopy(int d, int K);

/// Cartesian product. Edges coming from b are tagged "fiber".
FiniteGraph cartesian_product(const FiniteGraph& a, const FiniteGraph& b);
FiniteGraph cartesian_product(const FiniteGraph& a, const FiniteGraph& b, FamilySpec family);

/// Replaces every "fiber" edge by a path of `stretch` edges. The new internal
/// vertices are ordinary vertices (and ordinary percolation sites).
FiniteGraph stretch_fiber(const FiniteGraph& g, int stretch);

/// Band truncation of the Diestel-Leader graph DL(m, n).
///
/// A vertex of the (m+1)-regular tree is encoded by (height, index) where the
/// height decreases away from the fixed end and index enumerates the
/// vertices of that height below the band top, left to right; the root ray is
/// index 0. The second tree is encoded the same way. Vertices are pairs with
/// h1 + h2 = 0 and |h1| <= L; an edge moves one coordinate up and the other
/// down. Boundary is |h1| == L. Labels: "height" (h1), "x_index", "y_index".
FiniteGraph dl_ball(int m, int n, int L);

/// Horocyclic product of two canopy trees: an m-branching canopy and an
/// n-branching canopy, both of height 2L, paired by level1 + level2 = 2L.
/// The root pairs the level-L vertices on the root-leaf ancestor chains;
/// boundary = pairs with a coordinate at its canopy apex.
FiniteGraph horocyclic_canopy_product(int m, int n, int L);

/// Ball of radius r in the Cayley graph of Z^2 * Z/2 with generators
/// (+-1,0), (0,+-1), t. Edges labelled by t are tagged "cut".
FiniteGraph free_product_z2_edge_ball(int r);

/// Combinatorial ball of radius n in the {3,q} triangulation, grown layer by
/// layer. Label "layer" is the distance from the center.
FiniteGraph hyperbolic_ball(int q, int n);

/// Dispatches on spec.family.
FiniteGraph build_family(const FamilySpec& spec);

}  // namespace bslab
