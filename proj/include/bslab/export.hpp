#pragma once

#include <string>

#include "bslab/graph.hpp"
#include "bslab/limits.hpp"

namespace bslab {

/// JSON export: family, params, n_vertices, root, boundary (sorted), edges
/// (sorted [u, v] with u < v), labels. Byte-stable for a fixed graph.
std::string graph_to_json(const FiniteGraph& g);
FiniteGraph graph_from_json(const std::string& text);

void export_graph(const FiniteGraph& g, const std::string& path);
FiniteGraph import_graph(const std::string& path);

/// Structured-text export of a distribution: radius, provenance and
/// (signature hex, probability) pairs sorted by hex.
std::string distribution_to_json(const NeighborhoodDist& dist);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace bslab
