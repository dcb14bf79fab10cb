#include "bslab/export.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bslab/error.hpp"

namespace bslab {

using nlohmann::json;

namespace {

FamilySpec family_from_params(const std::string& name, const json& params) {
  FamilySpec f;
  try {
    f.family = parse_family(name);
  } catch (const Error&) {
    f.family = Family::custom;
  }
  auto num = [&](const char* key, int& field) {
    if (params.contains(key)) field = std::stoi(params[key].get<std::string>());
  };
  num("d", f.d);
  num("K", f.K);
  num("m", f.m);
  num("L", f.L);
  num("q", f.q);
  num("stretch", f.stretch);
  num("n", f.n);
  num("r", f.n);
  if (params.contains("dims")) {
    std::istringstream in(params["dims"].get<std::string>());
    std::string side;
    while (std::getline(in, side, 'x')) f.dims.push_back(std::stoi(side));
  }
  if (params.contains("periodic")) f.periodic = params["periodic"] == "true";
  if (params.contains("half_line")) f.half_line = params["half_line"] == "true";
  if (params.contains("base")) f.base = parse_family(params["base"].get<std::string>());
  return f;
}

}  // namespace

std::string graph_to_json(const FiniteGraph& g) {
  json j;
  j["family"] = family_name(g.family().family);
  json params = json::object();
  for (const auto& [k, v] : g.family().params()) params[k] = v;
  j["params"] = params;
  j["n_vertices"] = g.num_vertices();
  j["root"] = g.root();
  std::vector<VertexId> boundary(g.boundary().begin(), g.boundary().end());
  std::sort(boundary.begin(), boundary.end());
  j["boundary"] = boundary;
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
  j["edges"] = edges;
  json labels = json::object();
  for (const auto& [name, values] : g.labels()) labels[name] = values;
  j["labels"] = labels;
  json tags = json::object();
  for (const auto& [tag, list] : g.edge_tags()) {
    json t = json::array();
    for (const Edge& e : list) t.push_back({e.u, e.v});
    tags[tag] = t;
  }
  j["edge_tags"] = tags;
  return j.dump() + "\n";
}

FiniteGraph graph_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
    const std::size_t n = j.at("n_vertices").get<std::size_t>();
    GraphBuilder b(n);
    for (const auto& e : j.at("edges")) b.add_edge(e.at(0).get<VertexId>(), e.at(1).get<VertexId>());
    if (j.contains("edge_tags"))
      for (const auto& [tag, list] : j["edge_tags"].items())
        for (const auto& e : list) b.tag_edge(tag, e.at(0).get<VertexId>(), e.at(1).get<VertexId>());
    if (j.contains("labels"))
      for (const auto& [name, values] : j["labels"].items()) b.set_label(name, values.get<std::vector<std::int64_t>>());
    return std::move(b).build(j.at("root").get<VertexId>(), j.at("boundary").get<std::vector<VertexId>>(),
                               family_from_params(j.at("family").get<std::string>(), j.at("params")), false);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io_failure, std::string("malformed graph file: ") + e.what());
  }
}

void export_graph(const FiniteGraph& g, const std::string& path) { write_text_file(path, graph_to_json(g)); }

FiniteGraph import_graph(const std::string& path) { return graph_from_json(read_text_file(path)); }

std::string distribution_to_json(const NeighborhoodDist& dist) {
  std::map<std::string, double> by_hex;
  for (const auto& [sig, pr] : dist.probability) by_hex[signature_hex(sig)] += pr;
  json j;
  j["radius"] = dist.radius;
  j["provenance"] = dist.exact ? "exact" : "sampled";
  j["samples"] = dist.samples;
  json entries = json::array();
  for (const auto& [hex, pr] : by_hex) entries.push_back({{"signature", hex}, {"probability", pr}});
  j["distribution"] = entries;
  return j.dump(1) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io_failure, "cannot open " + path + " for writing");
  out << text;
  require(static_cast<bool>(out), ErrorCode::io_failure, "write to " + path + " failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io_failure, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace bslab
