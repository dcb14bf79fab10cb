#include "bslab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bslab/error.hpp"
#include "bslab/export.hpp"
#include "bslab/rng.hpp"

namespace bslab {

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"experiment", "generate", "generate | bslimit | theta | pc | pu | tau | clusters | contact | walk | question"},
      {"family", "tree_ball", "graph family"},
      {"d", "3", "tree degree"},
      {"n", "2", "radius (tree_ball, free_product_z2_edge, hyperbolic_ball); second branching (dl_ball, horocyclic_canopy)"},
      {"K", "3", "canopy height"},
      {"m", "3", "first branching (dl_ball, horocyclic_canopy)"},
      {"L", "0", "height band (dl_ball, horocyclic_canopy); path half-length of products, 0 = base size"},
      {"stretch", "1", "fiber stretch of stretched_product"},
      {"q", "7", "vertex degree of hyperbolic_ball"},
      {"dims", "16,16", "grid side lengths"},
      {"periodic", "false", "periodic grid"},
      {"base", "tree_ball", "product base: tree_ball | canopy"},
      {"half_line", "false", "product path rooted at its end (N) instead of its middle (Z)"},
      {"sizes", "", "size sequence for estimators; empty = the family's own size"},
      {"seed", "1", "master seed"},
      {"threads", "1", "worker threads (never changes results)"},
      {"out", "out", "output directory"},
      {"replicas", "1000", "replicas"},
      {"p_grid", "0:1:0.05", "p grid: comma list or lo:hi:step"},
      {"lambda_grid", "0.2:4:0.1", "infection rate grid"},
      {"radius", "2", "neighborhood radius (bslimit)"},
      {"samples", "0", "sampled root count (bslimit); 0 = exact enumeration"},
      {"reference", "none", "bslimit reference: none | canopy | horocyclic"},
      {"reference_cutoff", "0", "canopy reference level cutoff; 0 = smallest admissible"},
      {"reference_size", "5", "horocyclic reference band L"},
      {"cauchy_threshold", "0.05", "TV step above which consecutive sizes are flagged"},
      {"observable", "boundary_mass", "pc crossing observable: boundary_mass | root_boundary | largest"},
      {"level", "0.5", "crossing level (pc, contact)"},
      {"batches", "20", "bootstrap batches (pc)"},
      {"bootstrap", "200", "bootstrap resamples"},
      {"size", "0", "single size for pu; 0 = the family's own size"},
      {"d_max", "8", "largest pair distance (pu, tau)"},
      {"buffer", "0", "bulk buffer (pu, tau, question); 0 = d_max or the pair default"},
      {"pairs_per_distance", "100", "sampled pairs per distance (pu, tau)"},
      {"p", "0.5", "occupation probability (tau, clusters)"},
      {"s_min", "1", "smallest counted cluster (clusters)"},
      {"fit_lo", "0", "decay fit window start (tau)"},
      {"fit_hi", "-1", "decay fit window end (tau); -1 = d_max"},
      {"horizon", "0", "contact horizon for a single graph; 0 = horizon_per_size * size"},
      {"horizon_per_size", "2", "contact horizon per unit size"},
      {"walk_method", "exact", "walk: exact | mc | profile"},
      {"floor", "0.1", "transience verdict floor"},
      {"trend_window", "3", "transience trend window"},
      {"kind", "q1", "question: q1 | q2"},
      {"pair", "t3_canopy", "question pair: t3_canopy | z2_z2 | t3z_canopyz | dl_horocyclic | z2edge_ball"},
      {"g_sizes", "", "question: G-family sizes; empty = pair default"},
      {"h_sizes", "", "question: H-family sizes; empty = pair default"},
      {"pu_size", "0", "question: G-family size for p_u; 0 = pair default"},
  };
  return keys;
}

ExperimentConfig::ExperimentConfig() {
  for (const auto& k : config_keys()) {
    values_[k.name] = k.default_value;
    explicit_[k.name] = false;
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::config_invalid, "field '" + key + "': " + what);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) invalid(key, "cannot parse '" + text + "'");
  return value;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::map<std::string, int> seen;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::config_invalid, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (seen.count(key)) invalid(key, "repeated on line " + std::to_string(line_no));
    seen[key] = line_no;
    cfg.set(key, trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) { return parse(read_text_file(path)); }

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (!values_.count(key)) invalid(key, "unknown key");
  values_[key] = value;
  explicit_[key] = true;
}

const std::string& ExperimentConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) invalid(key, "unknown key");
  return it->second;
}

bool ExperimentConfig::is_default(const std::string& key) const {
  get(key);
  return !explicit_.at(key);
}

int ExperimentConfig::get_int(const std::string& key) const { return parse_number<int>(key, get(key)); }

std::uint64_t ExperimentConfig::get_u64(const std::string& key) const {
  return parse_number<std::uint64_t>(key, get(key));
}

double ExperimentConfig::get_double(const std::string& key) const {
  const double v = parse_number<double>(key, get(key));
  if (!std::isfinite(v)) invalid(key, "not finite");
  return v;
}

bool ExperimentConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  invalid(key, "expected true or false, got '" + v + "'");
}

std::vector<int> ExperimentConfig::get_int_list(const std::string& key) const {
  std::vector<int> out;
  if (trim(get(key)).empty()) return out;
  for (const auto& item : split(get(key), ',')) out.push_back(parse_number<int>(key, item));
  return out;
}

std::vector<double> ExperimentConfig::get_grid(const std::string& key) const {
  const std::string& v = get(key);
  std::vector<double> out;
  if (v.find(':') != std::string::npos) {
    const auto parts = split(v, ':');
    if (parts.size() != 3) invalid(key, "expected lo:hi:step");
    const double lo = parse_number<double>(key, parts[0]);
    const double hi = parse_number<double>(key, parts[1]);
    const double step = parse_number<double>(key, parts[2]);
    if (!(step > 0) || hi < lo) invalid(key, "need step > 0 and hi >= lo");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(std::round((lo + step * i) * 1e9) / 1e9);
  } else {
    for (const auto& item : split(v, ',')) out.push_back(parse_number<double>(key, item));
  }
  if (out.empty()) invalid(key, "empty grid");
  return out;
}

FamilySpec ExperimentConfig::family() const {
  FamilySpec f;
  try {
    f.family = parse_family(get("family"));
  } catch (const Error&) {
    invalid("family", "unknown family '" + get("family") + "'");
  }
  if (f.family == Family::custom) invalid("family", "custom graphs cannot be generated");
  f.d = get_int("d");
  f.n = get_int("n");
  f.K = get_int("K");
  f.m = get_int("m");
  f.L = get_int("L");
  f.stretch = get_int("stretch");
  f.q = get_int("q");
  f.dims = get_int_list("dims");
  f.periodic = get_bool("periodic");
  try {
    f.base = parse_family(get("base"));
  } catch (const Error&) {
    invalid("base", "unknown family '" + get("base") + "'");
  }
  f.half_line = get_bool("half_line");
  return f;
}

std::string ExperimentConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::string ExperimentConfig::digest() const {
  std::string text;
  for (const auto& [k, v] : values_)
    if (k != "threads" && k != "out") text += k + " = " + v + "\n";
  return content_digest(text);
}

std::string content_digest(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(label_hash(bytes)));
  return buf;
}

}  // namespace bslab
