#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bslab/graph.hpp"

namespace bslab {

/// One documented configuration key.
struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string doc;
};

/// Every key accepted in a config file, with its default.
const std::vector<ConfigKey>& config_keys();

/// Flat key = value configuration. Lines are `key = value`; `#` starts a
/// comment. Unknown keys and repeated keys are config_invalid errors.
class ExperimentConfig {
 public:
  ExperimentConfig();

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  bool is_default(const std::string& key) const;

  std::string get_string(const std::string& key) const { return get(key); }
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;
  /// Comma list, or lo:hi:step (inclusive, rounded to 1e-9).
  std::vector<double> get_grid(const std::string& key) const;

  FamilySpec family() const;

  /// All keys, sorted, one `key = value` per line.
  std::string canonical_text() const;
  /// Digest of the canonical text without the keys that cannot change
  /// results (threads, out).
  std::string digest() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> explicit_;
};

/// 64-bit FNV-1a digest as 16 hex digits.
std::string content_digest(const std::string& bytes);

}  // namespace bslab
