#pragma once

#include <string>
#include <vector>

#include "bslab/config.hpp"

namespace bslab {

struct OutputFile {
  std::string name;  // relative to the output directory
  std::string digest;
  std::size_t bytes = 0;
};

struct RunResult {
  std::string experiment;
  std::string out_dir;
  std::vector<OutputFile> files;  // manifest excluded
  std::string manifest;           // path of manifest.json
};

inline const char* kToolVersion = "0.1.0";

/// Validates the whole config, runs the named experiment and writes its CSV
/// and JSON outputs plus manifest.json into cfg "out". Every CSV starts with
/// a `# seed=...,config_digest=...` comment row.
RunResult run_experiment(const ExperimentConfig& cfg);

enum class QuestionKind { q1, q2 };

QuestionKind parse_question_kind(const std::string& name);

/// Side-by-side probe for one catalog pair (G-family, H-family):
///   q1: p_c of H against p_u of G;  q2: lambda_c of H against lambda_s of G.
/// Pairs: t3_canopy, z2_z2, t3z_canopyz, dl_horocyclic, z2edge_ball. The
/// dl_horocyclic q1 report adds the p_c(H) < 1 probe and the TV distance of
/// DL band truncations to the horocyclic reference.
RunResult question_report(QuestionKind kind, const ExperimentConfig& cfg);

}  // namespace bslab
