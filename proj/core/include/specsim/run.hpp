#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "specsim/presets.hpp"
#include "specsim/scenario.hpp"

namespace specsim {

// Name of the environment variable holding the default artifact root.
extern const char* kOutputRootEnvVar;

struct RunOptions {
  MetricKind kind = MetricKind::SPEC;
  std::uint64_t seed = 0;
  int threads = 0;
  bool adaptive = false;
  std::optional<std::int64_t> sample_count;  // override N (testing only)
  std::optional<double> eps;                 // override bundle defaults
  std::optional<double> beta;
  bool persist_samples = false;  // also write samples.jsonl
  // Artifact directory; empty means "derive from the output root". Set
  // `no_artifacts` to skip writing entirely.
  std::string out_dir;
  bool no_artifacts = false;
  int max_violation_csvs = 200;
};

struct RunResult {
  Estimate estimate;
  nlohmann::json summary;  // canonical, byte-deterministic document
  std::string out_dir;     // empty when no artifacts were written
};

// <out>/<bundle-name>-<metric>-s<seed> under the root (the env var above,
// falling back to ./runs).
std::string resolve_output_dir(const RunBundle& bundle,
                               const RunOptions& options);

// Runs the estimator and writes config.json, summary.json, run_meta.json,
// optional samples.jsonl, and per-violation trajectory CSVs (capped).
// summary.json depends only on the config, metric, seed, and sample count —
// never on thread count or wall-clock — so repeated runs diff clean.
RunResult run_estimate(const RunBundle& bundle, const RunOptions& options);

// Fresh-batch check of the estimate's guarantee; writes validation.json into
// `out_dir` unless it is empty. Returns the canonical document.
nlohmann::json run_validate(const RunBundle& bundle, double d_hat,
                            std::int64_t n, std::uint64_t seed, int threads,
                            const std::string& out_dir);

}  // namespace specsim
