#include "specsim/run.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "specsim/errors.hpp"
#include "specsim/serialize.hpp"
#include "specsim/version.hpp"

namespace specsim {

namespace fs = std::filesystem;
using nlohmann::json;

const char* kOutputRootEnvVar = "SPECSIM_OUT";

namespace {

std::string iso_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot open '" + path.string() + "'");
  out << text;
  if (!out) throw RuntimeFailure("failed writing '" + path.string() + "'");
}

// Environments are cheap to re-derive: replaying the per-sample seed
// reproduces the draw exactly (environment draws precede controller draws).
Environment replay_environment(const RunBundle& bundle, std::uint64_t seed) {
  Rng rng(seed);
  return bundle.space->sample(rng);
}

json sample_record(const RunBundle& bundle, const SampleEvaluation& s) {
  json rec;
  rec["index"] = s.index;
  rec["seed"] = hex64(s.seed);
  rec["env"] = replay_environment(bundle, s.seed).params;
  rec["controller"] = s.controller;
  rec["attempts"] = s.attempts;
  rec["d"] = s.d;
  if (s.sat_M.has_value()) rec["sat_M"] = *s.sat_M;
  if (s.sat_S.has_value()) rec["sat_S"] = *s.sat_S;
  return rec;
}

}  // namespace

std::string resolve_output_dir(const RunBundle& bundle,
                               const RunOptions& options) {
  if (!options.out_dir.empty()) return options.out_dir;
  const char* root = std::getenv(kOutputRootEnvVar);
  const std::string base = (root != nullptr && *root != '\0') ? root : "runs";
  return base + "/" + bundle.name + "-" + to_string(options.kind) + "-s" +
         std::to_string(options.seed);
}

RunResult run_estimate(const RunBundle& bundle, const RunOptions& options) {
  ScenarioConfig config;
  config.kind = options.kind;
  config.eps = options.eps.value_or(bundle.eps);
  config.beta = options.beta.value_or(bundle.beta);
  config.seed = options.seed;
  config.threads = options.threads;
  config.feasibility_cap = bundle.feasibility_cap;
  config.adaptive = options.adaptive;
  config.sample_count = options.sample_count;

  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = iso_utc_now();
  Estimate est = estimate(config, *bundle.space, *bundle.scheme,
                          *bundle.system, *bundle.abstraction,
                          bundle.norm_config, options.persist_samples);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["name"] = bundle.name;
  summary["kind"] = to_string(est.kind);
  summary["d_hat"] = est.d_hat;
  summary["n"] = est.n;
  summary["eps"] = est.eps;
  summary["beta"] = est.beta;
  summary["seed"] = hex64(est.seed);
  summary["adaptive"] = options.adaptive;
  summary["null_samples"] = est.null_samples;
  summary["violating_samples"] = est.violating_samples;
  summary["config_hash"] = hex64(fnv1a64(bundle.config.dump()));
  if (est.argmax_index >= 0) {
    const std::uint64_t argmax_seed =
        split_seed(est.seed, static_cast<std::uint64_t>(est.argmax_index));
    json arg;
    arg["index"] = est.argmax_index;
    arg["seed"] = hex64(argmax_seed);
    arg["env"] = replay_environment(bundle, argmax_seed).params;
    for (const SampleEvaluation& s : est.samples) {
      if (s.index == est.argmax_index) {
        arg["controller"] = s.controller;
        break;
      }
    }
    arg["d"] = est.d_hat;
    summary["argmax"] = arg;
  }

  RunResult result;
  result.summary = summary;
  if (!options.no_artifacts) {
    const fs::path dir = resolve_output_dir(bundle, options);
    fs::create_directories(dir);
    write_text(dir / "config.json", bundle.config.dump(2) + "\n");
    write_text(dir / "summary.json", summary.dump(2) + "\n");

    json meta;
    meta["version"] = kVersion;
    meta["started_at"] = started_at;
    meta["finished_at"] = iso_utc_now();
    meta["duration_seconds"] = seconds;
    meta["threads"] = options.threads;
    write_text(dir / "run_meta.json", meta.dump(2) + "\n");

    if (options.persist_samples) {
      std::ofstream out(dir / "samples.jsonl", std::ios::binary);
      if (!out) throw RuntimeFailure("cannot open samples.jsonl");
      for (const SampleEvaluation& s : est.samples) {
        out << sample_record(bundle, s).dump() << "\n";
      }
    }

    const fs::path vdir = dir / "violations";
    fs::remove_all(vdir);
    int written = 0;
    for (const SampleEvaluation& s : est.samples) {
      if (!s.has_trajectories || !s.sat_S.has_value() || *s.sat_S) continue;
      if (written >= options.max_violation_csvs) break;
      if (written == 0) fs::create_directories(vdir);
      const std::string stem = "sample-" + std::to_string(s.index);
      {
        std::ofstream out(vdir / (stem + "-system.csv"), std::ios::binary);
        write_trajectory_csv(out, s.traj_S);
      }
      {
        std::ofstream out(vdir / (stem + "-abstraction.csv"),
                          std::ios::binary);
        write_trajectory_csv(out, s.traj_M);
      }
      ++written;
    }
    result.out_dir = dir.string();
  }
  result.estimate = std::move(est);
  return result;
}

nlohmann::json run_validate(const RunBundle& bundle, double d_hat,
                            std::int64_t n, std::uint64_t seed, int threads,
                            const std::string& out_dir) {
  const ValidationResult v = validate_guarantee(
      d_hat, n, seed, *bundle.space, *bundle.scheme, *bundle.system,
      *bundle.abstraction, bundle.norm_config, bundle.feasibility_cap,
      threads);
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = bundle.name;
  doc["d_hat"] = v.d_hat;
  doc["n"] = v.n;
  doc["events"] = v.events;
  doc["fraction"] = v.fraction;
  doc["seed"] = hex64(seed);
  doc["config_hash"] = hex64(fnv1a64(bundle.config.dump()));
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "validation.json", doc.dump(2) + "\n");
  }
  return doc;
}

}  // namespace specsim
