// Command-line front end: estimate abstraction distances, validate their
// guarantees, export viability kernels, and sweep environment feasibility.
// Exit codes: 0 success, 1 runtime failure, 2 usage or config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specsim/errors.hpp"
#include "specsim/presets.hpp"
#include "specsim/reach.hpp"
#include "specsim/run.hpp"
#include "specsim/serialize.hpp"
#include "specsim/version.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonArgs {
  std::string preset;
  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  auto* preset = cmd->add_option("--preset", args->preset,
                                 "Built-in configuration name");
  auto* config = cmd->add_option("--config", args->config_path,
                                 "Path to a configuration file");
  preset->excludes(config);
  config->excludes(preset);
  cmd->add_option("--seed", args->seed, "Master seed")->capture_default_str();
  cmd->add_option("--threads", args->threads,
                  "Worker cap (0 = hardware concurrency); never changes "
                  "results")
      ->capture_default_str();
  cmd->add_option("--out", args->out_dir,
                  "Artifact directory (default: $SPECSIM_OUT or ./runs)");
}

specsim::RunBundle load(const CommonArgs& args) {
  const unsigned threads =
      args.threads > 0 ? static_cast<unsigned>(args.threads) : 0;
  if (!args.preset.empty()) return specsim::load_preset(args.preset, threads);
  if (!args.config_path.empty()) {
    return specsim::load_bundle_file(args.config_path, threads);
  }
  throw specsim::ConfigError("one of --preset or --config is required");
}

int cmd_estimate(const CommonArgs& common, const std::string& metric,
                 std::optional<double> eps, std::optional<double> beta,
                 std::optional<std::int64_t> samples, bool adaptive,
                 bool persist_samples) {
  specsim::RunBundle bundle = load(common);
  specsim::RunOptions options;
  options.kind = specsim::metric_from_string(metric);
  options.seed = common.seed;
  options.threads = common.threads;
  options.adaptive = adaptive;
  options.sample_count = samples;
  options.eps = eps;
  options.beta = beta;
  options.persist_samples = persist_samples;
  options.out_dir = common.out_dir;
  const specsim::RunResult result = specsim::run_estimate(bundle, options);
  std::cout << result.summary.dump(2) << "\n";
  std::cerr << "artifacts: " << result.out_dir << "\n";
  return 0;
}

int cmd_validate(const CommonArgs& common, double d_hat, std::int64_t n) {
  specsim::RunBundle bundle = load(common);
  specsim::RunOptions options;
  options.seed = common.seed;
  options.out_dir = common.out_dir;
  const std::string dir = specsim::resolve_output_dir(bundle, options);
  const json doc = specsim::run_validate(bundle, d_hat, n, common.seed,
                                         common.threads, dir);
  std::cout << doc.dump(2) << "\n";
  std::cerr << "artifacts: " << dir << "\n";
  return 0;
}

int cmd_kernel(const CommonArgs& common, double margin, int n0, int n1,
               int levels) {
  specsim::RunBundle bundle = load(common);
  if (bundle.abstraction->state_dim() != 2) {
    throw specsim::ConfigError(
        "kernel export requires a 2-state model (got " +
        std::to_string(bundle.abstraction->state_dim()) + " states)");
  }
  if (!bundle.abstraction->has_control_bounds() ||
      bundle.abstraction->control_dim() != 1) {
    throw specsim::ConfigError(
        "kernel export requires one bounded control input");
  }

  specsim::KernelGridSpec grid;
  if (bundle.kernel) {
    const specsim::Grid2D& g = bundle.kernel->grid();
    grid.lo0 = g.lo0;
    grid.hi0 = g.hi0;
    grid.lo1 = g.lo1;
    grid.hi1 = g.hi1;
  }
  grid.n0 = n0;
  grid.n1 = n1;

  const unsigned threads =
      common.threads > 0 ? static_cast<unsigned>(common.threads) : 0;
  auto [ulo, uhi] = bundle.abstraction->control_bounds();
  const auto controls = specsim::scalar_levels(ulo[0], uhi[0], levels);
  const specsim::SafetyKernel inner = specsim::compute_kernel(
      bundle.abstraction, bundle.avoid, margin, grid, controls,
      bundle.horizon, bundle.norm_config.norm, threads);
  const specsim::SafetyKernel outer = specsim::compute_kernel(
      bundle.system, bundle.avoid, 0.0, grid, controls, bundle.horizon,
      bundle.norm_config.norm, threads);
  const long violations =
      specsim::containment_violations(inner.grid(), outer.grid());

  specsim::RunOptions options;
  options.seed = common.seed;
  options.out_dir = common.out_dir;
  std::string dir = common.out_dir;
  if (dir.empty()) {
    const char* root = std::getenv(specsim::kOutputRootEnvVar);
    dir = std::string(root != nullptr && *root != '\0' ? root : "runs") + "/" +
          bundle.name + "-kernel";
  }
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "kernel-abstraction.csv",
                      std::ios::binary);
    specsim::export_kernel_csv(out, inner);
  }
  {
    std::ofstream out(fs::path(dir) / "kernel-system.csv", std::ios::binary);
    specsim::export_kernel_csv(out, outer);
  }
  json doc;
  doc["schema_version"] = specsim::kSchemaVersion;
  doc["name"] = bundle.name;
  doc["margin"] = margin;
  doc["grid_n0"] = n0;
  doc["grid_n1"] = n1;
  doc["violating_cells"] = violations;
  doc["contained"] = violations == 0;
  {
    std::ofstream out(fs::path(dir) / "kernel-containment.json",
                      std::ios::binary);
    out << doc.dump(2) << "\n";
  }
  char line[256];
  std::snprintf(line, sizeof(line),
                "kernel(abstraction,%.17g) within kernel(system,0): %s "
                "(violating cells: %ld)",
                margin, violations == 0 ? "true" : "false", violations);
  std::cout << line << "\n";
  std::cerr << "artifacts: " << dir << "\n";
  return 0;
}

int cmd_envset(const CommonArgs& common, const std::vector<double>& margins,
               std::int64_t n) {
  if (margins.empty()) {
    throw specsim::ConfigError("at least one --margin is required");
  }
  specsim::RunBundle bundle = load(common);
  std::string dir = common.out_dir;
  if (dir.empty()) {
    const char* root = std::getenv(specsim::kOutputRootEnvVar);
    dir = std::string(root != nullptr && *root != '\0' ? root : "runs") + "/" +
          bundle.name + "-envset";
  }
  fs::create_directories(dir);
  std::ofstream csv(fs::path(dir) / "envset.csv", std::ios::binary);
  if (!csv) throw specsim::RuntimeFailure("cannot open envset.csv");
  const std::string header = "d,fraction";
  std::cout << header << "\n";
  csv << header << "\n";
  for (double d : margins) {
    if (d < 0.0) throw specsim::ConfigError("margins must be nonnegative");
    const double fraction = specsim::estimate_safe_env_fraction(
        d, n, common.seed, *bundle.space, *bundle.scheme, *bundle.abstraction,
        bundle.norm_config, bundle.feasibility_cap, common.threads);
    char line[128];
    std::snprintf(line, sizeof(line), "%.17g,%.17g", d, fraction);
    std::cout << line << "\n";
    csv << line << "\n";
  }
  std::cerr << "artifacts: " << dir << "\n";
  return 0;
}

int cmd_presets(const std::string& show) {
  if (show.empty()) {
    for (const std::string& name : specsim::preset_names()) {
      std::cout << name << "\n";
    }
  } else {
    std::cout << specsim::preset_config(show).dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation-distance estimation between a black-box system "
               "and its abstraction under reach-avoid specifications"};
  app.set_version_flag("--version", specsim::kVersion);
  app.require_subcommand(1);

  int rc = 0;

  CommonArgs est_args;
  std::string est_metric = "spec";
  std::optional<double> est_eps, est_beta;
  std::optional<std::int64_t> est_samples;
  bool est_adaptive = false;
  bool est_persist = false;
  auto* est = app.add_subcommand(
      "estimate", "Scenario-based distance estimate with (eps, beta) "
                  "guarantee");
  add_common(est, &est_args);
  est->add_option("--metric", est_metric,
                  "ssm | ssm-feasible | ssm-falsifying | spec")
      ->capture_default_str();
  est->add_option("--eps", est_eps, "Violation level in (0,1)");
  est->add_option("--beta", est_beta, "Confidence level in (0,1)");
  est->add_option("--samples", est_samples,
                  "Override the sample count (testing only)");
  est->add_flag("--adaptive", est_adaptive,
                "Ratchet the feasibility margin to the running maximum "
                "(sequential)");
  est->add_flag("--persist-samples", est_persist,
                "Write per-sample records to samples.jsonl");
  est->callback([&] {
    rc = cmd_estimate(est_args, est_metric, est_eps, est_beta, est_samples,
                      est_adaptive, est_persist);
  });

  CommonArgs val_args;
  double val_d_hat = 0.0;
  std::int64_t val_n = 1000;
  auto* val = app.add_subcommand(
      "validate", "Fresh-batch check of an estimated margin's guarantee");
  add_common(val, &val_args);
  val->add_option("--d-hat", val_d_hat, "Estimated distance to validate")
      ->required();
  val->add_option("--n", val_n, "Batch size")->capture_default_str();
  val->callback([&] { rc = cmd_validate(val_args, val_d_hat, val_n); });

  CommonArgs ker_args;
  double ker_margin = 0.0;
  int ker_n0 = 201, ker_n1 = 201, ker_levels = 11;
  auto* ker = app.add_subcommand(
      "kernel", "Export viability kernels and report cellwise containment");
  add_common(ker, &ker_args);
  ker->add_option("--margin", ker_margin,
                  "Avoid-set expansion for the abstraction kernel")
      ->capture_default_str();
  ker->add_option("--n0", ker_n0, "Grid nodes, first axis")
      ->capture_default_str();
  ker->add_option("--n1", ker_n1, "Grid nodes, second axis")
      ->capture_default_str();
  ker->add_option("--levels", ker_levels, "Control discretization levels")
      ->capture_default_str();
  ker->callback(
      [&] { rc = cmd_kernel(ker_args, ker_margin, ker_n0, ker_n1, ker_levels); });

  CommonArgs env_args;
  std::vector<double> env_margins;
  std::int64_t env_n = 1000;
  auto* env = app.add_subcommand(
      "envset", "Fraction of environments feasible at given margins");
  add_common(env, &env_args);
  env->add_option("--margin", env_margins, "Margin (repeatable)")->required();
  env->add_option("--n", env_n, "Samples per margin")->capture_default_str();
  env->callback([&] { rc = cmd_envset(env_args, env_margins, env_n); });

  std::string presets_show;
  auto* pre = app.add_subcommand("presets", "List built-in configurations");
  pre->add_option("--show", presets_show, "Print one preset's config");
  pre->callback([&] { rc = cmd_presets(presets_show); });

  try {
    app.parse(argc, argv);
    return rc;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const specsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const specsim::DivergenceError& e) {
    std::cerr << "error: " << e.what() << " (step " << e.step();
    if (e.sample_index() >= 0) {
      std::cerr << ", sample " << e.sample_index() << ", seed "
                << specsim::hex64(e.sample_seed());
    }
    std::cerr << ")\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
