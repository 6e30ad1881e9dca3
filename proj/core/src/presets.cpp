#include "specsim/presets.hpp"

#include <fstream>
#include <memory>
#include <utility>

#include "specsim/errors.hpp"
#include "specsim/serialize.hpp"

namespace specsim {

namespace {

using nlohmann::json;

// Two linear models that differ only in how strongly the control leaks into
// the second (uncontrollable-in-the-system) coordinate; LQR tracking of a
// sampled target interval.
constexpr const char* kRunningExample = R"json({
  "name": "running-example",
  "system": {"type": "linear", "A": [[2.0, 0.0], [0.0, 0.1]], "B": [[1.0], [0.0]]},
  "abstraction": {"type": "linear", "A": [[2.0, 0.0], [0.0, 0.1]], "B": [[1.0], [0.1]]},
  "horizon": 20,
  "environments": {
    "type": "box",
    "x0": {"lo": [0.0, 0.0], "hi": [0.0, 0.0]},
    "avoid": {"type": "empty"},
    "reach": {"type": "all"},
    "terminal": {"center": [0.0, 0.0], "varying": [0], "lo": [-4.0], "hi": [4.0], "radius": 0.5}
  },
  "scheme": {"type": "lqr", "q_lo": 0.1, "q_hi": 100.0},
  "distance": {"kind": "euclidean"},
  "estimation": {"eps": 0.01, "beta": 1e-06, "feasibility_cap": 100}
})json";

// Vertical quadrotor that must hold altitude inside a corridor; the
// abstraction underestimates the thrust gain, so it is conservative and the
// containment direction is clean.
constexpr const char* kQuadConservative = R"json({
  "name": "quadrotor-conservative",
  "system": {"type": "quadrotor-vertical", "k": 15.0},
  "abstraction": {"type": "quadrotor-vertical", "k": 14.0},
  "horizon": 100,
  "environments": {
    "type": "box",
    "x0": {"lo": [0.5, -3.0], "hi": [2.5, 4.0]},
    "avoid": {"type": "complement", "inner": {"type": "box", "lo": [0.5], "hi": [2.5]}, "coords": [0]},
    "reach": {"type": "all"}
  },
  "scheme": {
    "type": "least-restrictive",
    "levels": 11,
    "grid": {"lo": [0.0, -4.0], "hi": [3.0, 4.0], "n": [81, 81]}
  },
  "distance": {"kind": "euclidean", "coords": [0]},
  "estimation": {"eps": 0.01, "beta": 1e-06, "feasibility_cap": 100}
})json";

// Same corridor task with the gain mismatch flipped: the abstraction is
// stronger than the system, so abstraction-feasible controllers can push the
// real vehicle out of the corridor and the distance estimate is positive.
constexpr const char* kQuadOptimistic = R"json({
  "name": "quadrotor-optimistic",
  "system": {"type": "quadrotor-vertical", "k": 26.0},
  "abstraction": {"type": "quadrotor-vertical", "k": 28.0},
  "horizon": 100,
  "environments": {
    "type": "box",
    "x0": {"lo": [0.5, -3.0], "hi": [2.5, 4.0]},
    "avoid": {"type": "complement", "inner": {"type": "box", "lo": [0.5], "hi": [2.5]}, "coords": [0]},
    "reach": {"type": "all"}
  },
  "scheme": {
    "type": "least-restrictive",
    "levels": 11,
    "grid": {"lo": [0.0, -4.0], "hi": [3.0, 4.0], "n": [101, 101]}
  },
  "distance": {"kind": "euclidean", "coords": [0]},
  "estimation": {"eps": 0.01, "beta": 1e-06, "feasibility_cap": 100}
})json";

// Lane keeping with mismatched wheelbases under random open-loop inputs: a
// small raw-distance demo on a 4-state model.
constexpr const char* kBicycleDemo = R"json({
  "name": "bicycle-demo",
  "system": {"type": "kinematic-bicycle", "wheelbase": 2.5},
  "abstraction": {"type": "kinematic-bicycle", "wheelbase": 3.2},
  "horizon": 60,
  "environments": {
    "type": "box",
    "x0": {"lo": [0.0, -0.5, -0.2, 1.0], "hi": [0.0, 0.5, 0.2, 2.5]},
    "avoid": {"type": "complement", "inner": {"type": "box", "lo": [-1.5], "hi": [1.5]}, "coords": [1]},
    "reach": {"type": "all"}
  },
  "scheme": {"type": "uniform-sequence"},
  "distance": {"kind": "euclidean", "coords": [0, 1]},
  "estimation": {"eps": 0.05, "beta": 0.001, "feasibility_cap": 100}
})json";

std::vector<int> ints_from_json(const json& j, const std::string& context) {
  if (!j.is_array()) throw ConfigError(context + ": expected an array");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) {
      throw ConfigError(context + ": expected integers");
    }
    out.push_back(v.get<int>());
  }
  return out;
}

EnvironmentSpacePtr build_space(const json& ej, const std::string& name,
                                int horizon, SetExpr* avoid_out) {
  check_keys(ej, {"type", "x0", "avoid", "reach", "terminal"}, "environments");
  const std::string type = ej.at("type").get<std::string>();
  if (type != "box") {
    throw ConfigError("environments: unknown type '" + type + "'");
  }
  const json& x0j = ej.at("x0");
  check_keys(x0j, {"lo", "hi"}, "environments.x0");
  Eigen::VectorXd lo = vector_from_json(x0j.at("lo"), "x0 lo");
  Eigen::VectorXd hi = vector_from_json(x0j.at("hi"), "x0 hi");

  SetExpr avoid =
      ej.contains("avoid") ? set_from_json(ej.at("avoid")) : SetExpr::empty();
  SetExpr reach =
      ej.contains("reach") ? set_from_json(ej.at("reach")) : SetExpr::all();
  *avoid_out = avoid;

  std::optional<TerminalBall> terminal;
  if (ej.contains("terminal")) {
    const json& tj = ej.at("terminal");
    check_keys(tj, {"center", "varying", "lo", "hi", "radius", "step"},
               "environments.terminal");
    TerminalBall ball;
    ball.center = vector_from_json(tj.at("center"), "terminal center");
    ball.varying = ints_from_json(tj.at("varying"), "terminal varying");
    ball.lo = vector_from_json(tj.at("lo"), "terminal lo");
    ball.hi = vector_from_json(tj.at("hi"), "terminal hi");
    ball.radius = tj.at("radius").get<double>();
    ball.step = tj.value("step", -1);
    terminal = std::move(ball);
  }
  return std::make_shared<BoxSampledSpace>(name, std::move(lo), std::move(hi),
                                           horizon, std::move(avoid),
                                           std::move(reach),
                                           std::move(terminal));
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"running-example", "quadrotor-conservative", "quadrotor-optimistic",
          "bicycle-demo"};
}

nlohmann::json preset_config(const std::string& name) {
  const char* text = nullptr;
  if (name == "running-example") text = kRunningExample;
  if (name == "quadrotor-conservative") text = kQuadConservative;
  if (name == "quadrotor-optimistic") text = kQuadOptimistic;
  if (name == "bicycle-demo") text = kBicycleDemo;
  if (text == nullptr) {
    std::string known;
    for (const std::string& n : preset_names()) {
      if (!known.empty()) known += ", ";
      known += n;
    }
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return json::parse(text);
}

namespace {

RunBundle load_bundle_impl(const nlohmann::json& config, unsigned threads) {
  if (!config.is_object()) {
    throw ConfigError("config: expected a top-level object");
  }
  check_keys(config,
             {"name", "system", "abstraction", "horizon", "environments",
              "scheme", "distance", "estimation"},
             "config");
  for (const char* key :
       {"name", "system", "abstraction", "horizon", "environments", "scheme"}) {
    if (!config.contains(key)) {
      throw ConfigError(std::string("config: missing required key '") + key +
                        "'");
    }
  }

  RunBundle bundle;
  bundle.config = config;
  bundle.name = config.at("name").get<std::string>();
  bundle.horizon = config.at("horizon").get<int>();
  if (bundle.horizon <= 0) throw ConfigError("config: horizon must be > 0");

  auto make_model = [](const json& mj, const std::string& which) -> ModelPtr {
    if (!mj.is_object() || !mj.contains("type")) {
      throw ConfigError("config: " + which + " must be an object with 'type'");
    }
    return ModelRegistry::instance().make(mj.at("type").get<std::string>(),
                                          mj);
  };
  bundle.system = make_model(config.at("system"), "system");
  bundle.abstraction = make_model(config.at("abstraction"), "abstraction");
  if (bundle.system->state_dim() != bundle.abstraction->state_dim() ||
      bundle.system->control_dim() != bundle.abstraction->control_dim()) {
    throw ConfigError(
        "config: system and abstraction must share state and control "
        "dimensions");
  }

  bundle.space = build_space(config.at("environments"), bundle.name,
                             bundle.horizon, &bundle.avoid);

  if (config.contains("distance")) {
    bundle.norm_config = norm_config_from_json(config.at("distance"));
  }
  if (config.contains("estimation")) {
    const json& est = config.at("estimation");
    check_keys(est, {"eps", "beta", "feasibility_cap"}, "estimation");
    bundle.eps = est.value("eps", bundle.eps);
    bundle.beta = est.value("beta", bundle.beta);
    bundle.feasibility_cap = est.value("feasibility_cap", bundle.feasibility_cap);
  }

  const json& sj = config.at("scheme");
  if (!sj.is_object() || !sj.contains("type")) {
    throw ConfigError("config: scheme must be an object with 'type'");
  }
  const std::string scheme_type = sj.at("type").get<std::string>();
  if (scheme_type == "lqr") {
    check_keys(sj, {"type", "q_lo", "q_hi"}, "scheme lqr");
    auto linear =
        std::dynamic_pointer_cast<const LinearModel>(bundle.abstraction);
    if (!linear) {
      throw ConfigError("scheme lqr: the abstraction must be linear");
    }
    bundle.scheme = std::make_shared<LqrScheme>(
        linear, sj.at("q_lo").get<double>(), sj.at("q_hi").get<double>());
  } else if (scheme_type == "uniform-sequence") {
    check_keys(sj, {"type"}, "scheme uniform-sequence");
    if (!bundle.abstraction->has_control_bounds()) {
      throw ConfigError(
          "scheme uniform-sequence: the abstraction must declare control "
          "bounds");
    }
    auto [lo, hi] = bundle.abstraction->control_bounds();
    bundle.scheme = std::make_shared<UniformSequenceScheme>(
        std::move(lo), std::move(hi), bundle.horizon);
  } else if (scheme_type == "least-restrictive") {
    check_keys(sj, {"type", "levels", "grid", "margin", "band"},
               "scheme least-restrictive");
    if (bundle.abstraction->state_dim() != 2 ||
        bundle.abstraction->control_dim() != 1) {
      throw ConfigError(
          "scheme least-restrictive: requires a 2-state, 1-control model");
    }
    if (!bundle.abstraction->has_control_bounds()) {
      throw ConfigError(
          "scheme least-restrictive: the abstraction must declare control "
          "bounds");
    }
    const int levels = sj.value("levels", 11);
    if (levels < 2) {
      throw ConfigError("scheme least-restrictive: levels must be >= 2");
    }
    const json& gj = sj.at("grid");
    check_keys(gj, {"lo", "hi", "n"}, "scheme grid");
    Eigen::VectorXd glo = vector_from_json(gj.at("lo"), "grid lo");
    Eigen::VectorXd ghi = vector_from_json(gj.at("hi"), "grid hi");
    std::vector<int> gn = ints_from_json(gj.at("n"), "grid n");
    if (glo.size() != 2 || ghi.size() != 2 || gn.size() != 2) {
      throw ConfigError("scheme grid: lo, hi, n must each have 2 entries");
    }
    KernelGridSpec grid;
    grid.lo0 = glo[0];
    grid.hi0 = ghi[0];
    grid.lo1 = glo[1];
    grid.hi1 = ghi[1];
    grid.n0 = gn[0];
    grid.n1 = gn[1];
    auto [ulo, uhi] = bundle.abstraction->control_bounds();
    const auto controls = scalar_levels(ulo[0], uhi[0], levels);
    const double margin = sj.value("margin", 0.0);
    bundle.kernel = std::make_shared<SafetyKernel>(compute_kernel(
        bundle.abstraction, bundle.avoid, margin, grid, controls,
        bundle.horizon, bundle.norm_config.norm, threads));
    std::optional<double> band;
    if (sj.contains("band")) band = sj.at("band").get<double>();
    bundle.scheme = std::make_shared<LeastRestrictiveScheme>(
        bundle.kernel, bundle.horizon, band);
  } else {
    throw ConfigError("config: unknown scheme type '" + scheme_type + "'");
  }
  return bundle;
}

}  // namespace

RunBundle load_bundle(const nlohmann::json& config, unsigned threads) {
  // Any stray json access error inside the load path is, by definition, a
  // malformed config: surface it with config-error semantics (exit code 2).
  try {
    return load_bundle_impl(config, threads);
  } catch (const nlohmann::json::exception& err) {
    throw ConfigError(std::string("config: ") + err.what());
  }
}

RunBundle load_bundle_file(const std::string& path, unsigned threads) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& err) {
    throw ConfigError("config file '" + path + "': " + err.what());
  }
  return load_bundle(config, threads);
}

RunBundle load_preset(const std::string& name, unsigned threads) {
  return load_bundle(preset_config(name), threads);
}

}  // namespace specsim
