#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "specsim/control.hpp"
#include "specsim/dynamics.hpp"
#include "specsim/reach.hpp"
#include "specsim/scenario.hpp"
#include "specsim/spec.hpp"

namespace specsim {

// Everything a run needs, materialized from one config document: the two
// models, the environment distribution, the controller family, the distance
// definition, and the estimation defaults.
struct RunBundle {
  std::string name;
  ModelPtr system;
  ModelPtr abstraction;
  EnvironmentSpacePtr space;
  SchemePtr scheme;
  NormConfig norm_config;
  int horizon = 0;
  SetExpr avoid = SetExpr::empty();  // per-step avoid set of the environments
  double eps = 0.01;
  double beta = 1e-6;
  int feasibility_cap = 100;
  KernelPtr kernel;  // non-null for least-restrictive schemes
  nlohmann::json config;  // the bundle's canonical description
};

// Built-in, ready-to-run configurations.
std::vector<std::string> preset_names();
nlohmann::json preset_config(const std::string& name);

// Builds a bundle from a config document / file / preset name. `threads`
// bounds the worker count for kernel construction (0: hardware).
RunBundle load_bundle(const nlohmann::json& config, unsigned threads = 0);
RunBundle load_bundle_file(const std::string& path, unsigned threads = 0);
RunBundle load_preset(const std::string& name, unsigned threads = 0);

}  // namespace specsim
