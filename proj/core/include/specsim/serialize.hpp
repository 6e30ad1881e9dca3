#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <initializer_list>
#include <nlohmann/json.hpp>
#include <string>

#include "specsim/geometry.hpp"
#include "specsim/spec.hpp"

namespace specsim {

// Fail-fast config hygiene: every key of obj must be in `allowed`.
void check_keys(const nlohmann::json& obj,
                std::initializer_list<const char*> allowed,
                const std::string& context);

Eigen::VectorXd vector_from_json(const nlohmann::json& j,
                                 const std::string& context);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j,
                                 const std::string& context);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);

// Tagged-record set serialization, e.g.
//   {"type":"box","lo":[0.5],"hi":[2.5],"coords":[0]}
//   {"type":"complement","inner":{...}}
//   {"type":"union","members":[{...},{...}]}
nlohmann::json set_to_json(const SetExpr& s);
SetExpr set_from_json(const nlohmann::json& j);

// {"default": <set>, "entries": {"20": <set>, ...}} over a given horizon.
nlohmann::json time_varying_to_json(const TimeVaryingSet& tv);
TimeVaryingSet time_varying_from_json(const nlohmann::json& j, int horizon);

nlohmann::json environment_to_json(const Environment& e);

nlohmann::json norm_config_to_json(const NormConfig& n);
NormConfig norm_config_from_json(const nlohmann::json& j);

// FNV-1a 64-bit over a canonical dump; used as the config hash in summaries.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);
std::uint64_t parse_hex64(const std::string& s);

}  // namespace specsim
