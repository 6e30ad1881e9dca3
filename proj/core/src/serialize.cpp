#include "specsim/serialize.hpp"

#include <algorithm>
#include <cstdio>

#include "specsim/errors.hpp"

namespace specsim {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
  if (!obj.is_object()) {
    throw ConfigError(context + ": expected an object");
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return it.key() == k;
        }) == allowed.end()) {
      throw ConfigError(context + ": unknown key '" + it.key() + "'");
    }
  }
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(context + ": expected a non-empty array of numbers");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ConfigError(context + ": element " + std::to_string(i) +
                        " is not a number");
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ConfigError(context + ": expected an array of equal-length rows");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ConfigError(context + ": ragged matrix rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

namespace {

json coords_to_json(const std::vector<int>& coords) {
  json a = json::array();
  for (int c : coords) a.push_back(c);
  return a;
}

std::vector<int> coords_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(context + ": coords must be a non-empty array");
  }
  std::vector<int> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(e.get<int>());
  return out;
}

const json& require_key(const json& j, const char* key,
                        const std::string& context) {
  if (!j.contains(key)) {
    throw ConfigError(context + ": missing key '" + std::string(key) + "'");
  }
  return j.at(key);
}

}  // namespace

json set_to_json(const SetExpr& s) {
  json j;
  switch (s.kind) {
    case SetExpr::Kind::Empty:
      j["type"] = "empty";
      break;
    case SetExpr::Kind::All:
      j["type"] = "all";
      break;
    case SetExpr::Kind::Ball:
      j["type"] = "ball";
      j["center"] = vector_to_json(s.a);
      j["radius"] = s.c;
      break;
    case SetExpr::Kind::Box:
      j["type"] = "box";
      j["lo"] = vector_to_json(s.a);
      j["hi"] = vector_to_json(s.b);
      break;
    case SetExpr::Kind::HalfSpace:
      j["type"] = "half-space";
      j["normal"] = vector_to_json(s.a);
      j["offset"] = s.c;
      break;
    case SetExpr::Kind::Complement:
      j["type"] = "complement";
      j["inner"] = set_to_json(s.children.front());
      break;
    case SetExpr::Kind::Union: {
      j["type"] = "union";
      json members = json::array();
      for (const auto& m : s.children) members.push_back(set_to_json(m));
      j["members"] = members;
      break;
    }
  }
  if (!s.coords.empty()) j["coords"] = coords_to_json(s.coords);
  return j;
}

SetExpr set_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type")) {
    throw ConfigError("set: expected an object with a 'type' tag");
  }
  const std::string type = j.at("type").get<std::string>();
  SetExpr s;
  if (type == "empty") {
    check_keys(j, {"type", "coords"}, "set empty");
    s = SetExpr::empty();
  } else if (type == "all") {
    check_keys(j, {"type", "coords"}, "set all");
    s = SetExpr::all();
  } else if (type == "ball") {
    check_keys(j, {"type", "center", "radius", "coords"}, "set ball");
    s = SetExpr::ball(
        vector_from_json(require_key(j, "center", "set ball"), "ball center"),
        require_key(j, "radius", "set ball").get<double>());
  } else if (type == "box") {
    check_keys(j, {"type", "lo", "hi", "coords"}, "set box");
    s = SetExpr::box(
        vector_from_json(require_key(j, "lo", "set box"), "box lo"),
        vector_from_json(require_key(j, "hi", "set box"), "box hi"));
  } else if (type == "half-space") {
    check_keys(j, {"type", "normal", "offset", "coords"}, "set half-space");
    s = SetExpr::half_space(
        vector_from_json(require_key(j, "normal", "set half-space"), "normal"),
        require_key(j, "offset", "set half-space").get<double>());
  } else if (type == "complement") {
    check_keys(j, {"type", "inner", "coords"}, "set complement");
    s = SetExpr::complement(
        set_from_json(require_key(j, "inner", "set complement")));
  } else if (type == "union") {
    check_keys(j, {"type", "members", "coords"}, "set union");
    std::vector<SetExpr> members;
    for (const auto& m : require_key(j, "members", "set union")) {
      members.push_back(set_from_json(m));
    }
    s = SetExpr::union_of(std::move(members));
  } else {
    throw ConfigError("set: unknown type '" + type + "'");
  }
  if (j.contains("coords")) {
    s = s.onto(coords_from_json(j.at("coords"), "set"));
  }
  return s;
}

json time_varying_to_json(const TimeVaryingSet& tv) {
  json j;
  j["default"] = set_to_json(tv.default_set);
  if (!tv.entries.empty()) {
    json entries = json::object();
    for (const auto& [step, set] : tv.entries) {
      entries[std::to_string(step)] = set_to_json(set);
    }
    j["entries"] = entries;
  }
  return j;
}

TimeVaryingSet time_varying_from_json(const json& j, int horizon) {
  check_keys(j, {"default", "entries"}, "time-varying set");
  if (!j.contains("default")) {
    throw ConfigError("time-varying set: missing 'default'");
  }
  TimeVaryingSet tv =
      TimeVaryingSet::constant(horizon, set_from_json(j.at("default")));
  if (j.contains("entries")) {
    for (auto it = j.at("entries").begin(); it != j.at("entries").end(); ++it) {
      int step = 0;
      try {
        step = std::stoi(it.key());
      } catch (const std::exception&) {
        throw ConfigError("time-varying set: entry key '" + it.key() +
                          "' is not a step number");
      }
      tv = tv.with_entry(step, set_from_json(it.value()));
    }
  }
  return tv;
}

json environment_to_json(const Environment& e) {
  json j;
  j["id"] = e.id;
  j["x0"] = vector_to_json(e.x0);
  j["horizon"] = e.horizon();
  j["avoid"] = time_varying_to_json(e.avoid);
  j["reach"] = time_varying_to_json(e.reach);
  if (!e.params.empty()) j["params"] = e.params;
  return j;
}

json norm_config_to_json(const NormConfig& n) {
  json j;
  j["kind"] = to_string(n.norm);
  if (!n.coords.empty()) j["coords"] = coords_to_json(n.coords);
  return j;
}

NormConfig norm_config_from_json(const json& j) {
  check_keys(j, {"kind", "coords"}, "norm");
  NormConfig n;
  if (j.contains("kind")) {
    n.norm = norm_from_string(j.at("kind").get<std::string>());
  }
  if (j.contains("coords")) {
    n.coords = coords_from_json(j.at("coords"), "norm");
  }
  return n;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &pos, 16);
  } catch (const std::exception&) {
    throw ConfigError("'" + s + "' is not a 64-bit hex value");
  }
  if (pos != s.size()) {
    throw ConfigError("'" + s + "' is not a 64-bit hex value");
  }
  return v;
}

}  // namespace specsim
