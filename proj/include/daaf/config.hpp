#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "daaf/delay.hpp"
#include "daaf/errors.hpp"
#include "daaf/harness.hpp"
#include "daaf/policy.hpp"

namespace daaf {

/// An experiment file: the experiment itself plus sweep options.
struct CliConfig {
  ExperimentConfig experiment;
  std::vector<double> sweep_means;
};

namespace config_detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

inline const json& required(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + " is missing '" + key + "'");
  return *it;
}

inline double number(const json& value, const std::string& what) {
  if (!value.is_number()) throw ConfigError(what + " must be a number");
  return value.get<double>();
}

inline std::int64_t integer(const json& value, const std::string& what) {
  if (!value.is_number_integer()) throw ConfigError(what + " must be an integer");
  return value.get<std::int64_t>();
}

inline bool boolean(const json& value, const std::string& what) {
  if (!value.is_boolean()) throw ConfigError(what + " must be true or false");
  return value.get<bool>();
}

inline std::string string(const json& value, const std::string& what) {
  if (!value.is_string()) throw ConfigError(what + " must be a string");
  return value.get<std::string>();
}

inline std::vector<double> numbers(const json& value, const std::string& what) {
  if (!value.is_array()) throw ConfigError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const json& v : value) out.push_back(number(v, what + " entry"));
  return out;
}

inline DelayModel parse_delay(const json& obj) {
  const std::string where = "delay";
  if (!obj.is_object()) throw ConfigError("delay must be a JSON object");
  const DelayKind kind = parse_delay_kind(string(required(obj, "kind", where), "delay.kind"));
  switch (kind) {
    case DelayKind::constant:
      reject_unknown_keys(obj, {"kind", "value"}, where);
      return DelayModel::constant(integer(required(obj, "value", where), "delay.value"));
    case DelayKind::uniform_int:
      reject_unknown_keys(obj, {"kind", "d"}, where);
      return DelayModel::uniform_int(integer(required(obj, "d", where), "delay.d"));
    case DelayKind::geometric:
      reject_unknown_keys(obj, {"kind", "p"}, where);
      return DelayModel::geometric(number(required(obj, "p", where), "delay.p"));
    case DelayKind::discretized_exponential:
      reject_unknown_keys(obj, {"kind", "rate"}, where);
      return DelayModel::discretized_exponential(number(required(obj, "rate", where), "delay.rate"));
    case DelayKind::discretized_truncated_normal:
      reject_unknown_keys(obj, {"kind", "mu", "sigma"}, where);
      return DelayModel::discretized_truncated_normal(number(required(obj, "mu", where), "delay.mu"),
                                                      number(required(obj, "sigma", where),
                                                             "delay.sigma"));
  }
  throw ConfigError("unsupported delay kind");
}

inline PolicySpec parse_policy(const json& obj, std::size_t index) {
  const std::string where = "policies[" + std::to_string(index) + "]";
  reject_unknown_keys(obj,
                      {"name", "type", "variant", "mean_delay", "delay_bound", "delay_variance",
                       "use_variance_over_mean", "bridge", "bridge_arm"},
                      where);
  PolicySpec spec;
  spec.name = string(required(obj, "name", where), where + ".name");
  spec.type = parse_policy_type(string(required(obj, "type", where), where + ".type"));
  const bool odaaf = spec.type == PolicyType::odaaf;
  for (const char* key : {"variant", "mean_delay", "delay_bound", "delay_variance",
                          "use_variance_over_mean", "bridge", "bridge_arm"}) {
    if (!odaaf && obj.contains(key))
      throw ConfigError(where + "." + key + " only applies to ODAAF policies");
  }
  if (!odaaf) return spec;
  spec.variant = parse_odaaf_variant(string(required(obj, "variant", where), where + ".variant"));
  if (obj.contains("mean_delay")) spec.mean_delay = number(obj["mean_delay"], where + ".mean_delay");
  if (obj.contains("delay_bound"))
    spec.delay_bound = integer(obj["delay_bound"], where + ".delay_bound");
  if (obj.contains("delay_variance"))
    spec.delay_variance = number(obj["delay_variance"], where + ".delay_variance");
  if (obj.contains("use_variance_over_mean"))
    spec.use_variance_over_mean =
        boolean(obj["use_variance_over_mean"], where + ".use_variance_over_mean");
  if (obj.contains("bridge")) spec.bridge = boolean(obj["bridge"], where + ".bridge");
  if (obj.contains("bridge_arm")) {
    const std::string rule = string(obj["bridge_arm"], where + ".bridge_arm");
    if (rule == "leader") {
      spec.bridge_arm = BridgeArmRule::leader;
    } else if (rule == "lowest-index") {
      spec.bridge_arm = BridgeArmRule::lowest_index;
    } else {
      throw ConfigError(where + ".bridge_arm must be 'leader' or 'lowest-index'");
    }
  }
  return spec;
}

}  // namespace config_detail

/// Validates a config document against the schema and builds the experiment.
/// Any unknown key, wrong type or invalid value is a ConfigError.
inline CliConfig parse_config(const nlohmann::json& doc) {
  using namespace config_detail;
  const std::string where = "config";
  reject_unknown_keys(doc,
                      {"description", "arm_means", "delay", "horizon", "replications", "seed",
                       "checkpoint_stride", "workers", "output_dir", "policies", "ratios", "sweep"},
                      where);
  CliConfig out;
  ExperimentConfig& e = out.experiment;
  if (doc.contains("description")) string(doc["description"], "description");
  e.arm_means = numbers(required(doc, "arm_means", where), "arm_means");
  e.delay = parse_delay(required(doc, "delay", where));
  e.horizon = integer(required(doc, "horizon", where), "horizon");
  e.replications = integer(required(doc, "replications", where), "replications");
  if (e.replications < 1) throw ConfigError("replications must be >= 1");
  const json& seed = required(doc, "seed", where);
  if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned()))
    throw ConfigError("seed must be a non-negative integer");
  e.master_seed = seed.get<std::uint64_t>();
  if (doc.contains("checkpoint_stride")) {
    e.checkpoint_stride = integer(doc["checkpoint_stride"], "checkpoint_stride");
    if (e.checkpoint_stride < 1) throw ConfigError("checkpoint_stride must be >= 1");
  }
  if (doc.contains("workers")) {
    const std::int64_t w = integer(doc["workers"], "workers");
    if (w < 0) throw ConfigError("workers must be >= 0");
    e.workers = static_cast<unsigned>(w);
  }
  if (doc.contains("output_dir")) e.output_dir = string(doc["output_dir"], "output_dir");

  const json& policies = required(doc, "policies", where);
  if (!policies.is_array()) throw ConfigError("policies must be an array");
  for (std::size_t i = 0; i < policies.size(); ++i)
    e.policies.push_back(parse_policy(policies[i], i));

  if (doc.contains("ratios")) {
    const json& ratios = doc["ratios"];
    if (!ratios.is_array()) throw ConfigError("ratios must be an array of [numerator, denominator]");
    for (const json& pair : ratios) {
      if (!pair.is_array() || pair.size() != 2)
        throw ConfigError("each ratio must be [numerator, denominator]");
      e.ratios.emplace_back(string(pair[0], "ratio numerator"), string(pair[1], "ratio denominator"));
    }
  }
  if (doc.contains("sweep")) {
    reject_unknown_keys(doc["sweep"], {"means"}, "sweep");
    if (doc["sweep"].contains("means")) out.sweep_means = numbers(doc["sweep"]["means"], "sweep.means");
  }

  // Everything below needs the whole document: build the instance and each
  // policy once so that invalid combinations fail before any run.
  const BanditInstance instance = e.instance();
  for (const PolicySpec& p : e.policies) make_policy(p, instance);
  return out;
}

inline CliConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

}  // namespace daaf
