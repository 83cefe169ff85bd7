#pragma once

// Run configuration. Stored on disk as a flat JSON object whose keys are the
// field names below; absent keys take the defaults.

#include <cmath>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "t2nav/core.hpp"

namespace t2nav {

struct Config {
  // temporal memory
  int K = 100;
  double gamma = 0.95;
  double lambda = 1.0;
  double tau = 0.5;
  double alpha_sim = 0.5;
  double sigma_p = 1.0;

  // topological signatures
  double r = 0.5;
  double eps_max = 5.0;
  double tau_p = 0.1;
  double theta_w = 2.0;
  double alpha_vis = 0.5;
  double R_search = 10.0;
  int cadence = 10;
  int min_traj_len = 10;
  int segment_window = 50;
  int landscape_grid = 64;
  double w_wasserstein = 0.7;
  double w_landscape = 0.3;

  // simulator
  int step_budget = 500;
  double forward_step = 0.25;
  double turn_deg = 30.0;
  double fov_deg = 90.0;
  double sense_range = 4.0;
  double position_noise = 0.05;
  double feature_noise = 0.05;
  double feature_noise_per_m = 0.04;
  double goal_match = 0.8;
  double success_radius = 1.0;
  double stop_radius = 0.3;
  double blacklist_radius = 1.0;
  double goal_bias_weight = 1.0;
  double goal_bias_radius = 4.0;
  double min_track_speed = 0.2;
  double max_track_speed = 0.6;
  int max_extrapolation = 24;

  friend bool operator==(const Config&, const Config&) = default;
};

namespace detail {

using ConfigMember = std::variant<int Config::*, double Config::*>;

struct ConfigField {
  std::string_view name;
  ConfigMember member;
};

inline constexpr ConfigField kConfigFields[] = {
    {"K", &Config::K},
    {"gamma", &Config::gamma},
    {"lambda", &Config::lambda},
    {"tau", &Config::tau},
    {"alpha_sim", &Config::alpha_sim},
    {"sigma_p", &Config::sigma_p},
    {"r", &Config::r},
    {"eps_max", &Config::eps_max},
    {"tau_p", &Config::tau_p},
    {"theta_w", &Config::theta_w},
    {"alpha_vis", &Config::alpha_vis},
    {"R_search", &Config::R_search},
    {"cadence", &Config::cadence},
    {"min_traj_len", &Config::min_traj_len},
    {"segment_window", &Config::segment_window},
    {"landscape_grid", &Config::landscape_grid},
    {"w_wasserstein", &Config::w_wasserstein},
    {"w_landscape", &Config::w_landscape},
    {"step_budget", &Config::step_budget},
    {"forward_step", &Config::forward_step},
    {"turn_deg", &Config::turn_deg},
    {"fov_deg", &Config::fov_deg},
    {"sense_range", &Config::sense_range},
    {"position_noise", &Config::position_noise},
    {"feature_noise", &Config::feature_noise},
    {"feature_noise_per_m", &Config::feature_noise_per_m},
    {"goal_match", &Config::goal_match},
    {"success_radius", &Config::success_radius},
    {"stop_radius", &Config::stop_radius},
    {"blacklist_radius", &Config::blacklist_radius},
    {"goal_bias_weight", &Config::goal_bias_weight},
    {"goal_bias_radius", &Config::goal_bias_radius},
    {"min_track_speed", &Config::min_track_speed},
    {"max_track_speed", &Config::max_track_speed},
    {"max_extrapolation", &Config::max_extrapolation},
};

}  // namespace detail

inline void validate(const Config& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("config: ") + what);
  };
  require(c.K >= 1, "K must be >= 1");
  require(c.gamma > 0.0 && c.gamma < 1.0, "gamma must lie in (0,1)");
  require(c.lambda > 0.0, "lambda must be > 0");
  require(c.tau >= 0.0 && c.tau <= 1.0, "tau must lie in [0,1]");
  require(c.alpha_sim >= 0.0 && c.alpha_sim <= 1.0, "alpha_sim must lie in [0,1]");
  require(c.sigma_p > 0.0, "sigma_p must be > 0");
  require(c.eps_max > 0.0, "eps_max must be > 0");
  require(c.tau_p >= 0.0, "tau_p must be >= 0");
  require(c.theta_w > 0.0, "theta_w must be > 0");
  require(c.alpha_vis >= 0.0, "alpha_vis must be >= 0");
  require(c.R_search >= 0.0, "R_search must be >= 0");
  require(c.cadence >= 1, "cadence must be >= 1");
  require(c.min_traj_len >= 1, "min_traj_len must be >= 1");
  require(c.segment_window >= c.min_traj_len, "segment_window must be >= min_traj_len");
  require(c.landscape_grid >= 2, "landscape_grid must be >= 2");
  require(c.w_wasserstein >= 0.0 && c.w_landscape >= 0.0, "distance weights must be >= 0");
  require(c.step_budget >= 1, "step_budget must be >= 1");
  require(c.forward_step > 0.0, "forward_step must be > 0");
  require(c.turn_deg > 0.0 && c.turn_deg < 180.0, "turn_deg must lie in (0,180)");
  require(c.fov_deg > 0.0 && c.fov_deg <= 360.0, "fov_deg must lie in (0,360]");
  require(c.sense_range > 0.0, "sense_range must be > 0");
  require(c.position_noise >= 0.0 && c.feature_noise >= 0.0 && c.feature_noise_per_m >= 0.0,
          "noise scales must be >= 0");
  require(c.goal_match >= -1.0 && c.goal_match <= 1.0, "goal_match must lie in [-1,1]");
  require(c.success_radius > 0.0 && c.stop_radius > 0.0, "radii must be > 0");
  require(c.blacklist_radius >= 0.0, "blacklist_radius must be >= 0");
  require(c.goal_bias_weight >= 0.0 && c.goal_bias_radius >= 0.0, "goal bias terms must be >= 0");
  require(c.min_track_speed >= 0.0 && c.max_track_speed >= c.min_track_speed,
          "track speed band must satisfy 0 <= min_track_speed <= max_track_speed");
  require(c.max_extrapolation >= 1, "max_extrapolation must be >= 1");
}

inline nlohmann::json to_json(const Config& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& f : detail::kConfigFields)
    std::visit([&](auto member) { j[std::string(f.name)] = c.*member; }, f.member);
  return j;
}

inline std::string serialize(const Config& c) { return to_json(c).dump(2) + "\n"; }

inline Config config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("config: top level must be an object");
  Config c;
  for (const auto& [key, value] : j.items()) {
    const detail::ConfigField* field = nullptr;
    for (const auto& f : detail::kConfigFields)
      if (f.name == key) field = &f;
    if (field == nullptr) throw ParseError("config: unknown key '" + key + "'");
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(c.*member)>;
          if constexpr (std::is_same_v<T, int>) {
            if (!value.is_number_integer()) throw ParseError("config: key '" + key + "' expects an integer");
            c.*member = value.template get<int>();
          } else {
            if (!value.is_number()) throw ParseError("config: key '" + key + "' expects a number");
            c.*member = value.template get<double>();
          }
        },
        field->member);
  }
  validate(c);
  return c;
}

/// Parses config text. Blank text yields the defaults.
inline Config parse_config(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return Config{};
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

inline Config load_config(const std::string& path) { return parse_config(read_text_file(path)); }

}  // namespace t2nav
