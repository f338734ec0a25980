#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "obskit/errors.hpp"
#include "obskit/scenario.hpp"
#include "obskit/trajectory.hpp"

namespace obskit {

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

inline double number(const nlohmann::json& value, const std::string& path) {
  if (!value.is_number()) throw ValidationError(path, "expected a number");
  return value.get<double>();
}

inline std::vector<Vec2> parse_coeffs(const nlohmann::json& value, const std::string& path) {
  if (!value.is_array() || value.empty()) throw ValidationError(path, "expected a non-empty array of [x, y]");
  std::vector<Vec2> coeffs;
  for (std::size_t k = 0; k < value.size(); ++k) {
    const auto& pair = value[k];
    const std::string item = path + "[" + std::to_string(k) + "]";
    if (!pair.is_array() || pair.size() != 2) throw ValidationError(item, "expected [x, y]");
    coeffs.emplace_back(number(pair[0], item), number(pair[1], item));
  }
  return coeffs;
}

inline nlohmann::json coeffs_json(const PolynomialTrajectory& traj) {
  nlohmann::json out = nlohmann::json::array();
  for (const Vec2& a : traj.coeffs()) out.push_back({a.x(), a.y()});
  return out;
}

}  // namespace detail

/// Parses and validates a scenario document. Trajectory coefficients are
/// Taylor coefficients about time.start.
inline Scenario parse_scenario(const nlohmann::json& doc) {
  using detail::number;
  using detail::require;
  if (!doc.is_object()) throw ValidationError("", "scenario must be a JSON object");

  const auto& time = require(doc, "time", "");
  const double t_start = number(require(time, "start", "time"), "time.start");
  const double t_end = number(require(time, "end", "time"), "time.end");
  const auto& points = require(time, "points", "time");
  if (!points.is_number_integer() || points.get<long long>() < 2) {
    throw ValidationError("grid_points", "time.points must be an integer >= 2");
  }
  if (!(t_end > t_start)) throw ValidationError("t_end", "time.end must exceed time.start");

  Scenario s{PolynomialTrajectory(t_start,
                                  detail::parse_coeffs(require(require(doc, "observer", ""), "coeffs", "observer"),
                                                       "observer.coeffs")),
             {},
             t_start,
             t_end,
             static_cast<std::size_t>(points.get<long long>()),
             kDefaultSoundSpeed,
             {}};

  if (doc.contains("c")) s.c = number(doc["c"], "c");
  if (!(s.c > 0.0)) throw ValidationError("c", "propagation speed must be positive");

  const auto& targets = require(doc, "targets", "");
  if (!targets.is_array() || targets.empty()) throw ValidationError("targets", "need at least one target");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string path = "targets[" + std::to_string(i) + "]";
    const auto& target = targets[i];
    TargetSpec spec{PolynomialTrajectory(t_start, detail::parse_coeffs(require(target, "coeffs", path), path + ".coeffs")),
                    std::nullopt};
    if (target.contains("tonal_hz")) {
      const double f0 = number(target["tonal_hz"], path + ".tonal_hz");
      if (!(f0 > 0.0)) throw ValidationError(path + ".tonal_hz", "tonal must be positive");
      spec.tonal = Tonal(f0);
    }
    s.targets.push_back(std::move(spec));
  }

  if (doc.contains("tolerances")) {
    const auto& tol = doc["tolerances"];
    if (!tol.is_object()) throw ValidationError("tolerances", "expected an object");
    const auto read = [&](const char* key, double& field) {
      if (!tol.contains(key)) return;
      field = number(tol[key], std::string("tolerances.") + key);
      if (!(field > 0.0)) throw ValidationError(std::string("tolerances.") + key, "must be positive");
    };
    read("rank_tol", s.tolerances.rank_tol);
    read("collinearity_tol", s.tolerances.collinearity_tol);
    read("tol_f", s.tolerances.tol_f);
    read("tol_theta", s.tolerances.tol_theta);
    read("eps_range", s.tolerances.eps_range);
  }

  const std::vector<double> grid = s.grid();
  for (std::size_t i = 0; i < s.targets.size(); ++i) {
    for (double t : grid) {
      if ((s.targets[i].trajectory.eval(t) - s.observer.eval(t)).norm() < s.tolerances.eps_range) {
        throw ValidationError("targets[" + std::to_string(i) + "]",
                              "coincides with the observer at t=" + std::to_string(t));
      }
    }
  }
  return s;
}

inline Scenario parse_scenario(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed scenario JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

/// Canonical document: every field written, keys sorted.
inline nlohmann::json to_json(const Scenario& s) {
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& target : s.targets) {
    nlohmann::json t{{"coeffs", detail::coeffs_json(target.trajectory)}};
    if (target.tonal) t["tonal_hz"] = target.tonal->f0;
    targets.push_back(std::move(t));
  }
  return {
      {"observer", {{"coeffs", detail::coeffs_json(s.observer)}}},
      {"targets", std::move(targets)},
      {"time", {{"start", s.t_start}, {"end", s.t_end}, {"points", s.grid_points}}},
      {"c", s.c},
      {"tolerances",
       {{"rank_tol", s.tolerances.rank_tol},
        {"collinearity_tol", s.tolerances.collinearity_tol},
        {"tol_f", s.tolerances.tol_f},
        {"tol_theta", s.tolerances.tol_theta},
        {"eps_range", s.tolerances.eps_range}}},
  };
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write scenario file '" + path + "'");
  out << to_json(s).dump(2) << '\n';
}

}  // namespace obskit
