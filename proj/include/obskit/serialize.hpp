#pragma once

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "obskit/ambiguity.hpp"
#include "obskit/errors.hpp"
#include "obskit/estimator.hpp"
#include "obskit/measurement.hpp"
#include "obskit/observability.hpp"
#include "obskit/scenario_io.hpp"

namespace obskit {

/// Shortest decimal text that round-trips to the same double.
inline std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace detail {

inline nlohmann::json finite_or_null(double value) {
  return std::isfinite(value) ? nlohmann::json(value) : nlohmann::json(nullptr);
}

inline nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

inline nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

inline nlohmann::json track_json(const Track& track) {
  if (const auto* poly = std::get_if<PolynomialTrajectory>(&track)) {
    return {{"kind", "polynomial"}, {"ref_time", poly->ref_time()}, {"coeffs", coeffs_json(*poly)}};
  }
  const auto& sampled = std::get<SampledTrajectory>(track);
  nlohmann::json positions = nlohmann::json::array();
  for (const Vec2& p : sampled.positions) positions.push_back({p.x(), p.y()});
  return {{"kind", "sampled"}, {"times", sampled.times}, {"positions", std::move(positions)}};
}

}  // namespace detail

inline nlohmann::json to_json(const ObservabilityReport& r) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : r.collinearity_events) {
    events.push_back({{"pair", {e.pair.first, e.pair.second}},
                      {"t_begin", e.t_begin},
                      {"t_end", e.t_end},
                      {"separation_min", e.separation_min}});
  }
  nlohmann::json separation = nullptr;
  if (r.min_pairwise_separation) {
    const auto& s = *r.min_pairwise_separation;
    separation = {{"value", s.min_separation}, {"pair", {s.pair.first, s.pair.second}}, {"time", s.time}};
  }
  nlohmann::json target_observable = nlohmann::json::array();
  for (std::size_t i = 0; i < r.target_sigma_ratios.size(); ++i) target_observable.push_back(r.target_observable(i));
  return {
      {"gramian", detail::matrix_json(r.gramian)},
      {"singular_values", detail::vector_json(r.singular_values)},
      {"rank_tol", r.rank_tol},
      {"sigma_ratio", r.sigma_ratio},
      {"rank_decision", std::string(to_string(r.rank_decision))},
      {"null_vector", r.null_vector ? detail::vector_json(*r.null_vector) : nlohmann::json(nullptr)},
      {"target_sigma_ratios", r.target_sigma_ratios},
      {"target_observable", std::move(target_observable)},
      {"min_pairwise_separation", std::move(separation)},
      {"collinearity_events", std::move(events)},
  };
}

/// Human-readable summary of an observability report.
inline std::string text_summary(const ObservabilityReport& r) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "rank decision: " << to_string(r.rank_decision) << " (sigma_min/sigma_max = " << r.sigma_ratio
      << ", rank_tol = " << r.rank_tol << ")\n";
  out << "state dimension: " << r.gramian.rows() << '\n';
  for (std::size_t i = 0; i < r.target_sigma_ratios.size(); ++i) {
    out << "  target " << i << ": " << (r.target_observable(i) ? "observable" : "unobservable")
        << " on its own (block ratio " << r.target_sigma_ratios[i] << ")\n";
  }
  if (r.min_pairwise_separation) {
    const auto& s = *r.min_pairwise_separation;
    out << "min bearing separation mod pi: " << s.min_separation << " rad (targets " << s.pair.first << ", "
        << s.pair.second << " at t=" << s.time << ")\n";
    out << "collinearity events: " << r.collinearity_events.size() << '\n';
    for (const auto& e : r.collinearity_events) {
      out << "  targets " << e.pair.first << ", " << e.pair.second << ": t in [" << e.t_begin << ", " << e.t_end
          << "], min separation " << e.separation_min << " rad\n";
    }
  }
  return out.str();
}

inline nlohmann::json to_json(const EstimateResult& r) {
  return {
      {"ref_time", r.ref_time},
      {"orders", r.orders},
      {"x_initial_hat", detail::vector_json(r.x_initial_hat)},
      {"residual_norm", r.residual_norm},
      {"condition_number", detail::finite_or_null(r.condition_number)},
      {"normal_ratio", r.normal_ratio},
      {"uniqueness", std::string(to_string(r.uniqueness))},
      {"weakest_direction", detail::vector_json(r.weakest_direction)},
  };
}

inline nlohmann::json to_json(const AmbiguityCertificate& c) {
  return {
      {"regime", std::string(to_string(c.regime))},
      {"trajectory_i", detail::track_json(c.trajectory_i)},
      {"trajectory_j", detail::track_json(c.trajectory_j)},
      {"f_i0", c.f_i0},
      {"f_j0", c.f_j0},
      {"residual_doppler", c.residual_doppler},
      {"residual_bearing", c.residual_bearing},
      {"doppler_tolerance", c.doppler_tolerance},
      {"discretization_slack", c.discretization_slack},
      {"bearing_tolerance", c.bearing_tolerance},
      {"max_position_gap", c.max_position_gap},
      {"doppler_ambiguous", c.doppler_ambiguous},
      {"bearing_ambiguous", c.bearing_ambiguous},
      {"verdict", c.ambiguous ? "ambiguous" : "distinguishable"},
  };
}

inline nlohmann::json to_json(const CombinedConditionReport& r) {
  return {
      {"max_eigen_residual", r.max_eigen_residual},
      {"max_alpha_deviation", r.max_alpha_deviation},
      {"max_transform_residual", r.max_transform_residual},
      {"eigenvector_condition", r.eigenvector_condition},
      {"alpha_is_one", r.alpha_is_one},
      {"combined_ambiguous", r.combined_ambiguous},
  };
}

inline nlohmann::json to_json(const SufficiencyReport& r) {
  return {
      {"same_tonal", r.same_tonal},
      {"transform_is_identity", r.transform_is_identity},
      {"same_relative_position", r.same_relative_position},
      {"all_hold", r.all_hold},
      {"max_transform_deviation", r.max_transform_deviation},
      {"max_position_gap", r.max_position_gap},
      {"residual_doppler", r.residual_doppler},
      {"doppler_tolerance", r.doppler_tolerance},
      {"doppler_ambiguous", r.doppler_ambiguous},
      {"implication_confirmed", r.implication_confirmed},
  };
}

inline constexpr const char* kHistoryCsvHeader = "t,target_id,bearing_rad,doppler_hz";

/// One row per (time, target), time-major; empty Doppler field without a tonal.
inline void write_history_csv(const MeasurementHistory& h, std::ostream& out) {
  out << kHistoryCsvHeader << '\n';
  for (std::size_t k = 0; k < h.times.size(); ++k) {
    for (std::size_t i = 0; i < h.target_count(); ++i) {
      out << format_number(h.times[k]) << ',' << i << ',' << format_number(h.bearings[i][k]) << ',';
      if (h.dopplers[i]) out << format_number((*h.dopplers[i])[k]);
      out << '\n';
    }
  }
}

inline MeasurementHistory read_history_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHistoryCsvHeader) throw ParseError("history CSV: bad header");
  MeasurementHistory h;
  std::vector<std::vector<std::pair<double, std::optional<double>>>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() == 3 && line.back() == ',') fields.emplace_back();
    if (fields.size() != 4) throw ParseError("history CSV: expected 4 fields in '" + line + "'");
    try {
      const double t = std::stod(fields[0]);
      const std::size_t id = std::stoul(fields[1]);
      if (id == 0 && (h.times.empty() || h.times.back() != t)) h.times.push_back(t);
      if (id >= rows.size()) rows.resize(id + 1);
      std::optional<double> f;
      if (!fields[3].empty()) f = std::stod(fields[3]);
      rows[id].emplace_back(std::stod(fields[2]), f);
    } catch (const std::logic_error&) {
      throw ParseError("history CSV: non-numeric field in '" + line + "'");
    }
  }
  for (const auto& series : rows) {
    if (series.size() != h.times.size()) throw ParseError("history CSV: ragged target series");
    std::vector<double> b;
    std::vector<double> d;
    bool has_doppler = !series.empty() && series.front().second.has_value();
    for (const auto& [bearing_rad, freq] : series) {
      b.push_back(bearing_rad);
      if (has_doppler) {
        if (!freq) throw ParseError("history CSV: Doppler column partially empty");
        d.push_back(*freq);
      }
    }
    h.bearings.push_back(std::move(b));
    if (has_doppler) {
      h.dopplers.emplace_back(std::move(d));
    } else {
      h.dopplers.emplace_back(std::nullopt);
    }
  }
  return h;
}

inline void write_trajectory_csv(const SampledTrajectory& traj, std::ostream& out) {
  out << "t,x,y\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << format_number(traj.times[k]) << ',' << format_number(traj.positions[k].x()) << ','
        << format_number(traj.positions[k].y()) << '\n';
  }
}

inline SampledTrajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,x,y") throw ParseError("trajectory CSV: bad header");
  std::vector<double> times;
  std::vector<Vec2> positions;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t = 0;
    double x = 0;
    double y = 0;
    char c1 = 0;
    char c2 = 0;
    std::istringstream ss(line);
    if (!(ss >> t >> c1 >> x >> c2 >> y) || c1 != ',' || c2 != ',') {
      throw ParseError("trajectory CSV: bad row '" + line + "'");
    }
    times.push_back(t);
    positions.emplace_back(x, y);
  }
  try {
    return {std::move(times), std::move(positions)};
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("trajectory CSV: ") + e.what());
  }
}

}  // namespace obskit
