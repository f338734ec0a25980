#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "obskit/scenario.hpp"
#include "obskit/trajectory.hpp"

namespace obskit {

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(angle, two_pi);
  if (wrapped <= -std::numbers::pi) wrapped += two_pi;
  return wrapped;
}

/// Distance between two angles on the circle, in [0, pi].
inline double angular_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

/// Bearing from +y toward +x, so tan(theta) = x / y.
inline double bearing(const Vec2& relative_position, double eps_range = kDefaultEpsRange) {
  if (relative_position.norm() < eps_range) throw ZeroRange(std::nan(""));
  return wrap_angle(std::atan2(relative_position.x(), relative_position.y()));
}

inline double bearing(const RelativeState& rel, double eps_range = kDefaultEpsRange) {
  if (rel.range < eps_range) throw ZeroRange(std::nan(""));
  return wrap_angle(std::atan2(rel.position.x(), rel.position.y()));
}

/// One-way narrowband Doppler: f0 (1 - range_rate / c).
inline double doppler(const Tonal& tonal, double range_rate, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("doppler: propagation speed must be positive");
  return tonal.f0 * (1.0 - range_rate / c);
}

inline double doppler(const Tonal& tonal, const RelativeState& rel, double c,
                      double eps_range = kDefaultEpsRange) {
  if (rel.range < eps_range) throw ZeroRange(std::nan(""));
  return doppler(tonal, rel.range_rate, c);
}

/// Pseudo-linear measurement row [cos(theta), -sin(theta), 0, ..., 0] of width 2(p+1).
inline Eigen::RowVectorXd pseudo_row(double theta, int p) {
  if (p < 0) throw std::invalid_argument("pseudo_row: negative order");
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(2 * (p + 1));
  row(0) = std::cos(theta);
  row(1) = -std::sin(theta);
  return row;
}

/// Stacks one pseudo_row per target block-diagonally into an M x 2s matrix.
inline Eigen::MatrixXd assemble_C(std::span<const double> thetas, std::span<const int> orders) {
  if (thetas.size() != orders.size()) {
    throw std::invalid_argument("assemble_C: thetas and orders differ in length");
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(thetas.size()),
                                            super_state_size(orders));
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const Eigen::RowVectorXd row = pseudo_row(thetas[i], orders[i]);
    c.block(static_cast<Eigen::Index>(i), offset, 1, row.size()) = row;
    offset += row.size();
  }
  return c;
}

/// Noise-free bearing and Doppler series, one per target.
struct MeasurementHistory {
  std::vector<double> times;
  std::vector<std::vector<double>> bearings;
  std::vector<std::optional<std::vector<double>>> dopplers;

  std::size_t target_count() const noexcept { return bearings.size(); }

  /// Bearings of all targets at sample k.
  std::vector<double> bearings_at(std::size_t k) const {
    std::vector<double> out;
    out.reserve(bearings.size());
    for (const auto& series : bearings) out.push_back(series.at(k));
    return out;
  }
};

inline MeasurementHistory measure_scenario(const Scenario& scenario, std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("measure_scenario: need at least 2 grid times");
  MeasurementHistory history;
  history.times.assign(grid.begin(), grid.end());
  for (std::size_t i = 0; i < scenario.targets.size(); ++i) {
    const TargetSpec& target = scenario.targets[i];
    std::vector<double> thetas;
    std::vector<double> freqs;
    thetas.reserve(grid.size());
    for (double t : grid) {
      RelativeState rel{};
      try {
        rel = relative_state(target.trajectory, scenario.observer, t, scenario.tolerances.eps_range);
      } catch (const ZeroRange&) {
        throw ZeroRange(t, i);
      }
      thetas.push_back(bearing(rel));
      if (target.tonal) freqs.push_back(doppler(*target.tonal, rel.range_rate, scenario.c));
    }
    history.bearings.push_back(std::move(thetas));
    if (target.tonal) {
      history.dopplers.emplace_back(std::move(freqs));
    } else {
      history.dopplers.emplace_back(std::nullopt);
    }
  }
  return history;
}

inline MeasurementHistory measure_scenario(const Scenario& scenario) {
  const std::vector<double> grid = scenario.grid();
  return measure_scenario(scenario, grid);
}

}  // namespace obskit
