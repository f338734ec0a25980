#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "obskit/trajectory.hpp"

namespace obskit {

inline constexpr double kDefaultSoundSpeed = 1500.0;

/// Narrowband frequency radiated by a target.
struct Tonal {
  double f0;

  explicit Tonal(double hz) : f0(hz) {
    if (!(hz > 0.0)) throw std::invalid_argument("Tonal: f0 must be positive");
  }

  friend bool operator==(const Tonal&, const Tonal&) = default;
};

struct Tolerances {
  double rank_tol = 1e-8;          // relative sigma_min / sigma_max
  double collinearity_tol = 1e-3;  // rad
  double tol_f = 1e-6;             // Hz per kHz of radiated tonal
  double tol_theta = 1e-8;         // rad
  double eps_range = kDefaultEpsRange;  // m

  /// Absolute Doppler tolerance for a tonal of `f0` Hz.
  double doppler_tolerance(double f0) const { return tol_f * f0 / 1000.0; }

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct TargetSpec {
  PolynomialTrajectory trajectory;
  std::optional<Tonal> tonal;

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

/// Observer, targets and observation window. All trajectories are expanded
/// about t_start.
struct Scenario {
  PolynomialTrajectory observer;
  std::vector<TargetSpec> targets;
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t grid_points = 2;
  double c = kDefaultSoundSpeed;
  Tolerances tolerances{};

  std::vector<double> grid() const { return uniform_grid(t_start, t_end, grid_points); }

  std::size_t target_count() const noexcept { return targets.size(); }

  /// Own motion order N_i of each target; these size the estimated state.
  std::vector<int> motion_orders() const {
    std::vector<int> orders;
    orders.reserve(targets.size());
    for (const auto& target : targets) orders.push_back(target.trajectory.order());
    return orders;
  }

  /// Order of the relative motion, p_i = max{N_i, N_OB}.
  int relative_order(std::size_t i) const {
    return std::max(targets.at(i).trajectory.order(), observer.order());
  }

  /// Target trajectory zero-padded to the relative order.
  PolynomialTrajectory padded_target(std::size_t i) const {
    return targets.at(i).trajectory.padded(relative_order(i));
  }

  /// Target-minus-observer trajectory with order p_i.
  PolynomialTrajectory relative_trajectory(std::size_t i) const { return padded_target(i) - observer; }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

}  // namespace obskit
