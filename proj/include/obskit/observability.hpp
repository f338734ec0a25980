#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "obskit/measurement.hpp"
#include "obskit/quadrature.hpp"
#include "obskit/scenario.hpp"
#include "obskit/trajectory.hpp"

namespace obskit {

enum class RankDecision { observable, unobservable };

inline std::string_view to_string(RankDecision d) {
  return d == RankDecision::observable ? "observable" : "unobservable";
}

/// Distance of theta_j - theta_i from the nearest multiple of pi, in [0, pi/2].
inline double separation_mod_pi(double theta_i, double theta_j) {
  const double diff = theta_j - theta_i;
  return std::abs(diff - std::numbers::pi * std::round(diff / std::numbers::pi));
}

/// det [cos th_i, -sin th_i; cos th_j, -sin th_j] = sin(th_i - th_j).
inline double check_M_submatrix(double theta_i, double theta_j) {
  return -std::cos(theta_i) * std::sin(theta_j) + std::sin(theta_i) * std::cos(theta_j);
}

struct SeparationResult {
  double min_separation;
  std::pair<std::size_t, std::size_t> pair;
  double time;
};

/// Minimum over samples and target pairs of the bearing separation modulo pi.
inline SeparationResult bearing_separation_mod_pi(const MeasurementHistory& history) {
  const std::size_t m = history.target_count();
  if (m < 2) throw std::invalid_argument("bearing_separation_mod_pi: need at least two targets");
  SeparationResult best{std::numeric_limits<double>::infinity(), {0, 1}, history.times.front()};
  for (std::size_t k = 0; k < history.times.size(); ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double sep = separation_mod_pi(history.bearings[i][k], history.bearings[j][k]);
        if (sep < best.min_separation) best = {sep, {i, j}, history.times[k]};
      }
    }
  }
  return best;
}

/// Maximal run of grid samples on which a target pair is collinear with the observer.
struct CollinearityEvent {
  std::pair<std::size_t, std::size_t> pair;
  double t_begin;
  double t_end;
  double separation_min;

  friend bool operator==(const CollinearityEvent&, const CollinearityEvent&) = default;
};

inline std::vector<CollinearityEvent> detect_collinearity(const MeasurementHistory& history,
                                                          double collinearity_tol) {
  const std::size_t m = history.target_count();
  if (m < 2) throw std::invalid_argument("detect_collinearity: need at least two targets");
  std::vector<CollinearityEvent> events;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      std::optional<CollinearityEvent> open;
      for (std::size_t k = 0; k < history.times.size(); ++k) {
        const double sep = separation_mod_pi(history.bearings[i][k], history.bearings[j][k]);
        if (sep < collinearity_tol) {
          if (!open) open = CollinearityEvent{{i, j}, history.times[k], history.times[k], sep};
          open->t_end = history.times[k];
          open->separation_min = std::min(open->separation_min, sep);
        } else if (open) {
          events.push_back(*open);
          open.reset();
        }
      }
      if (open) events.push_back(*open);
    }
  }
  return events;
}

/// C(t) * Phi(t, t_start) for the absolute target state: one row per target,
/// columns ordered by target then by derivative order.
inline Eigen::MatrixXd observation_rows(const Scenario& scenario, double t) {
  const std::vector<int> orders = scenario.motion_orders();
  std::vector<double> thetas;
  thetas.reserve(orders.size());
  for (std::size_t i = 0; i < scenario.targets.size(); ++i) {
    const Vec2 rel = scenario.targets[i].trajectory.eval(t) - scenario.observer.eval(t);
    if (rel.norm() < scenario.tolerances.eps_range) throw ZeroRange(t, i);
    thetas.push_back(bearing(rel, scenario.tolerances.eps_range));
  }
  return assemble_C(thetas, orders) * assemble_block_transition(orders, t, scenario.t_start);
}

/// Observability Gramian integral of Phi^T C^T C Phi over the window by
/// composite Simpson; an even node count is padded by one.
inline Eigen::MatrixXd gramian(const Scenario& scenario, std::size_t quadrature_nodes) {
  if (quadrature_nodes < 2) throw std::invalid_argument("gramian: need at least 2 quadrature nodes");
  const std::vector<int> orders = scenario.motion_orders();
  const Eigen::Index size = super_state_size(orders);
  if (scenario.t_end == scenario.t_start) return Eigen::MatrixXd::Zero(size, size);
  const auto integrand = [&](double t) -> Eigen::MatrixXd {
    const Eigen::MatrixXd rows = observation_rows(scenario, t);
    return rows.transpose() * rows;
  };
  const Eigen::MatrixXd g =
      simpson(integrand, scenario.t_start, scenario.t_end, simpson_nodes(quadrature_nodes));
  return 0.5 * (g + g.transpose());
}

/// Weighted stack B of observation rows over the Simpson nodes, so that
/// B^T B equals the Gramian. Its right singular vectors are the Gramian's.
inline Eigen::MatrixXd gramian_factor(const Scenario& scenario, std::size_t quadrature_nodes) {
  if (quadrature_nodes < 2) throw std::invalid_argument("gramian_factor: need at least 2 quadrature nodes");
  const std::vector<int> orders = scenario.motion_orders();
  const Eigen::Index size = super_state_size(orders);
  const Eigen::Index m = static_cast<Eigen::Index>(orders.size());
  if (scenario.t_end == scenario.t_start) return Eigen::MatrixXd::Zero(m, size);
  const std::size_t nodes = simpson_nodes(quadrature_nodes);
  const double a = scenario.t_start;
  const double b = scenario.t_end;
  const double h = (b - a) / static_cast<double>(nodes - 1);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(nodes) * m, size);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = (k + 1 == nodes) ? b : a + h * static_cast<double>(k);
    out.middleRows(static_cast<Eigen::Index>(k) * m, m) =
        std::sqrt(simpson_weight(k, nodes, a, b)) * observation_rows(scenario, t);
  }
  return out;
}

struct ObservabilityReport {
  Eigen::MatrixXd gramian;
  Eigen::VectorXd singular_values;  // descending
  double rank_tol;
  double sigma_ratio;
  RankDecision rank_decision;
  std::optional<Eigen::VectorXd> null_vector;
  /// sigma_min / sigma_max of each target's own diagonal Gramian block.
  std::vector<double> target_sigma_ratios;
  std::optional<SeparationResult> min_pairwise_separation;
  std::vector<CollinearityEvent> collinearity_events;

  bool target_observable(std::size_t i) const { return target_sigma_ratios.at(i) > rank_tol; }
};

inline double sigma_ratio(const Eigen::VectorXd& singular_values) {
  if (singular_values.size() == 0) return 0.0;
  const double top = singular_values(0);
  if (!(top > 0.0)) return 0.0;
  return singular_values(singular_values.size() - 1) / top;
}

/// Gramian rank test plus bearing-geometry diagnostics.
inline ObservabilityReport check_observable(const Scenario& scenario, double rank_tol,
                                            std::size_t quadrature_nodes) {
  ObservabilityReport report;
  report.gramian = gramian(scenario, quadrature_nodes);
  report.rank_tol = rank_tol;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(report.gramian);
  report.singular_values = svd.singularValues();
  report.sigma_ratio = sigma_ratio(report.singular_values);
  report.rank_decision =
      report.sigma_ratio > rank_tol ? RankDecision::observable : RankDecision::unobservable;
  if (report.rank_decision == RankDecision::unobservable) {
    // Taken from the square-root factor: same vector, without squaring the conditioning.
    const Eigen::MatrixXd factor = gramian_factor(scenario, quadrature_nodes);
    Eigen::JacobiSVD<Eigen::MatrixXd> root(factor, Eigen::ComputeFullV);
    Eigen::VectorXd y = root.matrixV().col(root.matrixV().cols() - 1);
    // Sign convention: largest-magnitude entry positive, for reproducible output.
    Eigen::Index idx = 0;
    y.cwiseAbs().maxCoeff(&idx);
    if (y(idx) < 0.0) y = -y;
    report.null_vector = y;
  }

  Eigen::Index offset = 0;
  for (int p : scenario.motion_orders()) {
    const Eigen::Index block = 2 * (p + 1);
    Eigen::JacobiSVD<Eigen::MatrixXd> block_svd(report.gramian.block(offset, offset, block, block));
    report.target_sigma_ratios.push_back(sigma_ratio(block_svd.singularValues()));
    offset += block;
  }

  if (scenario.target_count() >= 2) {
    const MeasurementHistory history = measure_scenario(scenario);
    report.min_pairwise_separation = bearing_separation_mod_pi(history);
    report.collinearity_events = detect_collinearity(history, scenario.tolerances.collinearity_tol);
  }
  return report;
}

inline ObservabilityReport check_observable(const Scenario& scenario) {
  return check_observable(scenario, scenario.tolerances.rank_tol, scenario.grid_points);
}

/// max over grid of |C(t) Phi(t, t_start) y|; zero for an unobservable direction.
inline double witness_residual(const Scenario& scenario, const Eigen::VectorXd& y,
                               std::span<const double> grid) {
  double worst = 0.0;
  for (double t : grid) worst = std::max(worst, (observation_rows(scenario, t) * y).norm());
  return worst;
}

}  // namespace obskit
