#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "obskit/measurement.hpp"
#include "obskit/observability.hpp"
#include "obskit/scenario.hpp"
#include "obskit/trajectory.hpp"

namespace obskit {

enum class Uniqueness { unique, degenerate };

inline std::string_view to_string(Uniqueness u) {
  return u == Uniqueness::unique ? "unique" : "degenerate";
}

struct EstimateResult {
  double ref_time;
  std::vector<int> orders;
  /// Absolute raw-derivative states of all targets at ref_time, concatenated.
  Eigen::VectorXd x_initial_hat;
  double residual_norm;
  /// sigma_max / sigma_min of the stacked pseudo-linear system (inf when singular).
  double condition_number;
  /// sigma_min / sigma_max of the normal matrix, i.e. the squared stacked ratio.
  double normal_ratio;
  Uniqueness uniqueness;
  /// Right singular vector of the smallest singular value.
  Eigen::VectorXd weakest_direction;

  /// Trajectory of target i implied by the estimate.
  PolynomialTrajectory target(std::size_t i) const {
    Eigen::Index offset = 0;
    for (std::size_t k = 0; k < i; ++k) offset += 2 * (orders.at(k) + 1);
    return PolynomialTrajectory::from_state(ref_time,
                                            x_initial_hat.segment(offset, 2 * (orders.at(i) + 1)));
  }
};

/// Pseudo-linear least squares in absolute coordinates. For every target i and
/// sample k the row [cos th, -sin th] Phi_i(t_k, t_0) multiplies the target
/// state and the observer position supplies the right-hand side
/// cos th x_ob(t_k) - sin th y_ob(t_k).
inline EstimateResult estimate_initial_state(const PolynomialTrajectory& observer,
                                             const MeasurementHistory& history,
                                             std::span<const int> orders, double rank_tol) {
  if (orders.size() != history.target_count()) {
    throw std::invalid_argument("estimate_initial_state: orders do not match the history");
  }
  if (history.times.empty()) throw std::invalid_argument("estimate_initial_state: empty history");
  const std::size_t samples = history.times.size();
  const double t0 = history.times.front();
  const Eigen::Index unknowns = super_state_size(orders);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(orders.size() * samples), unknowns);
  Eigen::VectorXd b(a.rows());
  Eigen::Index offset = 0;
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const Eigen::Index width = 2 * (orders[i] + 1);
    for (std::size_t k = 0; k < samples; ++k, ++row) {
      const double t = history.times[k];
      const double theta = history.bearings[i][k];
      a.block(row, offset, 1, width) = pseudo_row(theta, orders[i]) * transition_matrix(orders[i], t, t0);
      const Vec2 ob = observer.eval(t);
      b(row) = std::cos(theta) * ob.x() - std::sin(theta) * ob.y();
    }
    offset += width;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double ratio = sigma_ratio(sv);
  const Eigen::Index rank_limit = std::min(a.rows(), a.cols());

  EstimateResult result;
  result.ref_time = t0;
  result.orders.assign(orders.begin(), orders.end());
  // A wide system (fewer rows than unknowns) is rank deficient by construction.
  const bool wide = a.rows() < a.cols();
  result.normal_ratio = wide ? 0.0 : ratio * ratio;
  result.condition_number =
      (wide || !(ratio > 0.0)) ? std::numeric_limits<double>::infinity() : 1.0 / ratio;
  result.uniqueness = result.normal_ratio > rank_tol ? Uniqueness::unique : Uniqueness::degenerate;

  // Only numerically null directions are dropped; weak but genuine ones stay.
  svd.setThreshold(1e-12);
  result.x_initial_hat = svd.solve(b);
  result.residual_norm = (a * result.x_initial_hat - b).norm();
  if (wide) {
    Eigen::JacobiSVD<Eigen::MatrixXd> full(a, Eigen::ComputeFullV);
    result.weakest_direction = full.matrixV().col(unknowns - 1);
  } else {
    result.weakest_direction = svd.matrixV().col(rank_limit - 1);
  }
  return result;
}

/// Maximum bearing deviation between `history` and bearings replayed from the estimate.
inline double replay_error(const PolynomialTrajectory& observer, const MeasurementHistory& history,
                           const EstimateResult& result) {
  double worst = 0.0;
  for (std::size_t i = 0; i < history.target_count(); ++i) {
    const PolynomialTrajectory target = result.target(i);
    for (std::size_t k = 0; k < history.times.size(); ++k) {
      const double t = history.times[k];
      const Vec2 rel = target.eval(t) - observer.eval(t);
      const double replayed = rel.norm() > 0.0 ? std::atan2(rel.x(), rel.y())
                                                : std::numeric_limits<double>::quiet_NaN();
      const double err = angular_distance(replayed, history.bearings[i][k]);
      worst = std::isnan(err) ? std::numeric_limits<double>::infinity() : std::max(worst, err);
    }
  }
  return worst;
}

/// Replays bearings on the scenario grid and returns the maximum deviation.
inline double cross_validate(const Scenario& scenario, const EstimateResult& result) {
  return replay_error(scenario.observer, measure_scenario(scenario), result);
}

inline EstimateResult estimate_initial_state(const Scenario& scenario) {
  const std::vector<int> orders = scenario.motion_orders();
  return estimate_initial_state(scenario.observer, measure_scenario(scenario), orders,
                                scenario.tolerances.rank_tol);
}

}  // namespace obskit
