#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "obskit/errors.hpp"
#include "obskit/measurement.hpp"
#include "obskit/scenario.hpp"
#include "obskit/trajectory.hpp"

namespace obskit {

/// Scalar function known on a grid, linear between nodes and held constant
/// outside the sampled range.
struct SampledFunction {
  std::vector<double> times;
  std::vector<double> values;

  static SampledFunction on_grid(std::span<const double> grid, const std::function<double(double)>& f) {
    SampledFunction out;
    out.times.assign(grid.begin(), grid.end());
    out.values.reserve(grid.size());
    for (double t : grid) out.values.push_back(f(t));
    return out;
  }

  static SampledFunction constant(std::span<const double> grid, double value) {
    return on_grid(grid, [value](double) { return value; });
  }

  double operator()(double t) const {
    if (times.empty()) throw std::logic_error("SampledFunction: no samples");
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto upper = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t k = static_cast<std::size_t>(upper - times.begin());
    const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
    return (1.0 - w) * values[k - 1] + w * values[k];
  }
};

inline Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

enum class Regime { doppler, bearing, combined };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::doppler:
      return "doppler";
    case Regime::bearing:
      return "bearing";
    case Regime::combined:
      return "combined";
  }
  return "unknown";
}

/// Parameters of a Doppler-ambiguous counterpart of a base target j. The
/// counterpart i has range l' s_j(t) + b' + c (1 - l')(t - t0) and a direction
/// rotated from that of j by `rotation(t)`.
struct DopplerAmbiguitySpec {
  double l_prime;  // f_j0 / f_i0
  double b_prime;  // s_i0 - l' s_j0, meters
  SampledFunction rotation;
  double c = kDefaultSoundSpeed;

  void validate() const {
    if (!(l_prime > 0.0)) throw std::invalid_argument("DopplerAmbiguitySpec: l' must be positive");
    if (!(c > 0.0)) throw std::invalid_argument("DopplerAmbiguitySpec: c must be positive");
  }

  /// Tonal radiated by the generated target given the base tonal.
  double counterpart_tonal(double base_f0) const { return base_f0 / l_prime; }

  /// Range of the counterpart given the base range at time t.
  double counterpart_range(double base_range, double t, double t0) const {
    return l_prime * base_range + b_prime + c * (1.0 - l_prime) * (t - t0);
  }

  /// W(t) = R(psi(t)) [l' + (b' + c (1 - l')(t - t0)) / s_j(t)].
  Eigen::Matrix2d transform(double base_range, double t, double t0) const {
    return obskit::rotation(rotation(t)) * (counterpart_range(base_range, t, t0) / base_range);
  }
};

/// Doppler-ambiguous counterpart of `base`, sampled on `grid` (t0 = grid front).
inline SampledTrajectory generate_doppler_ambiguous(const PolynomialTrajectory& base,
                                                    const PolynomialTrajectory& observer,
                                                    const DopplerAmbiguitySpec& spec,
                                                    std::span<const double> grid,
                                                    double eps_range = kDefaultEpsRange) {
  spec.validate();
  if (grid.size() < 2) throw std::invalid_argument("generate_doppler_ambiguous: grid too short");
  const double t0 = grid.front();
  std::vector<Vec2> positions;
  positions.reserve(grid.size());
  for (double t : grid) {
    const Vec2 ob = observer.eval(t);
    const Vec2 rel_j = base.eval(t) - ob;
    const double s_j = rel_j.norm();
    if (s_j < eps_range) throw ZeroRange(t);
    const double s_i = spec.counterpart_range(s_j, t, t0);
    if (!(s_i > eps_range)) throw NonPositiveRange(t);
    positions.push_back(ob + s_i * (obskit::rotation(spec.rotation(t)) * (rel_j / s_j)));
  }
  return {std::vector<double>(grid.begin(), grid.end()), std::move(positions)};
}

/// Bearing-ambiguous counterpart: observer + alpha(t) (base - observer).
inline SampledTrajectory generate_bearing_ambiguous(const PolynomialTrajectory& base,
                                                    const PolynomialTrajectory& observer,
                                                    const SampledFunction& alpha,
                                                    std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("generate_bearing_ambiguous: grid too short");
  std::vector<Vec2> positions;
  positions.reserve(grid.size());
  for (double t : grid) {
    const double a = alpha(t);
    if (!(a > 0.0)) throw NonPositiveAlpha(t);
    const Vec2 ob = observer.eval(t);
    positions.push_back(ob + a * (base.eval(t) - ob));
  }
  return {std::vector<double>(grid.begin(), grid.end()), std::move(positions)};
}

using Track = std::variant<PolynomialTrajectory, SampledTrajectory>;

/// Observer-relative kinematics of a track on a grid.
struct TrackKinematics {
  std::vector<Vec2> positions;  // absolute
  std::vector<Vec2> relative;
  std::vector<double> ranges;
  std::vector<double> range_rates;
  std::vector<double> bearings;
  /// Bound on the finite-difference range-rate error (zero for polynomial tracks).
  double range_rate_slack = 0.0;
};

namespace detail {

inline bool same_grid(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double scale = std::max({1.0, std::abs(a[k]), std::abs(b[k])});
    if (std::abs(a[k] - b[k]) > 1e-12 * scale) return false;
  }
  return true;
}

/// Estimated error of the three-point range-rate stencil: h^2/3 |s'''| with the
/// third derivative itself estimated by repeated differentiation.
inline double range_rate_slack(std::span<const double> times, std::span<const double> ranges) {
  if (times.size() < 4) return 0.0;
  const std::vector<double> d1 = differentiate<double>(times, ranges);
  const std::vector<double> d2 = differentiate<double>(times, d1);
  const std::vector<double> d3 = differentiate<double>(times, d2);
  double h = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) h = std::max(h, times[k] - times[k - 1]);
  double peak = 0.0;
  for (double v : d3) peak = std::max(peak, std::abs(v));
  return h * h / 3.0 * peak;
}

}  // namespace detail

inline TrackKinematics kinematics(const Track& track, const PolynomialTrajectory& observer,
                                  std::span<const double> grid, double eps_range = kDefaultEpsRange) {
  TrackKinematics out;
  const std::size_t n = grid.size();
  out.positions.reserve(n);
  out.relative.reserve(n);
  out.ranges.reserve(n);
  out.bearings.reserve(n);
  if (const auto* poly = std::get_if<PolynomialTrajectory>(&track)) {
    for (double t : grid) {
      const RelativeState rel = relative_state(*poly, observer, t, eps_range);
      out.positions.push_back(poly->eval(t));
      out.relative.push_back(rel.position);
      out.ranges.push_back(rel.range);
      out.range_rates.push_back(rel.range_rate);
      out.bearings.push_back(bearing(rel));
    }
    return out;
  }
  const auto& sampled = std::get<SampledTrajectory>(track);
  if (!detail::same_grid(sampled.times, grid)) {
    throw std::invalid_argument("kinematics: sampled track is not defined on the analysis grid");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 rel = sampled.positions[k] - observer.eval(grid[k]);
    if (rel.norm() < eps_range) throw ZeroRange(grid[k]);
    out.positions.push_back(sampled.positions[k]);
    out.relative.push_back(rel);
    out.ranges.push_back(rel.norm());
    out.bearings.push_back(bearing(rel, eps_range));
  }
  out.range_rates = differentiate<double>(grid, out.ranges);
  out.range_rate_slack = detail::range_rate_slack(grid, out.ranges);
  return out;
}

struct AmbiguityCertificate {
  Track trajectory_i;
  Track trajectory_j;
  Regime regime;
  double f_i0;
  double f_j0;
  double residual_doppler;   // Hz, max over grid
  double residual_bearing;   // rad, max over grid
  double doppler_tolerance;  // Hz, includes discretization slack
  double discretization_slack;
  double bearing_tolerance;  // rad
  double max_position_gap;   // m, max |s~_i - s~_j|
  bool doppler_ambiguous;
  bool bearing_ambiguous;
  bool ambiguous;
};

/// Compares the Doppler and bearing histories of two tracks on `grid`.
inline AmbiguityCertificate verify_ambiguity(const Track& traj_i, const Track& traj_j,
                                             const PolynomialTrajectory& observer, double f_i0,
                                             double f_j0, double c, std::span<const double> grid,
                                             const Tolerances& tol, Regime regime) {
  const Tonal tonal_i(f_i0);
  const Tonal tonal_j(f_j0);
  const TrackKinematics ki = kinematics(traj_i, observer, grid, tol.eps_range);
  const TrackKinematics kj = kinematics(traj_j, observer, grid, tol.eps_range);

  AmbiguityCertificate cert{traj_i, traj_j, regime, f_i0, f_j0, 0.0, 0.0, 0.0, 0.0,
                            tol.tol_theta, 0.0, false, false, false};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double fi = doppler(tonal_i, ki.range_rates[k], c);
    const double fj = doppler(tonal_j, kj.range_rates[k], c);
    cert.residual_doppler = std::max(cert.residual_doppler, std::abs(fi - fj));
    cert.residual_bearing =
        std::max(cert.residual_bearing, angular_distance(ki.bearings[k], kj.bearings[k]));
    cert.max_position_gap = std::max(cert.max_position_gap, (ki.positions[k] - kj.positions[k]).norm());
  }
  // Doppler error from a range-rate error e is f0 e / c; keep a factor 2 margin.
  cert.discretization_slack = 2.0 * (f_i0 * ki.range_rate_slack + f_j0 * kj.range_rate_slack) / c;
  cert.doppler_tolerance = tol.doppler_tolerance(std::max(f_i0, f_j0)) + cert.discretization_slack;
  cert.doppler_ambiguous = cert.residual_doppler < cert.doppler_tolerance;
  cert.bearing_ambiguous = cert.residual_bearing < cert.bearing_tolerance;
  switch (regime) {
    case Regime::doppler:
      cert.ambiguous = cert.doppler_ambiguous;
      break;
    case Regime::bearing:
      cert.ambiguous = cert.bearing_ambiguous;
      break;
    case Regime::combined:
      cert.ambiguous = cert.doppler_ambiguous && cert.bearing_ambiguous;
      break;
  }
  return cert;
}

/// Max over grid of |(s~_i - s~_j) - (W - I) s_j| / s_j.
inline double transform_identity_residual(const Track& traj_i, const PolynomialTrajectory& traj_j,
                                          const PolynomialTrajectory& observer,
                                          const DopplerAmbiguitySpec& spec, std::span<const double> grid,
                                          double eps_range = kDefaultEpsRange) {
  const TrackKinematics ki = kinematics(traj_i, observer, grid, eps_range);
  const double t0 = grid.front();
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec2 s_j = traj_j.eval(grid[k]) - observer.eval(grid[k]);
    const double range_j = s_j.norm();
    const Eigen::Matrix2d w = spec.transform(range_j, grid[k], t0);
    const Vec2 lhs = ki.positions[k] - traj_j.eval(grid[k]);
    const Vec2 rhs = (w - Eigen::Matrix2d::Identity()) * s_j;
    worst = std::max(worst, (lhs - rhs).norm() / range_j);
  }
  return worst;
}

struct CombinedConditionReport {
  std::vector<double> alpha;       // Rayleigh quotient of W(t) at s_j(t)
  double max_eigen_residual;       // max |W s_j - alpha s_j| / s_j
  double max_alpha_deviation;      // max |alpha - 1|
  double max_transform_residual;   // see transform_identity_residual
  bool eigenvector_condition;
  bool alpha_is_one;
  bool combined_ambiguous;
};

/// Eigenvector test W(t) s_j(t) = alpha(t) s_j(t) with alpha(t) = 1.
inline CombinedConditionReport check_combined_condition(const Track& traj_i,
                                                        const PolynomialTrajectory& traj_j,
                                                        const PolynomialTrajectory& observer,
                                                        const DopplerAmbiguitySpec& spec,
                                                        std::span<const double> grid,
                                                        double tolerance = 1e-8,
                                                        double eps_range = kDefaultEpsRange) {
  spec.validate();
  CombinedConditionReport report{{}, 0.0, 0.0, 0.0, false, false, false};
  const double t0 = grid.front();
  for (double t : grid) {
    const Vec2 s_j = traj_j.eval(t) - observer.eval(t);
    const double range_j = s_j.norm();
    if (range_j < eps_range) throw ZeroRange(t);
    const Eigen::Matrix2d w = spec.transform(range_j, t, t0);
    const Vec2 image = w * s_j;
    const double alpha = s_j.dot(image) / s_j.squaredNorm();
    report.alpha.push_back(alpha);
    report.max_eigen_residual = std::max(report.max_eigen_residual, (image - alpha * s_j).norm() / range_j);
    report.max_alpha_deviation = std::max(report.max_alpha_deviation, std::abs(alpha - 1.0));
  }
  report.max_transform_residual = transform_identity_residual(traj_i, traj_j, observer, spec, grid, eps_range);
  report.eigenvector_condition = report.max_eigen_residual < tolerance;
  report.alpha_is_one = report.max_alpha_deviation < tolerance;
  report.combined_ambiguous = report.eigenvector_condition && report.alpha_is_one;
  return report;
}

struct SufficiencyReport {
  bool same_tonal;
  bool transform_is_identity;
  bool same_relative_position;
  bool all_hold;
  double max_transform_deviation;  // max entry of |W(t) - I|
  double max_position_gap;         // m
  double residual_doppler;
  double doppler_tolerance;
  bool doppler_ambiguous;
  /// False only if all three conditions hold yet the Doppler histories differ.
  bool implication_confirmed;
};

/// Checks the three sufficient conditions for equal Doppler histories: equal
/// tonals, W(t) = I, and s_i(t) = s_j(t). W(t) is reconstructed from the pair:
/// l' = f_j0 / f_i0, b' = s_i(t0) - l' s_j(t0), rotation = angle from s_j to s_i.
inline SufficiencyReport check_sufficiency(const Track& traj_i, const Track& traj_j,
                                           const PolynomialTrajectory& observer, double f_i0,
                                           double f_j0, double c, std::span<const double> grid,
                                           const Tolerances& tol, double position_tol = 1e-6) {
  const TrackKinematics ki = kinematics(traj_i, observer, grid, tol.eps_range);
  const TrackKinematics kj = kinematics(traj_j, observer, grid, tol.eps_range);
  const double l_prime = f_j0 / f_i0;
  const double b_prime = ki.ranges.front() - l_prime * kj.ranges.front();
  const double t0 = grid.front();

  SufficiencyReport report{};
  report.same_tonal = std::abs(f_i0 - f_j0) <= 1e-12 * std::max(f_i0, f_j0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec2& s_i = ki.relative[k];
    const Vec2& s_j = kj.relative[k];
    const double psi = std::atan2(s_j.x() * s_i.y() - s_j.y() * s_i.x(), s_j.dot(s_i));
    const double scale = (l_prime * kj.ranges[k] + b_prime + c * (1.0 - l_prime) * (grid[k] - t0)) / kj.ranges[k];
    const Eigen::Matrix2d w = rotation(psi) * scale;
    report.max_transform_deviation =
        std::max(report.max_transform_deviation, (w - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
    report.max_position_gap = std::max(report.max_position_gap, (s_i - s_j).norm());
  }
  report.transform_is_identity = report.max_transform_deviation < tol.tol_theta;
  report.same_relative_position = report.max_position_gap < position_tol;
  report.all_hold = report.same_tonal && report.transform_is_identity && report.same_relative_position;

  const AmbiguityCertificate cert =
      verify_ambiguity(traj_i, traj_j, observer, f_i0, f_j0, c, grid, tol, Regime::doppler);
  report.residual_doppler = cert.residual_doppler;
  report.doppler_tolerance = cert.doppler_tolerance;
  report.doppler_ambiguous = cert.doppler_ambiguous;
  report.implication_confirmed = !report.all_hold || report.doppler_ambiguous;
  return report;
}

}  // namespace obskit
