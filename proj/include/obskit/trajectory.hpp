#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "obskit/errors.hpp"

namespace obskit {

using Vec2 = Eigen::Vector2d;

inline constexpr double kDefaultEpsRange = 1e-9;

/// Uniformly spaced times covering [t0, t1], both ends included.
inline std::vector<double> uniform_grid(double t0, double t1, std::size_t points) {
  if (points < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
  std::vector<double> grid(points);
  const double step = (t1 - t0) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) grid[k] = t0 + step * static_cast<double>(k);
  grid.back() = t1;
  return grid;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

/// Planar trajectory x(t) = sum_k a_k (t - ref_time)^k.
///
/// Coefficients are Taylor coefficients (a_k = x^(k)(ref_time) / k!). The
/// matching state vector used by the transition matrix stores raw derivatives
/// [x, y, x', y', ..., x^(p), y^(p)].
class PolynomialTrajectory {
 public:
  PolynomialTrajectory(double ref_time, std::vector<Vec2> coeffs)
      : ref_time_(ref_time), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("PolynomialTrajectory: no coefficients");
  }

  static PolynomialTrajectory stationary(double ref_time, const Vec2& position) {
    return {ref_time, {position}};
  }

  /// Inverse of state_vector().
  static PolynomialTrajectory from_state(double ref_time, const Eigen::VectorXd& state) {
    if (state.size() < 2 || state.size() % 2 != 0) {
      throw std::invalid_argument("PolynomialTrajectory::from_state: odd or empty state");
    }
    const int blocks = static_cast<int>(state.size() / 2);
    std::vector<Vec2> coeffs(blocks);
    for (int k = 0; k < blocks; ++k) coeffs[k] = state.segment<2>(2 * k) / factorial(k);
    return {ref_time, std::move(coeffs)};
  }

  double ref_time() const noexcept { return ref_time_; }
  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Vec2>& coeffs() const noexcept { return coeffs_; }

  /// d-th time derivative at t; zero when d exceeds the order.
  Vec2 eval(double t, int derivative_order = 0) const {
    if (derivative_order < 0) throw std::invalid_argument("eval: negative derivative order");
    const int p = order();
    if (derivative_order > p) return Vec2::Zero();
    const double dt = t - ref_time_;
    Vec2 acc = Vec2::Zero();
    for (int k = p; k >= derivative_order; --k) {
      acc = acc * dt + coeffs_[k] * (factorial(k) / factorial(k - derivative_order));
    }
    return acc;
  }

  /// Raw-derivative state [x, y, x', y', ...] at ref_time.
  Eigen::VectorXd state_vector() const {
    Eigen::VectorXd state(2 * coeffs_.size());
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      state.segment<2>(2 * static_cast<Eigen::Index>(k)) = coeffs_[k] * factorial(static_cast<int>(k));
    }
    return state;
  }

  /// Same trajectory with zero coefficients appended up to `order`.
  PolynomialTrajectory padded(int order) const {
    if (order <= this->order()) return *this;
    std::vector<Vec2> coeffs = coeffs_;
    coeffs.resize(static_cast<std::size_t>(order) + 1, Vec2::Zero());
    return {ref_time_, std::move(coeffs)};
  }

  /// Coefficientwise difference; both operands must share ref_time.
  friend PolynomialTrajectory operator-(const PolynomialTrajectory& a, const PolynomialTrajectory& b) {
    if (a.ref_time_ != b.ref_time_) {
      throw std::invalid_argument("PolynomialTrajectory: reference times differ");
    }
    const int p = std::max(a.order(), b.order());
    std::vector<Vec2> coeffs(static_cast<std::size_t>(p) + 1, Vec2::Zero());
    for (int k = 0; k <= a.order(); ++k) coeffs[k] += a.coeffs_[k];
    for (int k = 0; k <= b.order(); ++k) coeffs[k] -= b.coeffs_[k];
    return {a.ref_time_, std::move(coeffs)};
  }

  friend bool operator==(const PolynomialTrajectory& a, const PolynomialTrajectory& b) {
    return a.ref_time_ == b.ref_time_ && a.coeffs_ == b.coeffs_;
  }

 private:
  double ref_time_;
  std::vector<Vec2> coeffs_;
};

/// Target state relative to the observer.
struct RelativeState {
  Vec2 position;
  Vec2 velocity;
  double range;
  double range_rate;
};

inline RelativeState make_relative_state(const Vec2& position, const Vec2& velocity, double time,
                                         double eps_range = kDefaultEpsRange) {
  const double range = position.norm();
  if (range < eps_range) throw ZeroRange(time);
  return {position, velocity, range, velocity.dot(position) / range};
}

inline RelativeState relative_state(const PolynomialTrajectory& target,
                                    const PolynomialTrajectory& observer, double t,
                                    double eps_range = kDefaultEpsRange) {
  return make_relative_state(target.eval(t) - observer.eval(t), target.eval(t, 1) - observer.eval(t, 1),
                             t, eps_range);
}

/// Positions known only on a time grid.
struct SampledTrajectory {
  std::vector<double> times;
  std::vector<Vec2> positions;

  SampledTrajectory(std::vector<double> t, std::vector<Vec2> p)
      : times(std::move(t)), positions(std::move(p)) {
    if (times.size() != positions.size()) {
      throw std::invalid_argument("SampledTrajectory: times and positions differ in length");
    }
    if (times.size() < 2) throw std::invalid_argument("SampledTrajectory: need at least 2 samples");
    for (std::size_t k = 1; k < times.size(); ++k) {
      if (!(times[k] > times[k - 1])) {
        throw std::invalid_argument("SampledTrajectory: times must be strictly increasing");
      }
    }
  }

  static SampledTrajectory sample(const PolynomialTrajectory& traj, std::span<const double> grid) {
    std::vector<Vec2> positions;
    positions.reserve(grid.size());
    for (double t : grid) positions.push_back(traj.eval(t));
    return {std::vector<double>(grid.begin(), grid.end()), std::move(positions)};
  }
};

/// Second-order finite-difference derivative of samples on a (possibly
/// non-uniform) grid: three-point central stencil inside, three-point one-sided
/// stencil at the two ends. Two samples degrade to a single secant slope.
template <typename Value>
std::vector<Value> differentiate(std::span<const double> times, std::span<const Value> values) {
  const std::size_t n = times.size();
  if (n != values.size() || n < 2) throw std::invalid_argument("differentiate: bad sample count");
  std::vector<Value> out(n);
  if (n == 2) {
    const Value slope = (values[1] - values[0]) / (times[1] - times[0]);
    out[0] = slope;
    out[1] = slope;
    return out;
  }
  // Derivative at x0 of the quadratic through (x0,f0),(x1,f1),(x2,f2).
  const auto stencil = [](double x0, double x1, double x2, const Value& f0, const Value& f1,
                          const Value& f2) -> Value {
    const double h1 = x1 - x0;
    const double h2 = x2 - x0;
    const double w1 = h2 / (h1 * (h2 - h1));
    const double w2 = -h1 / (h2 * (h2 - h1));
    const double w0 = -(w1 + w2);
    return f0 * w0 + f1 * w1 + f2 * w2;
  };
  out[0] = stencil(times[0], times[1], times[2], values[0], values[1], values[2]);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    out[k] = stencil(times[k], times[k - 1], times[k + 1], values[k], values[k - 1], values[k + 1]);
  }
  out[n - 1] = stencil(times[n - 1], times[n - 2], times[n - 3], values[n - 1], values[n - 2],
                       values[n - 3]);
  return out;
}

/// State transition matrix of an order-p planar polynomial motion.
///
/// Block (k, j) for j >= k is (t - t_ref)^(j-k) / (j-k)! * I2, so the top block
/// row maps the raw-derivative state at t_ref onto the position at t.
inline Eigen::MatrixXd transition_matrix(int p, double t, double t_ref) {
  if (p < 0) throw std::invalid_argument("transition_matrix: negative order");
  const int n = p + 1;
  const double dt = t - t_ref;
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    double coeff = 1.0;
    for (int j = k; j < n; ++j) {
      if (j > k) coeff *= dt / (j - k);
      phi(2 * k, 2 * j) = coeff;
      phi(2 * k + 1, 2 * j + 1) = coeff;
    }
  }
  return phi;
}

/// Size of the super state for the given per-target orders: 2 * sum(p_i + 1).
inline Eigen::Index super_state_size(std::span<const int> orders) {
  Eigen::Index s = 0;
  for (int p : orders) s += p + 1;
  return 2 * s;
}

/// Block-diagonal transition matrix of the super state.
inline Eigen::MatrixXd assemble_block_transition(std::span<const int> orders, double t, double t_ref) {
  if (orders.empty()) throw std::invalid_argument("assemble_block_transition: no targets");
  const Eigen::Index size = super_state_size(orders);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(size, size);
  Eigen::Index offset = 0;
  for (int p : orders) {
    const Eigen::Index block = 2 * (p + 1);
    phi.block(offset, offset, block, block) = transition_matrix(p, t, t_ref);
    offset += block;
  }
  return phi;
}

/// System matrix E of the chain integrator x^(k)' = x^(k+1), x^(p)' = 0.
inline Eigen::MatrixXd chain_integrator(int p) {
  const int size = 2 * (p + 1);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(size, size);
  for (int r = 0; r + 2 < size; ++r) e(r, r + 2) = 1.0;
  return e;
}

/// Fixed-step classical RK4 integration of the chain integrator from t_begin to t_end.
inline Eigen::VectorXd propagate_ode(const Eigen::VectorXd& x_initial, double t_begin, double t_end,
                                     int steps) {
  if (steps < 1) throw std::invalid_argument("propagate_ode: steps must be >= 1");
  if (x_initial.size() < 2 || x_initial.size() % 2 != 0) {
    throw std::invalid_argument("propagate_ode: state size must be a positive even number");
  }
  const Eigen::MatrixXd e = chain_integrator(static_cast<int>(x_initial.size() / 2) - 1);
  const double h = (t_end - t_begin) / steps;
  Eigen::VectorXd x = x_initial;
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXd k1 = e * x;
    const Eigen::VectorXd k2 = e * (x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = e * (x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = e * (x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace obskit
