#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "obskit/ambiguity.hpp"
#include "obskit/random.hpp"
#include "obskit/scenario.hpp"
#include "obskit/trajectory.hpp"

namespace obskit::testing {

/// Taylor expansion (degree q) of a circular arc of radius r about `center`,
/// starting at angle phi0 and sweeping `sweep` radians over [0, duration].
inline PolynomialTrajectory loop_observer(const Vec2& center, double r, double phi0, double sweep,
                                          double duration, int q) {
  std::vector<Vec2> coeffs;
  const double w = sweep / duration;
  double scale = r;
  for (int k = 0; k <= q; ++k) {
    if (k > 0) scale *= w / k;
    const double a = phi0 + k * std::numbers::pi / 2;
    coeffs.emplace_back(scale * std::cos(a), scale * std::sin(a));
  }
  coeffs[0] += center;
  return {0.0, std::move(coeffs)};
}

/// Two order-p targets on either side of the origin watched by an observer that
/// loops above them; bearings stay at least 0.3 rad apart modulo pi.
inline Scenario separated_pair(int p, double duration = 4.0, std::size_t points = 401) {
  const PolynomialTrajectory observer = loop_observer({6.8, 31.0}, 25.5, -2.9, 6.2, duration, 15);
  std::vector<Vec2> a{{-10.0, 0.0}};
  std::vector<Vec2> b{{10.0, 0.0}};
  for (int k = 1; k <= p; ++k) {
    a.push_back(Vec2(0.3, 0.2) / std::pow(duration, k));
    b.push_back(Vec2(-0.25, 0.3) / std::pow(duration, k));
  }
  Scenario s{observer,
             {{PolynomialTrajectory(0.0, a), Tonal(300.0)}, {PolynomialTrajectory(0.0, b), Tonal(420.0)}},
             0.0,
             duration,
             points};
  return s;
}

/// Target 1 sits on the line through the observer and target 0 for all t:
/// same side (even multiple of pi) when lambda > 0, observer in between when lambda < 0.
inline Scenario collinear_pair(TrajectorySampler& smp, int p, double lambda) {
  const PolynomialTrajectory observer =
      smp.polynomial(0.0, Vec2::Zero(), p + 1, {8.0, 0.4, 0.02, 0.001, 5e-5});
  const PolynomialTrajectory first =
      smp.polynomial(0.0, smp.point_on_annulus(Vec2::Zero(), 2000, 4000), p, {5.0, 0.1, 0.005});
  const PolynomialTrajectory padded = first.padded(observer.order());
  std::vector<Vec2> coeffs;
  for (int k = 0; k <= observer.order(); ++k) {
    coeffs.push_back((1.0 - lambda) * observer.coeffs()[k] + lambda * padded.coeffs()[k]);
  }
  Scenario s{observer,
             {{first, std::nullopt}, {PolynomialTrajectory(0.0, std::move(coeffs)), std::nullopt}},
             0.0,
             60.0,
             241};
  return s;
}

/// Random s <= 8 scenario: 1 to 3 targets of order 0 to 2, either a
/// maneuvering observer or a constant-velocity one.
inline Scenario random_scenario(TrajectorySampler& smp, bool maneuvering) {
  const int targets = smp.uniform_int(1, 3);
  std::vector<int> orders;
  int total = 0;
  for (int i = 0; i < targets; ++i) {
    orders.push_back(smp.uniform_int(0, 2));
    total += orders.back() + 1;
  }
  if (total > 8) --orders.back();
  const int max_order = *std::max_element(orders.begin(), orders.end());
  const PolynomialTrajectory observer =
      maneuvering ? smp.polynomial(0.0, Vec2::Zero(), max_order + 1, {600.0, 400.0, 300.0, 200.0})
                  : smp.polynomial(0.0, Vec2::Zero(), 1, {400.0});
  std::vector<TargetSpec> specs;
  for (int p : orders) {
    specs.push_back({smp.polynomial(0.0, smp.point_on_annulus(Vec2::Zero(), 500, 1500), p, {100.0, 50.0}),
                     std::nullopt});
  }
  Scenario s{observer, std::move(specs), 0.0, 1.0, 201};
  return s;
}

struct DopplerCase {
  PolynomialTrajectory observer;
  PolynomialTrajectory base;
  double f_j0;
  DopplerAmbiguitySpec spec;
  std::vector<double> grid;
  SampledTrajectory generated;
};

inline PolynomialTrajectory random_observer(TrajectorySampler& smp) {
  return smp.polynomial(0.0, Vec2::Zero(), 2, {8.0, 0.1});
}

inline PolynomialTrajectory random_base(TrajectorySampler& smp) {
  return smp.polynomial(0.0, smp.point_on_annulus(Vec2::Zero(), 3000, 6000), smp.uniform_int(1, 3),
                        {10.0, 0.05, 5e-4});
}

/// Random (l', b', psi) with psi bounded away from zero, resampled until the
/// counterpart range stays positive.
inline DopplerCase random_doppler_case(TrajectorySampler& smp) {
  for (;;) {
    const PolynomialTrajectory observer = random_observer(smp);
    const PolynomialTrajectory base = random_base(smp);
    const double f_j0 = smp.uniform(200.0, 2000.0);
    const std::vector<double> grid = uniform_grid(0.0, 60.0, 601);
    const double psi0 = (smp.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * smp.uniform(0.05, 1.0);
    const double psi1 = smp.uniform(-0.005, 0.005);
    const double amp = smp.uniform(0.0, 0.02);
    const double omega = smp.uniform(0.05, 0.3);
    DopplerAmbiguitySpec spec{smp.uniform(0.98, 1.02), smp.uniform(-800.0, 800.0),
                              SampledFunction::on_grid(
                                  grid, [=](double t) { return psi0 + psi1 * t + amp * std::sin(omega * t); })};
    try {
      SampledTrajectory generated = generate_doppler_ambiguous(base, observer, spec, grid);
      return {observer, base, f_j0, std::move(spec), grid, std::move(generated)};
    } catch (const NonPositiveRange&) {
    }
  }
}

struct BearingCase {
  PolynomialTrajectory observer;
  PolynomialTrajectory base;
  double f0;
  SampledFunction alpha;
  bool constant_alpha;
  std::vector<double> grid;
  SampledTrajectory generated;
};

/// Random positive alpha'(t); constant (and different from one) when `constant` is set.
inline BearingCase random_bearing_case(TrajectorySampler& smp, bool constant) {
  const PolynomialTrajectory observer = random_observer(smp);
  const PolynomialTrajectory base = random_base(smp);
  const double f0 = smp.uniform(200.0, 2000.0);
  const std::vector<double> grid = uniform_grid(0.0, 60.0, 601);
  const double mean = smp.uniform(0.5, 2.0);
  const double amp = constant ? 0.0 : smp.uniform(0.05, 0.4) * mean;
  const double omega = smp.uniform(0.02, 0.3);
  const double phase = smp.uniform(-std::numbers::pi, std::numbers::pi);
  SampledFunction alpha =
      SampledFunction::on_grid(grid, [=](double t) { return mean + amp * std::sin(omega * t + phase); });
  SampledTrajectory generated = generate_bearing_ambiguous(base, observer, alpha, grid);
  return {observer, base, f0, std::move(alpha), constant, grid, std::move(generated)};
}

}  // namespace obskit::testing
