#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "obskit/scenario.hpp"
#include "obskit/trajectory.hpp"

namespace obskit {

/// Seeded source of random planar motions for the randomized checks.
class TrajectorySampler {
 public:
  explicit TrajectorySampler(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() noexcept { return rng_; }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Vec2 direction() {
    const double a = uniform(-std::numbers::pi, std::numbers::pi);
    return {std::cos(a), std::sin(a)};
  }

  /// Position somewhere on an annulus [r_min, r_max] about `center`.
  Vec2 point_on_annulus(const Vec2& center, double r_min, double r_max) {
    return center + uniform(r_min, r_max) * direction();
  }

  /// Order-p trajectory about ref_time starting at `origin`; the k-th Taylor
  /// coefficient has a random direction and magnitude up to rate_scales[k-1].
  PolynomialTrajectory polynomial(double ref_time, const Vec2& origin, int order,
                                  const std::vector<double>& rate_scales) {
    std::vector<Vec2> coeffs{origin};
    for (int k = 1; k <= order; ++k) {
      const double scale = rate_scales.at(static_cast<std::size_t>(k - 1));
      coeffs.push_back(uniform(0.3 * scale, scale) * direction());
    }
    return {ref_time, std::move(coeffs)};
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace obskit
