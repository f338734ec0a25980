#pragma once

#include <cstddef>
#include <stdexcept>
#include <type_traits>

namespace obskit {

/// Composite Simpson weights (h/3)[1, 4, 2, ..., 2, 4, 1] for `nodes` uniform
/// nodes on [a, b]. `nodes` must be odd and >= 3.
inline double simpson_weight(std::size_t k, std::size_t nodes, double a, double b) {
  const double h = (b - a) / static_cast<double>(nodes - 1);
  if (k == 0 || k + 1 == nodes) return h / 3.0;
  return (k % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
}

/// Composite Simpson rule for a value-typed integrand (scalars, Eigen
/// matrices). The integrand is evaluated once per node, in grid order.
template <typename Integrand>
auto simpson(Integrand&& f, double a, double b, std::size_t nodes) {
  if (nodes < 3 || nodes % 2 == 0) {
    throw std::invalid_argument("simpson: node count must be odd and at least 3");
  }
  const double h = (b - a) / static_cast<double>(nodes - 1);
  using Value = std::decay_t<decltype(f(a))>;
  Value sum = f(a) * simpson_weight(0, nodes, a, b);
  for (std::size_t k = 1; k < nodes; ++k) {
    const double t = (k + 1 == nodes) ? b : a + h * static_cast<double>(k);
    sum += f(t) * simpson_weight(k, nodes, a, b);
  }
  return sum;
}

/// Smallest odd node count >= `nodes` (and >= 3).
inline std::size_t simpson_nodes(std::size_t nodes) {
  if (nodes < 3) return 3;
  return nodes % 2 == 0 ? nodes + 1 : nodes;
}

}  // namespace obskit
