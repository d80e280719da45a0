#ifndef CAPWAVE_GRID_HPP
#define CAPWAVE_GRID_HPP

#include <Eigen/Core>
#include <numbers>
#include <stdexcept>

namespace capwave {

// Uniform nodes on the half period [0, pi*b0], both endpoints included.
// Values on this grid stand for even 2*pi*b0-periodic functions (even
// reflection about z = 0 and z = pi*b0).
struct PeriodicEvenGrid {
  double b0 = 1.0;
  int n = 0;

  PeriodicEvenGrid() = default;
  PeriodicEvenGrid(double b0_, int n_) : b0(b0_), n(n_) {
    if (!(b0 > 0.0) || n < 16) {
      throw std::invalid_argument("PeriodicEvenGrid: need b0 > 0 and n >= 16");
    }
  }

  double h() const { return std::numbers::pi * b0 / (n - 1); }
  double node(int i) const { return i * h(); }
  double half_period() const { return std::numbers::pi * b0; }
  double period() const { return 2.0 * std::numbers::pi * b0; }
  bool same_as(const PeriodicEvenGrid& o) const { return b0 == o.b0 && n == o.n; }
};

struct GridFunction {
  PeriodicEvenGrid grid;
  Eigen::VectorXd values;

  GridFunction() = default;
  GridFunction(const PeriodicEvenGrid& g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n) {
      throw std::invalid_argument("GridFunction: value count does not match grid");
    }
  }
  static GridFunction zero(const PeriodicEvenGrid& g) {
    return GridFunction(g, Eigen::VectorXd::Zero(g.n));
  }
};

}  // namespace capwave

#endif  // CAPWAVE_GRID_HPP
