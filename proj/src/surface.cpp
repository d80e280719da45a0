#include "capwave/surface.hpp"

namespace capwave {

double trapezoid_mean(const PeriodicEvenGrid& grid, const Eigen::VectorXd& values) {
  double sum = 0.5 * (values(0) + values(grid.n - 1));
  for (int i = 1; i < grid.n - 1; ++i) sum += values(i);
  return sum * grid.h() / grid.half_period();
}

SurfaceProfile profile_from_samples(const PeriodicEvenGrid& grid, const Eigen::VectorXd& eta) {
  if (eta.size() != grid.n) {
    throw std::invalid_argument("profile_from_samples: sample count does not match grid");
  }
  const int n = grid.n;
  const double h = grid.h();
  Eigen::VectorXd ez = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd ezz(n);
  for (int i = 1; i < n - 1; ++i) {
    ez(i) = (eta(i + 1) - eta(i - 1)) / (2.0 * h);
    ezz(i) = (eta(i + 1) - 2.0 * eta(i) + eta(i - 1)) / (h * h);
  }
  // Even reflection: ghost values eta(-1) = eta(1), eta(n) = eta(n-2).
  ezz(0) = 2.0 * (eta(1) - eta(0)) / (h * h);
  ezz(n - 1) = 2.0 * (eta(n - 2) - eta(n - 1)) / (h * h);
  const double mean = trapezoid_mean(grid, eta);
  return {grid, eta, std::move(ez), std::move(ezz), mean};
}

SurfaceProfile profile_from_unduloid(const unduloid::ShapeParams& base,
                                     const PeriodicEvenGrid& grid) {
  const int n = grid.n;
  Eigen::VectorXd eta(n), ez(n), ezz(n);
  for (int i = 0; i < n; ++i) {
    const unduloid::ProfileSample s = unduloid::profile_eval(base, grid.node(i));
    eta(i) = s.eta;
    ez(i) = s.eta_z;
    ezz(i) = s.eta_zz;
  }
  const double mean = trapezoid_mean(grid, eta);
  return {grid, std::move(eta), std::move(ez), std::move(ezz), mean};
}

}  // namespace capwave
