#ifndef CAPWAVE_SURFACE_HPP
#define CAPWAVE_SURFACE_HPP

#include <Eigen/Core>

#include "capwave/grid.hpp"
#include "capwave/unduloid.hpp"

namespace capwave {

// Sampled even periodic free surface with first and second z-derivatives on
// the half-period grid, plus its period mean <eta>.
struct SurfaceProfile {
  PeriodicEvenGrid grid;
  Eigen::VectorXd eta;
  Eigen::VectorXd eta_z;
  Eigen::VectorXd eta_zz;
  double mean = 0.0;

  double min_eta() const { return eta.minCoeff(); }
};

// Derivatives by second-order centered differences with even reflection at
// both half-period endpoints; mean by the trapezoid rule.
SurfaceProfile profile_from_samples(const PeriodicEvenGrid& grid, const Eigen::VectorXd& eta);

// Exact unduloid samples with chain-rule derivatives at the nodes.
SurfaceProfile profile_from_unduloid(const unduloid::ShapeParams& base,
                                     const PeriodicEvenGrid& grid);

// Trapezoid-rule mean of half-period samples (equals the full-period mean of
// the even extension).
double trapezoid_mean(const PeriodicEvenGrid& grid, const Eigen::VectorXd& values);

}  // namespace capwave

#endif  // CAPWAVE_SURFACE_HPP
