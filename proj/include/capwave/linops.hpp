#ifndef CAPWAVE_LINOPS_HPP
#define CAPWAVE_LINOPS_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "capwave/grid.hpp"
#include "capwave/surface.hpp"
#include "capwave/unduloid.hpp"

namespace capwave::linops {

// Certificate acceptance constants (read-only for tests).
inline constexpr double kernel_min_order = 1.9;       // residual decay order bound
inline constexpr double sigma_stability_rel = 0.05;   // grid drift bound for sigma_min

// Solve u - u_zz = f on the even-periodic space (homogeneous Neumann at both
// half-period endpoints), second-order accurate. Always solvable.
GridFunction helmholtz_inverse(const GridFunction& f);

// Apply 1 - d_zz discretely (the forward operator of helmholtz_inverse).
GridFunction helmholtz_apply(const GridFunction& u);

// Linearized surface operator
//   T = d_zz + (eta_z/eta - 3 eta_zz eta_z/(1+eta_z^2)) d_z + (1+eta_z^2)/eta^2
// with coefficients from the unduloid profile at (b0,k0); at k0 = 0 it reduces
// exactly to d_zz + 1/b0^2.
GridFunction T_apply(const GridFunction& v, const unduloid::ShapeParams& base);
GridFunction T_apply(const GridFunction& v, const SurfaceProfile& base);

// Dense matrix of T on the even-periodic half grid (even reflection rows).
Eigen::MatrixXd assemble_T(const SurfaceProfile& base);

double smallest_singular_value(const Eigen::MatrixXd& m);

// max |T eta_z| on a full-period grid of 2(n-1) nodes with periodic stencils;
// eta_z is odd, so this kernel direction lives outside the even subspace.
double etaz_kernel_residual(const unduloid::ShapeParams& base, int n);

struct VKernelDiag {
  double residual;     // max |T v| over one period, v = d_b eta - (d_b kappa/d_k kappa) d_k eta
  double witness_err;  // max |v(z+2 pi b0) - v(z) + 2 pi eta_z(z)|
  double fd_floor;     // max |FD d_k eta - chain-rule d_k eta| over sampled z
};
VKernelDiag v_kernel_diagnostics(const unduloid::ShapeParams& base, int n);

struct KernelGridReport {
  int n = 0;
  double h = 0.0;
  double res_etaz = 0.0;
  double res_v = 0.0;
  double witness_err = 0.0;
  double sigma_min = 0.0;
};

struct KernelCertificate {
  unduloid::ShapeParams base{1.0, 0.5};
  bool degenerate = false;  // k0 == 0: sigma_min ladder only
  std::vector<KernelGridReport> grids;
  std::vector<double> orders_etaz;  // per consecutive grid pair
  std::vector<double> orders_v;
  double fd_floor = 0.0;            // FD-vs-chain-rule error floor in d_k eta
  double sigma_drift = 0.0;         // relative sigma_min change across the last pair
  double sigma_extrapolated = 0.0;  // second-order Richardson limit of sigma_min
  bool passed = false;
  std::string failure;
};

// Numerically certify the injectivity lemma for T on the even-periodic space
// (and, at k0 = 0, the cos(z/b0) kernel of the degenerate case) over a ladder
// of grids. Grid sizes must be strictly increasing, at least two of them.
KernelCertificate kernel_certificate(const unduloid::ShapeParams& base,
                                     const std::vector<int>& grid_sizes);

}  // namespace capwave::linops

#endif  // CAPWAVE_LINOPS_HPP
