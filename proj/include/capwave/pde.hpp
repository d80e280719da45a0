#ifndef CAPWAVE_PDE_HPP
#define CAPWAVE_PDE_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <complex>
#include <memory>

#include "capwave/flow1d.hpp"
#include "capwave/grid.hpp"
#include "capwave/surface.hpp"
#include "capwave/unduloid.hpp"

namespace capwave::pde {

// Tensor grid on the flattened meridian strip [0,1] x half period.
struct MeridianGrid {
  int n_s = 0;             // nodes in s, axis s=0 and surface s=1 included
  PeriodicEvenGrid zgrid;  // even-periodic z direction

  MeridianGrid() = default;
  MeridianGrid(int n_s_, const PeriodicEvenGrid& z) : n_s(n_s_), zgrid(z) {
    if (n_s < 16) throw std::invalid_argument("MeridianGrid: n_s must be >= 16");
  }
  double hs() const { return 1.0 / (n_s - 1); }
  double s(int i) const { return i * hs(); }
  int n_z() const { return zgrid.n; }
  bool same_as(const MeridianGrid& o) const { return n_s == o.n_s && zgrid.same_as(o.zgrid); }
};

// Values on the meridian grid, laid out values(i, j) = f(s_i, z_j).
struct MeridianFunction {
  MeridianGrid grid;
  Eigen::MatrixXd values;

  MeridianFunction() = default;
  MeridianFunction(const MeridianGrid& g, Eigen::MatrixXd v) : grid(g), values(std::move(v)) {
    if (values.rows() != g.n_s || values.cols() != g.n_z()) {
      throw std::invalid_argument("MeridianFunction: shape does not match grid");
    }
  }
  static MeridianFunction zero(const MeridianGrid& g) {
    return MeridianFunction(g, Eigen::MatrixXd::Zero(g.n_s, g.n_z()));
  }
  double surface_trace_abs_max() const { return values.row(values.rows() - 1).cwiseAbs().maxCoeff(); }
};

// Radial reduction of the flattened operator
//   L^eta phi = phi_zz + (1/eta^2) [ (1+eta_z^2 s^2) phi_ss + (3/s) phi_s
//               - 2 eta eta_z s phi_sz - (eta eta_zz - 2 eta_z^2) s phi_s ]
// discretized at second order; at the axis the removable (3/s) phi_s becomes
// 3 phi_ss. Applied at every node (one-sided stencils on the surface row).
MeridianFunction L_eta_apply(const SurfaceProfile& eta, const MeridianFunction& phi);

// Factorized Dirichlet problem for L^eta: unknowns are all rows below s = 1,
// where the trace is fixed to zero.
class DirichletSolver {
 public:
  DirichletSolver(const SurfaceProfile& eta, const MeridianGrid& grid);

  // Solve L^eta u = rhs (rhs given on unknown rows; values at s=1 are zero).
  MeridianFunction solve(const Eigen::MatrixXd& rhs_interior) const;

  const MeridianGrid& grid() const { return grid_; }

 private:
  MeridianGrid grid_;
  Eigen::SparseMatrix<double> matrix_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

// Right-hand side of the A-solve for given data (lambda, eta, phi):
//   -L^eta u - gamma(eta^2 s^2 X) - (FF')(eta^2 s^2 X)/(eta^2 s^2),
// with u = <eta>^2 psi^{lambda,<eta>}(s)/eta^2 and X = phi + u; the axis value
// of the FF' quotient is the removable limit (FF')'(0) X(0,z).
Eigen::MatrixXd a_solve_rhs(const SurfaceProfile& eta, const MeridianFunction& phi,
                            const flow1d::TrivialFlow& flow, const flow1d::VorticityModel& model);

// A(lambda, eta, phi): the Dirichlet solve against a_solve_rhs. The overload
// taking a precomputed flow and factorization is the hot path of the solver.
MeridianFunction solve_A(double lambda, const SurfaceProfile& eta, const MeridianFunction& phi,
                         const flow1d::VorticityModel& model);
MeridianFunction solve_A(const DirichletSolver& solver, const SurfaceProfile& eta,
                         const MeridianFunction& phi, const flow1d::TrivialFlow& flow,
                         const flow1d::VorticityModel& model);

// Trivial flow sampled exactly on the meridian s-nodes (refined if n_s is
// below the integrator's minimum grid).
flow1d::TrivialFlow flow_on_grid(double lambda, double d, const flow1d::VorticityModel& model,
                                 const MeridianGrid& grid);

struct EigCheckResult {
  std::complex<double> eigenvalue;  // smallest-magnitude eigenvalue
  double magnitude = 0.0;
  int n_s = 0;
  int n_z = 0;
};

// Smallest-magnitude eigenvalue of L^{eta^{b0,k0}} + gamma'(0) eta^2 s^2 + F'(0)^2
// on radial functions with the Dirichlet surface condition. A value near zero
// warns that the linearization assumption may fail.
EigCheckResult eigenvalue_check(const unduloid::ShapeParams& base, double gamma_prime_0,
                                double F_prime_0, const MeridianGrid& grid);

}  // namespace capwave::pde

#endif  // CAPWAVE_PDE_HPP
