#ifndef CAPWAVE_CONTINUATION_HPP
#define CAPWAVE_CONTINUATION_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "capwave/flow1d.hpp"
#include "capwave/grid.hpp"
#include "capwave/linops.hpp"
#include "capwave/pde.hpp"
#include "capwave/surface.hpp"
#include "capwave/unduloid.hpp"

namespace capwave::continuation {

// One unknown of the free-boundary problem: axial velocity parameter, surface
// profile, interior stream correction, and the fixed Bernoulli constant
// Q = -sigma kappa^{b0,k0} (never mutated along a branch).
struct FlowState {
  double lambda = 0.0;
  GridFunction eta;
  pde::MeridianFunction phi;  // zero trace at s = 1
  double sigma = 1.0;
  double Q = 0.0;
  double m = 0.0;         // derived: m(lambda, <eta>)
  double mean_eta = 0.0;  // derived: trapezoid mean of eta
};

struct Residual {
  GridFunction r_eta;
  pde::MeridianFunction r_phi;  // surface row identically zero
  double inf_norm() const;
};

struct StateDiagnostics {
  double residual_inf = 0.0;
  double min_eta = 0.0;
  double eta_norm = 0.0;  // C^2 surrogate: max|eta| + max|eta_z| + max|eta_zz|
  double vorticity_norm = 0.0;
  int newton_iterations = 0;
  bool loop_back_suspected = false;
};

enum class Termination {
  lambda_range_exhausted,
  norm_blowup,
  vorticity_norm_blowup,
  axis_approach,
  newton_failure,
  max_steps,
};

std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

struct Branch {
  std::vector<FlowState> states;
  std::vector<StateDiagnostics> diagnostics;
  Termination termination = Termination::lambda_range_exhausted;
};

struct Limits {
  double max_abs_lambda = 0.05;
  double max_eta_norm = 50.0;
  double min_eta_floor = 1e-3;  // default 1e-3 * b0, set by the caller
  double max_vorticity_norm = 1e6;
  int max_steps = 500;
  double newton_tol = 1e-9;
  int newton_max_iter = 25;
  double alpha = 0.5;  // Hoelder exponent entering the vorticity norm
};

// The static unduloid configuration: lambda = 0, eta = eta^{b0,k0}, phi = 0,
// Q = -sigma kappa^{b0,k0}. k0 = 0 is allowed for the degenerate diagnostics.
FlowState static_state(const unduloid::ShapeParams& base, double sigma, int n_z, int n_s);

// F(lambda, eta, phi) = (eta, phi) - M(lambda, eta, phi): the smoothed
// Bernoulli update and the Dirichlet solve A.
Residual residual_F(const FlowState& state, const flow1d::VorticityModel& model);

// Dense forward-difference Jacobian of the packed residual over the
// (eta, phi-interior) unknowns at fixed lambda.
Eigen::MatrixXd fd_jacobian(const FlowState& state, const flow1d::VorticityModel& model);

// Newton at fixed lambda down to ||residual||_inf <= tol; throws
// convergence_error on stagnation and inadmissible_state if an iterate's
// surface dips to the axis.
FlowState newton_correct(const FlowState& state, const flow1d::VorticityModel& model, double tol,
                         int max_iter, int* iterations_out = nullptr);

// Natural-parameter continuation with step halving on Newton failure
// (minimum step 1e-6 |dlambda|).
Branch continue_branch(const FlowState& start, const flow1d::VorticityModel& model,
                       double dlambda, const Limits& limits);

// || r^{-(2 alpha+1)/5} omega^theta ||_{L^{5/(2-alpha)}} over one periodic
// cell of the axisymmetric domain, with omega^theta = -r gamma(Psi) - (FF')(Psi)/r
// and Psi = r^2 (phi + <eta>^2 psi^{lambda,<eta>}/eta^2) reconstructed on the
// physical meridian.
double vorticity_norm(const FlowState& state, const flow1d::VorticityModel& model, double alpha);

StateDiagnostics diagnose(const FlowState& state, const flow1d::VorticityModel& model,
                          double alpha, int newton_iterations);

}  // namespace capwave::continuation

#endif  // CAPWAVE_CONTINUATION_HPP
