#ifndef CAPWAVE_FLOW1D_HPP
#define CAPWAVE_FLOW1D_HPP

#include <Eigen/Core>
#include <functional>

namespace capwave::flow1d {

// User-supplied vorticity function gamma and swirl F with gamma(0) = F(0) = 0.
// Closures must be safe to call concurrently.
struct VorticityModel {
  std::function<double(double)> gamma;
  std::function<double(double)> gamma_prime;
  std::function<double(double)> F;
  std::function<double(double)> F_prime;
  std::function<double(double)> FF_prime;  // x -> F(x) F'(x)
  double FF_prime_deriv_at_0 = 0.0;        // (FF')'(0) = F'(0)^2
};

// Throws std::invalid_argument if gamma(0) != 0, F(0) != 0, or FF_prime is
// inconsistent with F * F_prime on sampled test points.
void validate_model(const VorticityModel& model);

// Radially symmetric base flow in a cylinder of radius d, rescaled to
// s = r/d: psi^{lambda,d}(s) = psi(s d) where
//   psi_rr + (3/r) psi_r = -gamma(r^2 psi) - (FF')(r^2 psi)/r^2,
//   psi(0) = lambda, psi_r(0) = 0.
struct TrivialFlow {
  double lambda = 0.0;
  double d = 0.0;
  Eigen::VectorXd psi;    // n uniform samples of psi^{lambda,d} on [0,1]
  Eigen::VectorXd psi_s;  // d/ds psi^{lambda,d}, from the integrator state
  double m = 0.0;         // d^2 psi^{lambda,d}(1)

  double psi1() const { return psi(psi.size() - 1); }
  double psi_s1() const { return psi_s(psi_s.size() - 1); }
};

// Integrator tolerances (read-only for tests).
inline constexpr double ode_abs_tol = 1e-11;
inline constexpr double ode_rel_tol = 1e-11;

TrivialFlow solve_trivial_flow(double lambda, double d, const VorticityModel& model, int n);

// m(lambda, d) = d^2 psi^{lambda,d}(1).
double m_of(double lambda, double d, const VorticityModel& model);

}  // namespace capwave::flow1d

#endif  // CAPWAVE_FLOW1D_HPP
