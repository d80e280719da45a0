#include "capwave/flow1d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "capwave/errors.hpp"

namespace capwave::flow1d {

namespace {

void require_consistent(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("VorticityModel: " + what);
}

struct State {
  double psi;
  double v;  // psi_r
};

State operator+(State a, State b) { return {a.psi + b.psi, a.v + b.v}; }
State operator*(double c, State a) { return {c * a.psi, c * a.v}; }

}  // namespace

void validate_model(const VorticityModel& model) {
  require_consistent(static_cast<bool>(model.gamma) && static_cast<bool>(model.F) &&
                         static_cast<bool>(model.FF_prime),
                     "gamma, F, FF_prime closures must be set");
  require_consistent(std::abs(model.gamma(0.0)) <= 1e-12, "gamma(0) must vanish");
  require_consistent(std::abs(model.F(0.0)) <= 1e-12, "F(0) must vanish");
  if (model.F_prime) {
    for (double x : {-1.7, -0.4, 0.0, 0.31, 1.0, 2.6}) {
      const double direct = model.F(x) * model.F_prime(x);
      const double given = model.FF_prime(x);
      const double scale = 1.0 + std::abs(direct);
      require_consistent(std::abs(direct - given) <= 1e-10 * scale,
                         "FF_prime inconsistent with F * F_prime at x = " + std::to_string(x));
    }
  }
}

TrivialFlow solve_trivial_flow(double lambda, double d, const VorticityModel& model, int n) {
  if (!(d > 0.0)) throw std::invalid_argument("solve_trivial_flow: d must be positive");
  if (n < 32) throw std::invalid_argument("solve_trivial_flow: n must be >= 32");
  validate_model(model);

  TrivialFlow out;
  out.lambda = lambda;
  out.d = d;
  out.psi.resize(n);
  out.psi_s.resize(n);

  const auto rhs = [&](double r, State y) -> State {
    const double x = r * r * y.psi;
    const double q = model.FF_prime(x) / (r * r);
    return {y.v, -model.gamma(x) - q - 3.0 * y.v / r};
  };

  // Taylor startup past the removable 3/r singularity: psi = lambda + c2 r^2,
  // 8 c2 = -(gamma(0) + (FF')'(0) lambda).
  const double c2 = -(model.gamma(0.0) + model.FF_prime_deriv_at_0 * lambda) / 8.0;
  const double hs = d / (n - 1);
  const double r_start = std::min(1e-4 * d, 0.5 * hs);

  out.psi(0) = lambda;
  out.psi_s(0) = 0.0;

  double r = r_start;
  State y{lambda + c2 * r * r, 2.0 * c2 * r};

  // Dormand-Prince 5(4), stepping exactly onto each output node.
  static constexpr double c_[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a_[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double b5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                                   -2187.0 / 6784, 11.0 / 84,  0.0};
  static constexpr double b4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                   -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  double h = 0.1 * hs;
  int next_node = 1;
  while (next_node < n) {
    const double r_target = next_node * hs;
    if (h > r_target - r) h = r_target - r;
    if (h < 1e-14 * d) {
      throw convergence_error("solve_trivial_flow: step underflow (pathological model?)");
    }

    std::array<State, 7> k;
    k[0] = rhs(r, y);
    for (int i = 1; i < 7; ++i) {
      State yi = y;
      for (int j = 0; j < i; ++j) yi = yi + (h * a_[i][j]) * k[j];
      k[i] = rhs(r + c_[i] * h, yi);
    }
    State y5{0, 0}, y4{0, 0};
    for (int i = 0; i < 7; ++i) {
      y5 = y5 + (h * b5[i]) * k[i];
      y4 = y4 + (h * b4[i]) * k[i];
    }
    y5 = y + y5;
    y4 = y + y4;

    const double err_psi = std::abs(y5.psi - y4.psi) / (ode_abs_tol + ode_rel_tol * std::abs(y5.psi));
    const double err_v = std::abs(y5.v - y4.v) / (ode_abs_tol + ode_rel_tol * std::abs(y5.v));
    const double err = std::max(err_psi, err_v);

    if (!std::isfinite(err)) {  // blow-up inside the stage evaluations
      h *= 0.2;
      continue;
    }
    if (err <= 1.0) {
      r += h;
      y = y5;
      if (r >= r_target - 1e-14 * d) {
        r = r_target;
        out.psi(next_node) = y.psi;
        out.psi_s(next_node) = d * y.v;  // d/ds = d * d/dr
        ++next_node;
      }
    }
    const double safety = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(safety, 0.2, 5.0);
  }

  out.m = d * d * out.psi(n - 1);
  return out;
}

double m_of(double lambda, double d, const VorticityModel& model) {
  return solve_trivial_flow(lambda, d, model, 64).m;
}

}  // namespace capwave::flow1d
