#include "capwave/continuation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "capwave/errors.hpp"

namespace capwave::continuation {

namespace {

constexpr double kPi = std::numbers::pi;

// Everything eta- and lambda-dependent that the residual reuses across
// phi-perturbations: discrete profile, trivial flow, factorized L^eta.
struct Prepared {
  SurfaceProfile prof;
  flow1d::TrivialFlow flow;
  std::optional<pde::DirichletSolver> lsolver;
};

class ResidualEvaluator {
 public:
  ResidualEvaluator(const flow1d::VorticityModel& model, double sigma, double Q,
                    const pde::MeridianGrid& grid)
      : model_(model), sigma_(sigma), q_(Q), grid_(grid) {}

  void prepare(double lambda, const Eigen::VectorXd& eta_values) {
    prep_.prof = profile_from_samples(grid_.zgrid, eta_values);
    if (!(prep_.prof.min_eta() > 0.0)) {
      throw inadmissible_state("residual_F: state outside the admissible set (min eta <= 0)");
    }
    prep_.flow = pde::flow_on_grid(lambda, prep_.prof.mean, model_, grid_);
    prep_.lsolver.emplace(prep_.prof, grid_);
  }

  const Prepared& prepared() const { return prep_; }

  Residual eval(const Eigen::MatrixXd& phi_values) const {
    const int ns = grid_.n_s;
    const int nz = grid_.n_z();
    const double hs = grid_.hs();
    const SurfaceProfile& prof = prep_.prof;
    const flow1d::TrivialFlow& flow = prep_.flow;

    const pde::MeridianFunction phi{grid_, phi_values};
    const pde::MeridianFunction a = pde::solve_A(*prep_.lsolver, prof, phi, flow, model_);

    // Surface traces: one-sided second-order A_s at s = 1 (A vanishes there).
    const double mean2 = prof.mean * prof.mean;
    const double m = flow.m;
    const double psi_s1 = flow.psi_s1();
    const double Fm = model_.F(m);

    Eigen::VectorXd inner(nz);
    for (int j = 0; j < nz; ++j) {
      const double e = prof.eta(j);
      const double ez = prof.eta_z(j);
      const double e2 = e * e;
      const double sa_s = (-4.0 * a.values(ns - 2, j) + a.values(ns - 3, j)) / (2.0 * hs);
      const double t1 = sa_s + mean2 * psi_s1 / e2;
      const double t2 = sa_s + (2.0 * m + mean2 * psi_s1) / e2;
      const double w = 0.5 * (t1 * t1 + ez * ez * t2 * t2) + Fm * Fm / (2.0 * e2) +
                       2.0 * m * t1 / e2 + 2.0 * m * m / (e2 * e2) - q_;
      const double slope = std::sqrt(1.0 + ez * ez);
      inner(j) = e - slope * slope * slope * (sigma_ / (e * slope) + w) / sigma_;
    }
    const GridFunction m1 = linops::helmholtz_inverse({grid_.zgrid, inner});

    Residual res;
    res.r_eta = GridFunction{grid_.zgrid, prof.eta - m1.values};
    res.r_phi = pde::MeridianFunction{grid_, phi_values - a.values};
    return res;
  }

 private:
  const flow1d::VorticityModel& model_;
  double sigma_;
  double q_;
  pde::MeridianGrid grid_;
  Prepared prep_;
};

int pack_size(const pde::MeridianGrid& g) { return g.n_z() + (g.n_s - 1) * g.n_z(); }

Eigen::VectorXd pack(const Eigen::VectorXd& eta, const Eigen::MatrixXd& phi,
                     const pde::MeridianGrid& g) {
  Eigen::VectorXd u(pack_size(g));
  u.head(g.n_z()) = eta;
  int at = g.n_z();
  for (int j = 0; j < g.n_z(); ++j)
    for (int i = 0; i < g.n_s - 1; ++i) u(at++) = phi(i, j);
  return u;
}

void unpack(const Eigen::VectorXd& u, const pde::MeridianGrid& g, Eigen::VectorXd& eta,
            Eigen::MatrixXd& phi) {
  eta = u.head(g.n_z());
  phi = Eigen::MatrixXd::Zero(g.n_s, g.n_z());
  int at = g.n_z();
  for (int j = 0; j < g.n_z(); ++j)
    for (int i = 0; i < g.n_s - 1; ++i) phi(i, j) = u(at++);
}

}  // namespace

double Residual::inf_norm() const {
  const double a = r_eta.values.cwiseAbs().maxCoeff();
  const double b = r_phi.values.cwiseAbs().maxCoeff();
  return std::max(a, b);
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::lambda_range_exhausted: return "lambda-range-exhausted";
    case Termination::norm_blowup: return "norm-blowup";
    case Termination::vorticity_norm_blowup: return "vorticity-norm-blowup";
    case Termination::axis_approach: return "axis-approach";
    case Termination::newton_failure: return "newton-failure";
    case Termination::max_steps: return "max-steps";
  }
  return "unknown";
}

Termination termination_from_string(const std::string& s) {
  if (s == "lambda-range-exhausted") return Termination::lambda_range_exhausted;
  if (s == "norm-blowup") return Termination::norm_blowup;
  if (s == "vorticity-norm-blowup") return Termination::vorticity_norm_blowup;
  if (s == "axis-approach") return Termination::axis_approach;
  if (s == "newton-failure") return Termination::newton_failure;
  if (s == "max-steps") return Termination::max_steps;
  throw std::invalid_argument("unknown termination: " + s);
}

FlowState static_state(const unduloid::ShapeParams& base, double sigma, int n_z, int n_s) {
  if (!(sigma > 0.0)) throw std::invalid_argument("static_state: sigma must be positive");
  const PeriodicEvenGrid zgrid(base.b, n_z);
  const pde::MeridianGrid grid(n_s, zgrid);
  const SurfaceProfile prof = profile_from_unduloid(base, zgrid);

  FlowState s;
  s.lambda = 0.0;
  s.eta = GridFunction{zgrid, prof.eta};
  s.phi = pde::MeridianFunction::zero(grid);
  s.sigma = sigma;
  s.Q = -sigma * unduloid::mean_curvature_shape(base);
  s.m = 0.0;
  s.mean_eta = prof.mean;
  return s;
}

Residual residual_F(const FlowState& state, const flow1d::VorticityModel& model) {
  ResidualEvaluator ev(model, state.sigma, state.Q, state.phi.grid);
  ev.prepare(state.lambda, state.eta.values);
  return ev.eval(state.phi.values);
}

namespace {

Eigen::VectorXd flat_residual(const Residual& r, const pde::MeridianGrid& g) {
  return pack(r.r_eta.values, r.r_phi.values.topRows(g.n_s - 1), g);
}

Eigen::MatrixXd jacobian_impl(ResidualEvaluator& ev, double lambda,
                              const Eigen::VectorXd& eta0, const Eigen::MatrixXd& phi0,
                              const pde::MeridianGrid& grid, const Eigen::VectorXd& r0) {
  const int nz = grid.n_z();
  const int n = pack_size(grid);
  const Eigen::VectorXd u0 = pack(eta0, phi0.topRows(grid.n_s - 1), grid);
  const double step = 1e-6 * (1.0 + u0.cwiseAbs().maxCoeff());

  Eigen::MatrixXd jac(n, n);

  // phi columns first: the factorization and flow for (lambda, eta0) are reused.
  for (int col = nz; col < n; ++col) {
    Eigen::VectorXd u = u0;
    u(col) += step;
    Eigen::VectorXd eta;
    Eigen::MatrixXd phi;
    unpack(u, grid, eta, phi);
    jac.col(col) = (flat_residual(ev.eval(phi), grid) - r0) / step;
  }
  // eta columns rebuild the prepared state.
  for (int col = 0; col < nz; ++col) {
    Eigen::VectorXd u = u0;
    u(col) += step;
    Eigen::VectorXd eta;
    Eigen::MatrixXd phi;
    unpack(u, grid, eta, phi);
    ev.prepare(lambda, eta);
    jac.col(col) = (flat_residual(ev.eval(phi), grid) - r0) / step;
  }
  ev.prepare(lambda, eta0);
  return jac;
}

}  // namespace

Eigen::MatrixXd fd_jacobian(const FlowState& state, const flow1d::VorticityModel& model) {
  ResidualEvaluator ev(model, state.sigma, state.Q, state.phi.grid);
  ev.prepare(state.lambda, state.eta.values);
  const Eigen::VectorXd r0 = flat_residual(ev.eval(state.phi.values), state.phi.grid);
  return jacobian_impl(ev, state.lambda, state.eta.values, state.phi.values, state.phi.grid, r0);
}

FlowState newton_correct(const FlowState& state, const flow1d::VorticityModel& model, double tol,
                         int max_iter, int* iterations_out) {
  const pde::MeridianGrid& grid = state.phi.grid;
  const double floor = 1e-6 * grid.zgrid.b0;

  ResidualEvaluator ev(model, state.sigma, state.Q, grid);
  Eigen::VectorXd eta = state.eta.values;
  Eigen::MatrixXd phi = state.phi.values;

  ev.prepare(state.lambda, eta);
  Residual res = ev.eval(phi);
  double rnorm = res.inf_norm();

  int it = 0;
  for (; it < max_iter && rnorm > tol; ++it) {
    const Eigen::VectorXd r0 = flat_residual(res, grid);
    const Eigen::MatrixXd jac = jacobian_impl(ev, state.lambda, eta, phi, grid, r0);
    const Eigen::VectorXd delta = jac.partialPivLu().solve(-r0);
    if (!delta.allFinite()) {
      throw convergence_error("newton_correct: singular Jacobian solve");
    }

    // Full step first; a mild transient rise of the sup norm is normal near
    // the poorly conditioned static configurations, so only backtrack when
    // the residual grows substantially.
    double scale = 1.0;
    bool accepted = false;
    for (int back = 0; back < 6; ++back, scale *= 0.5) {
      Eigen::VectorXd u = pack(eta, phi.topRows(grid.n_s - 1), grid) + scale * delta;
      Eigen::VectorXd eta_try;
      Eigen::MatrixXd phi_try;
      unpack(u, grid, eta_try, phi_try);
      if (eta_try.minCoeff() <= floor) continue;
      ev.prepare(state.lambda, eta_try);
      const Residual res_try = ev.eval(phi_try);
      const double rn = res_try.inf_norm();
      const double bound = (back == 0) ? 1.5 * rnorm : rnorm;
      if (rn < bound || rn <= tol) {
        eta = std::move(eta_try);
        phi = std::move(phi_try);
        res = res_try;
        rnorm = rn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (eta.minCoeff() <= floor) {
        throw inadmissible_state("newton_correct: iterate reached the axis floor");
      }
      throw convergence_error("newton_correct: residual stagnated at " + std::to_string(rnorm));
    }
  }
  if (rnorm > tol) {
    throw convergence_error("newton_correct: no convergence in " + std::to_string(max_iter) +
                            " iterations (residual " + std::to_string(rnorm) + ")");
  }
  if (iterations_out != nullptr) *iterations_out = it;

  FlowState out = state;
  out.eta = GridFunction{grid.zgrid, eta};
  out.phi = pde::MeridianFunction{grid, phi};
  out.mean_eta = trapezoid_mean(grid.zgrid, eta);
  out.m = ev.prepared().flow.m;
  return out;
}

double vorticity_norm(const FlowState& state, const flow1d::VorticityModel& model, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("vorticity_norm: alpha must lie in (0,1)");
  }
  const pde::MeridianGrid& grid = state.phi.grid;
  if (!(state.eta.values.minCoeff() > 0.0)) {
    throw inadmissible_state("vorticity_norm: state outside the admissible set");
  }
  const double p = 5.0 / (2.0 - alpha);
  const double beta = (2.0 * alpha + 1.0) / 5.0;

  const double mean = trapezoid_mean(grid.zgrid, state.eta.values);
  const flow1d::TrivialFlow flow = pde::flow_on_grid(state.lambda, mean, model, grid);
  const double mean2 = mean * mean;

  const double hs = grid.hs();
  const double hz = grid.zgrid.h();
  double integral = 0.0;
  for (int j = 0; j < grid.n_z(); ++j) {
    const double wz = (j == 0 || j == grid.n_z() - 1) ? 0.5 : 1.0;
    const double e = state.eta.values(j);
    double column = 0.0;
    for (int i = 1; i < grid.n_s; ++i) {  // the s = 0 integrand vanishes
      const double ws = (i == grid.n_s - 1) ? 0.5 : 1.0;
      const double s = grid.s(i);
      const double r = s * e;
      const double psibar = state.phi.values(i, j) + mean2 * flow.psi(i) / (e * e);
      const double big_psi = r * r * psibar;
      const double omega = -r * model.gamma(big_psi) - model.FF_prime(big_psi) / r;
      column += ws * std::pow(std::abs(omega) / std::pow(r, beta), p) * s;
    }
    integral += wz * column * e * e;
  }
  // Azimuthal factor and the two half-periods of the even extension.
  integral *= 2.0 * kPi * 2.0 * hs * hz;
  return std::pow(integral, 1.0 / p);
}

StateDiagnostics diagnose(const FlowState& state, const flow1d::VorticityModel& model,
                          double alpha, int newton_iterations) {
  StateDiagnostics d;
  d.residual_inf = residual_F(state, model).inf_norm();
  d.min_eta = state.eta.values.minCoeff();
  const SurfaceProfile prof = profile_from_samples(state.eta.grid, state.eta.values);
  d.eta_norm = prof.eta.cwiseAbs().maxCoeff() + prof.eta_z.cwiseAbs().maxCoeff() +
               prof.eta_zz.cwiseAbs().maxCoeff();
  d.vorticity_norm = vorticity_norm(state, model, alpha);
  d.newton_iterations = newton_iterations;
  return d;
}

Branch continue_branch(const FlowState& start, const flow1d::VorticityModel& model,
                       double dlambda, const Limits& limits) {
  if (dlambda == 0.0) throw std::invalid_argument("continue_branch: dlambda must be nonzero");

  Branch branch;
  branch.states.push_back(start);
  branch.diagnostics.push_back(diagnose(start, model, limits.alpha, 0));
  branch.termination = Termination::lambda_range_exhausted;

  const Eigen::VectorXd eta_start = start.eta.values;
  double step = dlambda;
  while (true) {
    if (static_cast<int>(branch.states.size()) > limits.max_steps) {
      branch.termination = Termination::max_steps;
      break;
    }
    const FlowState& last = branch.states.back();
    const double next_lambda = last.lambda + step;
    if (std::abs(next_lambda) > limits.max_abs_lambda + 1e-12) {
      branch.termination = Termination::lambda_range_exhausted;
      break;
    }

    FlowState predictor = last;
    predictor.lambda = next_lambda;
    try {
      int iters = 0;
      FlowState corrected =
          newton_correct(predictor, model, limits.newton_tol, limits.newton_max_iter, &iters);
      StateDiagnostics diag = diagnose(corrected, model, limits.alpha, iters);
      if (diag.min_eta <= limits.min_eta_floor) {
        branch.termination = Termination::axis_approach;
        break;
      }
      if (diag.eta_norm > limits.max_eta_norm) {
        branch.termination = Termination::norm_blowup;
        break;
      }
      if (diag.vorticity_norm > limits.max_vorticity_norm) {
        branch.termination = Termination::vorticity_norm_blowup;
        break;
      }
      // Loop-back heuristic: a later state at lambda ~ 0 that Newton pulls
      // close to the starting profile.
      if (branch.states.size() > 1 && std::abs(corrected.lambda) <= 0.5 * std::abs(dlambda) &&
          (corrected.eta.values - eta_start).cwiseAbs().maxCoeff() <=
              1e3 * limits.newton_tol) {
        diag.loop_back_suspected = true;
      }
      branch.states.push_back(std::move(corrected));
      branch.diagnostics.push_back(diag);
      // Return toward the nominal step after earlier halving.
      step = (step > 0.0 ? 1.0 : -1.0) *
             std::min(std::abs(dlambda), 2.0 * std::abs(step));
    } catch (const convergence_error&) {
      step *= 0.5;
      if (std::abs(step) < 1e-6 * std::abs(dlambda)) {
        branch.termination = Termination::newton_failure;
        break;
      }
    } catch (const inadmissible_state&) {
      branch.termination = Termination::axis_approach;
      break;
    }
  }
  return branch;
}

}  // namespace capwave::continuation
