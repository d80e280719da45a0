#include "capwave/pde.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "capwave/errors.hpp"

namespace capwave::pde {

namespace {

void require_valid_profile(const SurfaceProfile& eta) {
  if (!(eta.min_eta() > 0.0)) {
    throw std::invalid_argument("pde: invalid profile, min eta <= 0");
  }
}

// Even reflection of a z-index past either half-period endpoint.
int reflect(int j, int nz) {
  if (j < 0) return -j;
  if (j >= nz) return 2 * nz - 2 - j;
  return j;
}

int unknown_index(int i, int j, int ns) { return j * (ns - 1) + i; }

// Assemble L^eta on the unknown rows i = 0..ns-2 (Dirichlet zero at s = 1,
// even reflection in z, axis symmetry at s = 0).
Eigen::SparseMatrix<double> assemble_dirichlet_L(const SurfaceProfile& eta,
                                                 const MeridianGrid& grid) {
  require_valid_profile(eta);
  if (!eta.grid.same_as(grid.zgrid)) {
    throw std::invalid_argument("pde: profile grid does not match meridian grid");
  }
  const int ns = grid.n_s;
  const int nz = grid.n_z();
  const double hs = grid.hs();
  const double hz = grid.zgrid.h();
  const int dim = (ns - 1) * nz;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(dim) * 9);
  const auto add = [&](int row, int i, int j, double v) {
    if (i == ns - 1) return;  // Dirichlet trace, phi = 0
    trips.emplace_back(row, unknown_index(i, reflect(j, nz), ns), v);
  };

  for (int j = 0; j < nz; ++j) {
    const double e = eta.eta(j);
    const double ez = eta.eta_z(j);
    const double ezz = eta.eta_zz(j);
    const double e2 = e * e;
    for (int i = 0; i < ns - 1; ++i) {
      const int row = unknown_index(i, j, ns);
      // phi_zz
      add(row, i, j - 1, 1.0 / (hz * hz));
      add(row, i, j + 1, 1.0 / (hz * hz));
      add(row, i, j, -2.0 / (hz * hz));
      if (i == 0) {
        // axis: (1/e^2)(phi_ss + 3 phi_ss) with even reflection in s
        const double c = 4.0 / e2;
        add(row, 1, j, 2.0 * c / (hs * hs));
        add(row, 0, j, -2.0 * c / (hs * hs));
      } else {
        const double s = grid.s(i);
        const double a_ss = (1.0 + ez * ez * s * s) / e2;
        const double a_s = (3.0 / s - (e * ezz - 2.0 * ez * ez) * s) / e2;
        const double a_sz = -2.0 * e * ez * s / e2;
        add(row, i + 1, j, a_ss / (hs * hs) + a_s / (2.0 * hs));
        add(row, i - 1, j, a_ss / (hs * hs) - a_s / (2.0 * hs));
        add(row, i, j, -2.0 * a_ss / (hs * hs));
        const double cross = a_sz / (4.0 * hs * hz);
        add(row, i + 1, j + 1, cross);
        add(row, i + 1, j - 1, -cross);
        add(row, i - 1, j + 1, -cross);
        add(row, i - 1, j - 1, cross);
      }
    }
  }
  Eigen::SparseMatrix<double> m(dim, dim);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

}  // namespace

MeridianFunction L_eta_apply(const SurfaceProfile& eta, const MeridianFunction& phi) {
  require_valid_profile(eta);
  if (!eta.grid.same_as(phi.grid.zgrid)) {
    throw std::invalid_argument("pde: profile grid does not match meridian grid");
  }
  const int ns = phi.grid.n_s;
  const int nz = phi.grid.n_z();
  const double hs = phi.grid.hs();
  const double hz = phi.grid.zgrid.h();
  const Eigen::MatrixXd& p = phi.values;
  Eigen::MatrixXd out(ns, nz);

  // One-sided second-order d/ds at the surface row.
  const auto surface_ps = [&](int j) {
    return (3.0 * p(ns - 1, j) - 4.0 * p(ns - 2, j) + p(ns - 3, j)) / (2.0 * hs);
  };

  for (int j = 0; j < nz; ++j) {
    const double e = eta.eta(j);
    const double ez = eta.eta_z(j);
    const double ezz = eta.eta_zz(j);
    const double e2 = e * e;
    const int jm = reflect(j - 1, nz);
    const int jp = reflect(j + 1, nz);
    for (int i = 0; i < ns; ++i) {
      const double pzz = (p(i, jp) - 2.0 * p(i, j) + p(i, jm)) / (hz * hz);
      if (i == 0) {
        const double pss = 2.0 * (p(1, j) - p(0, j)) / (hs * hs);
        out(i, j) = pzz + 4.0 * pss / e2;
        continue;
      }
      const double s = phi.grid.s(i);
      double pss, ps, psz;
      if (i < ns - 1) {
        pss = (p(i + 1, j) - 2.0 * p(i, j) + p(i - 1, j)) / (hs * hs);
        ps = (p(i + 1, j) - p(i - 1, j)) / (2.0 * hs);
        psz = (p(i + 1, jp) - p(i + 1, jm) - p(i - 1, jp) + p(i - 1, jm)) / (4.0 * hs * hz);
      } else {
        pss = (2.0 * p(ns - 1, j) - 5.0 * p(ns - 2, j) + 4.0 * p(ns - 3, j) - p(ns - 4, j)) /
              (hs * hs);
        ps = surface_ps(j);
        psz = (surface_ps(jp) - surface_ps(jm)) / (2.0 * hz);
      }
      out(i, j) = pzz + ((1.0 + ez * ez * s * s) * pss + 3.0 * ps / s -
                         2.0 * e * ez * s * psz - (e * ezz - 2.0 * ez * ez) * s * ps) /
                            e2;
    }
  }
  return {phi.grid, std::move(out)};
}

DirichletSolver::DirichletSolver(const SurfaceProfile& eta, const MeridianGrid& grid)
    : grid_(grid), matrix_(assemble_dirichlet_L(eta, grid)) {
  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->compute(matrix_);
  if (lu_->info() != Eigen::Success) {
    throw solver_error("DirichletSolver: singular or ill-posed L^eta factorization");
  }
}

MeridianFunction DirichletSolver::solve(const Eigen::MatrixXd& rhs_interior) const {
  const int ns = grid_.n_s;
  const int nz = grid_.n_z();
  if (rhs_interior.rows() != ns - 1 || rhs_interior.cols() != nz) {
    throw std::invalid_argument("DirichletSolver: rhs shape mismatch");
  }
  Eigen::VectorXd b((ns - 1) * nz);
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < ns - 1; ++i) b(unknown_index(i, j, ns)) = rhs_interior(i, j);
  const Eigen::VectorXd x = lu_->solve(b);
  if (lu_->info() != Eigen::Success) {
    throw solver_error("DirichletSolver: sparse solve failed");
  }
  Eigen::MatrixXd vals = Eigen::MatrixXd::Zero(ns, nz);
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < ns - 1; ++i) vals(i, j) = x(unknown_index(i, j, ns));
  return {grid_, std::move(vals)};
}

flow1d::TrivialFlow flow_on_grid(double lambda, double d, const flow1d::VorticityModel& model,
                                 const MeridianGrid& grid) {
  const int ns = grid.n_s;
  int f = 1;
  while (f * (ns - 1) + 1 < 32) ++f;
  const flow1d::TrivialFlow fine = flow1d::solve_trivial_flow(lambda, d, model, f * (ns - 1) + 1);
  if (f == 1) return fine;
  flow1d::TrivialFlow out;
  out.lambda = fine.lambda;
  out.d = fine.d;
  out.m = fine.m;
  out.psi.resize(ns);
  out.psi_s.resize(ns);
  for (int i = 0; i < ns; ++i) {
    out.psi(i) = fine.psi(f * i);
    out.psi_s(i) = fine.psi_s(f * i);
  }
  return out;
}

Eigen::MatrixXd a_solve_rhs(const SurfaceProfile& eta, const MeridianFunction& phi,
                            const flow1d::TrivialFlow& flow,
                            const flow1d::VorticityModel& model) {
  require_valid_profile(eta);
  const int ns = phi.grid.n_s;
  const int nz = phi.grid.n_z();
  if (flow.psi.size() != ns) {
    throw std::invalid_argument("a_solve_rhs: trivial flow not sampled on the meridian grid");
  }
  const double mean2 = flow.d * flow.d;

  Eigen::MatrixXd u(ns, nz);
  for (int j = 0; j < nz; ++j) {
    const double e2 = eta.eta(j) * eta.eta(j);
    for (int i = 0; i < ns; ++i) u(i, j) = mean2 * flow.psi(i) / e2;
  }
  const MeridianFunction lu = L_eta_apply(eta, {phi.grid, u});

  Eigen::MatrixXd rhs(ns - 1, nz);
  for (int j = 0; j < nz; ++j) {
    const double e2 = eta.eta(j) * eta.eta(j);
    for (int i = 0; i < ns - 1; ++i) {
      const double x = phi.values(i, j) + u(i, j);
      const double s = phi.grid.s(i);
      const double r2 = e2 * s * s;
      const double ff_term =
          (i == 0) ? model.FF_prime_deriv_at_0 * x : model.FF_prime(r2 * x) / r2;
      rhs(i, j) = -lu.values(i, j) - model.gamma(r2 * x) - ff_term;
    }
  }
  return rhs;
}

MeridianFunction solve_A(const DirichletSolver& solver, const SurfaceProfile& eta,
                         const MeridianFunction& phi, const flow1d::TrivialFlow& flow,
                         const flow1d::VorticityModel& model) {
  return solver.solve(a_solve_rhs(eta, phi, flow, model));
}

MeridianFunction solve_A(double lambda, const SurfaceProfile& eta, const MeridianFunction& phi,
                         const flow1d::VorticityModel& model) {
  const DirichletSolver solver(eta, phi.grid);
  const flow1d::TrivialFlow flow = flow_on_grid(lambda, eta.mean, model, phi.grid);
  return solve_A(solver, eta, phi, flow, model);
}

EigCheckResult eigenvalue_check(const unduloid::ShapeParams& base, double gamma_prime_0,
                                double F_prime_0, const MeridianGrid& grid) {
  const SurfaceProfile prof = profile_from_unduloid(base, grid.zgrid);
  const int ns = grid.n_s;
  const int nz = grid.n_z();
  const int dim = (ns - 1) * nz;
  if (dim > 6000) {
    throw solver_error("eigenvalue_check: grid too large for the dense eigensolver");
  }

  Eigen::MatrixXd m = Eigen::MatrixXd(assemble_dirichlet_L(prof, grid));
  for (int j = 0; j < nz; ++j) {
    const double e2 = prof.eta(j) * prof.eta(j);
    for (int i = 0; i < ns - 1; ++i) {
      const double s = grid.s(i);
      m(unknown_index(i, j, ns), unknown_index(i, j, ns)) +=
          gamma_prime_0 * e2 * s * s + F_prime_0 * F_prime_0;
    }
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw solver_error("eigenvalue_check: eigen decomposition did not converge");
  }
  const auto& vals = es.eigenvalues();
  int best = 0;
  for (int i = 1; i < vals.size(); ++i) {
    if (std::abs(vals(i)) < std::abs(vals(best))) best = i;
  }
  return {vals(best), std::abs(vals(best)), ns, nz};
}

}  // namespace capwave::pde
