#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "capwave/branch_io.hpp"
#include "capwave/continuation.hpp"
#include "capwave/errors.hpp"
#include "capwave/models.hpp"

using namespace capwave;
using continuation::FlowState;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd even_direction(const PeriodicEvenGrid& g) {
  Eigen::VectorXd v(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double z = g.node(i);
    v(i) = std::cos(z / g.b0) + 0.3 * std::cos(2.0 * z / g.b0);
  }
  return v;
}

// 2D composite-Simpson oracle for the weighted vorticity integral of the
// manufactured state Psi = r^2 (1 - s^2), gamma(x) = x.
double vorticity_oracle(const unduloid::ShapeParams& base, double alpha) {
  const double p = 5.0 / (2.0 - alpha);
  const double beta = (2.0 * alpha + 1.0) / 5.0;
  const int ns = 256, nz = 256;
  const double hz = kPi * base.b / nz;
  const double hs = 1.0 / ns;
  double total = 0.0;
  for (int j = 0; j <= nz; ++j) {
    const double wz = (j == 0 || j == nz) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    const double e = unduloid::profile_eval(base, j * hz).eta;
    double col = 0.0;
    for (int i = 1; i <= ns; ++i) {
      const double ws = (i == ns) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double s = i * hs;
      const double r = s * e;
      const double omega = r * r * r * (1.0 - s * s);  // |‑r gamma(Psi)|
      col += ws * std::pow(omega / std::pow(r, beta), p) * s;
    }
    total += wz * col * e * e;
  }
  total *= (hs / 3.0) * (hz / 3.0);
  return std::pow(2.0 * kPi * 2.0 * total, 1.0 / p);
}

}  // namespace

TEST_CASE("static state: construction and small residual") {
  const unduloid::ShapeParams base{1.0, 0.5};
  const FlowState s = continuation::static_state(base, 1.0, 33, 17);
  CHECK(s.lambda == 0.0);
  CHECK(s.m == 0.0);
  CHECK(s.phi.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.Q == doctest::Approx(-unduloid::mean_curvature_shape(base)).epsilon(1e-15));

  const auto res = continuation::residual_F(s, models::zero());
  CHECK(res.r_phi.values.cwiseAbs().maxCoeff() < 1e-12);  // exactly solved component
  CHECK(res.inf_norm() < 1e-2);                           // O(h^2) discretization floor

  // Second-order decay of the static residual under z-refinement.
  const double r1 =
      continuation::residual_F(continuation::static_state(base, 1.0, 33, 17), models::zero())
          .inf_norm();
  const double r2 =
      continuation::residual_F(continuation::static_state(base, 1.0, 65, 17), models::zero())
          .inf_norm();
  CHECK(std::log2(r1 / r2) > 1.7);
}

TEST_CASE("flat-cylinder Q value: sigma/b0 in the k0 -> 0 limit") {
  const FlowState s = continuation::static_state({1.0, 1e-9}, 1.0, 33, 17);
  CHECK(s.Q == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("residual symmetry (lambda,eta,phi) -> (-lambda,eta,-phi) for gamma=F=0") {
  const unduloid::ShapeParams base{1.0, 0.5};
  const auto model = models::zero();
  FlowState s = continuation::static_state(base, 1.0, 33, 17);
  // Random admissible perturbation.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  s.lambda = 0.02;
  s.eta.values += 0.01 * even_direction(s.eta.grid);
  for (int i = 0; i < s.phi.grid.n_s - 1; ++i)
    for (int j = 0; j < s.phi.grid.n_z(); ++j)
      s.phi.values(i, j) = 0.005 * dist(rng) * (1.0 - s.phi.grid.s(i));

  FlowState flipped = s;
  flipped.lambda = -s.lambda;
  flipped.phi.values = -s.phi.values;

  const auto r1 = continuation::residual_F(s, model);
  const auto r2 = continuation::residual_F(flipped, model);
  CHECK(std::abs(r1.r_eta.values.cwiseAbs().maxCoeff() -
                 r2.r_eta.values.cwiseAbs().maxCoeff()) < 1e-14);
  CHECK((r1.r_phi.values + r2.r_phi.values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("residual grows linearly under a cos(z/b0) surface perturbation") {
  const unduloid::ShapeParams base{1.0, 0.5};
  const auto model = models::zero();
  const FlowState s0 = continuation::static_state(base, 1.0, 33, 17);
  const auto r0 = continuation::residual_F(s0, model);

  const Eigen::VectorXd dir = even_direction(s0.eta.grid);
  const auto perturbed_norm = [&](double eps) {
    FlowState s = s0;
    s.eta.values += eps * dir;
    const auto r = continuation::residual_F(s, model);
    return (r.r_eta.values - r0.r_eta.values).cwiseAbs().maxCoeff();
  };
  const double n1 = perturbed_norm(1e-4);
  const double n2 = perturbed_norm(2e-4);
  CHECK(n1 > 1e-7);  // nonzero slope for k0 in (0,1)
  CHECK(n2 / n1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("eta-block directional derivative reproduces -(1-d_zz)^{-1} T") {
  const unduloid::ShapeParams base{1.0, 0.5};
  const auto model = models::zero();
  double prev_rel = 0.0;
  for (int n_z : {33, 65}) {
    const FlowState s0 = continuation::static_state(base, 1.0, n_z, 17);
    const auto r0 = continuation::residual_F(s0, model);
    const Eigen::VectorXd dir = even_direction(s0.eta.grid);
    const double eps = 1e-6;
    FlowState s = s0;
    s.eta.values += eps * dir;
    const auto r = continuation::residual_F(s, model);
    const Eigen::VectorXd deriv = (r.r_eta.values - r0.r_eta.values) / eps;

    const GridFunction lhs = linops::helmholtz_apply({s0.eta.grid, deriv});
    const GridFunction tv = linops::T_apply({s0.eta.grid, dir}, base);
    const double rel =
        (lhs.values + tv.values).cwiseAbs().maxCoeff() / tv.values.cwiseAbs().maxCoeff();
    CHECK(rel < 0.05);
    if (n_z == 65) CHECK(rel < 0.5 * prev_rel);
    prev_rel = rel;
  }
}

TEST_CASE("newton from the static state") {
  const unduloid::ShapeParams base{1.0, 0.5};
  const auto model = models::zero();
  const FlowState s0 = continuation::static_state(base, 1.0, 33, 17);
  int iters = -1;
  const FlowState corrected = continuation::newton_correct(s0, model, 1e-9, 25, &iters);
  CHECK(iters <= 8);
  CHECK(continuation::residual_F(corrected, model).inf_norm() <= 1e-9);
  // The discrete solution sits O(h^2) from the sampled unduloid.
  CHECK((corrected.eta.values - s0.eta.values).cwiseAbs().maxCoeff() < 2e-2);
  CHECK(corrected.m == 0.0);

  // Restarting from a converged state is a no-op.
  int again = -1;
  continuation::newton_correct(corrected, model, 1e-9, 25, &again);
  CHECK(again == 0);
}

TEST_CASE("newton pulls a perturbed state back to the discrete static solution") {
  const unduloid::ShapeParams base{1.0, 0.5};
  const auto model = models::zero();
  const FlowState s0 = continuation::static_state(base, 1.0, 33, 17);
  const FlowState exact = continuation::newton_correct(s0, model, 1e-11, 25);

  std::mt19937 rng(17);
  std::normal_distribution<double> noise(0.0, 1.0);
  FlowState s = s0;
  Eigen::VectorXd bump(s.eta.grid.n);
  for (int i = 0; i < s.eta.grid.n; ++i) bump(i) = noise(rng);
  s.eta.values += 1e-3 * bump;  // even by representation
  const FlowState corrected = continuation::newton_correct(s, model, 1e-11, 25);
  CHECK((corrected.eta.values - exact.eta.values).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((corrected.phi.values - exact.phi.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("degenerate base: Jacobian nearly singular along cos(z/b0)") {
  // At k0 = 0 the smallest singular value decays O(h^2) toward the exact
  // cos(z/b0) kernel, while away from the flat cylinder it is grid-stable.
  const auto model = models::zero();
  const int n_z = 33;
  const FlowState regular = continuation::static_state({1.0, 0.5}, 1.0, n_z, 16);
  const FlowState flat = continuation::static_state({1.0, 0.0}, 1.0, n_z, 16);

  const Eigen::MatrixXd j_reg = continuation::fd_jacobian(regular, model);
  const Eigen::MatrixXd j_flat = continuation::fd_jacobian(flat, model);

  Eigen::BDCSVD<Eigen::MatrixXd> svd_reg(j_reg);
  Eigen::BDCSVD<Eigen::MatrixXd> svd_flat(j_flat, Eigen::ComputeThinV);
  const double smin_reg = svd_reg.singularValues().minCoeff();
  const double smin_flat = svd_flat.singularValues().minCoeff();
  CHECK(smin_flat < 0.25 * smin_reg);

  // Null direction concentrates on the eta block along cos(z/b0).
  const Eigen::VectorXd null_dir = svd_flat.matrixV().col(j_flat.cols() - 1);
  const Eigen::VectorXd eta_part = null_dir.head(n_z);
  Eigen::VectorXd cosine(n_z);
  for (int i = 0; i < n_z; ++i) cosine(i) = std::cos(kPi * i / (n_z - 1.0));
  const double corr =
      std::abs(eta_part.dot(cosine)) / (eta_part.norm() * cosine.norm());
  CHECK(corr > 0.999);
}

TEST_CASE("vorticity norm: exact zeros") {
  const unduloid::ShapeParams base{1.0, 0.5};
  const FlowState s = continuation::static_state(base, 1.0, 33, 17);
  CHECK(continuation::vorticity_norm(s, models::zero(), 0.5) == 0.0);
  CHECK(continuation::vorticity_norm(s, models::linear_both(0.7, 1.3), 0.5) == 0.0);
}

TEST_CASE("vorticity norm: manufactured state against a quadrature oracle") {
  const unduloid::ShapeParams base{1.0, 0.5};
  const double alpha = 0.5;
  FlowState s = continuation::static_state(base, 1.0, 65, 65);
  for (int i = 0; i < s.phi.grid.n_s; ++i) {
    const double ss = s.phi.grid.s(i);
    for (int j = 0; j < s.phi.grid.n_z(); ++j) s.phi.values(i, j) = 1.0 - ss * ss;
  }
  const double computed = continuation::vorticity_norm(s, models::linear_gamma(1.0), alpha);
  const double oracle = vorticity_oracle(base, alpha);
  CHECK(computed == doctest::Approx(oracle).epsilon(5e-3));
}

TEST_CASE("branch: symmetric continuation for the irrotational swirl-free model") {
  const unduloid::ShapeParams base{1.0, 0.5};
  const auto model = models::zero();
  const FlowState start = continuation::newton_correct(
      continuation::static_state(base, 1.0, 33, 17), model, 1e-10, 25);

  continuation::Limits limits;
  limits.max_abs_lambda = 0.05;
  limits.min_eta_floor = 1e-3;
  limits.newton_tol = 1e-10;
  const auto plus = continuation::continue_branch(start, model, 0.025, limits);
  const auto minus = continuation::continue_branch(start, model, -0.025, limits);

  CHECK(plus.termination == continuation::Termination::lambda_range_exhausted);
  CHECK(plus.states.size() == 3);  // lambda = 0, 0.025, 0.05
  CHECK(minus.states.size() == 3);

  for (std::size_t i = 0; i < plus.states.size(); ++i) {
    CHECK(plus.diagnostics[i].residual_inf <= limits.newton_tol);
    // Q is pinned bit-exactly along the branch.
    CHECK(plus.states[i].Q == start.Q);
    // Solution symmetry: eta_+(lambda) = eta_-(-lambda), phi_+ = -phi_-.
    CHECK(plus.states[i].lambda == doctest::Approx(-minus.states[i].lambda).epsilon(1e-15));
    CHECK((plus.states[i].eta.values - minus.states[i].eta.values).cwiseAbs().maxCoeff() <
          1e-6);
    CHECK((plus.states[i].phi.values + minus.states[i].phi.values).cwiseAbs().maxCoeff() <
          1e-6);
  }

  // nu(lambda) -> nu(0) as lambda -> 0: the deviation shrinks with lambda.
  const double dev_big =
      (plus.states[2].eta.values - start.eta.values).cwiseAbs().maxCoeff();
  const double dev_small =
      (plus.states[1].eta.values - start.eta.values).cwiseAbs().maxCoeff();
  CHECK(dev_small < dev_big);
  CHECK(dev_big < 0.2);
}

TEST_CASE("branch: serialization roundtrip is bit-exact and re-verifiable") {
  const unduloid::ShapeParams base{1.0, 0.5};
  const auto model = models::zero();
  const FlowState start = continuation::newton_correct(
      continuation::static_state(base, 1.0, 33, 17), model, 1e-10, 25);
  continuation::Limits limits;
  limits.max_abs_lambda = 0.025;
  limits.newton_tol = 1e-10;
  const auto branch = continuation::continue_branch(start, model, 0.025, limits);

  branch_io::BranchHeader header;
  header.b0 = base.b;
  header.k0 = base.k;
  header.n_z = 33;
  header.n_s = 17;
  header.sigma = 1.0;
  header.Q = start.Q;
  header.alpha = limits.alpha;
  header.newton_tol = limits.newton_tol;
  header.dlambda = 0.025;
  header.model = nlohmann::json{{"preset", "zero"}};

  const auto path = std::filesystem::temp_directory_path() / "capwave_branch_test.jsonl";
  branch_io::write_branch(path, header, branch);
  const auto loaded = branch_io::read_branch(path);

  REQUIRE(loaded.branch.states.size() == branch.states.size());
  CHECK(loaded.branch.termination == branch.termination);
  for (std::size_t i = 0; i < branch.states.size(); ++i) {
    CHECK(loaded.branch.states[i].lambda == branch.states[i].lambda);
    CHECK((loaded.branch.states[i].eta.values - branch.states[i].eta.values)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((loaded.branch.states[i].phi.values - branch.states[i].phi.values)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    // Residuals recomputed from the reloaded state are bit-stable.
    const double r_mem = continuation::residual_F(branch.states[i], model).inf_norm();
    const double r_file = continuation::residual_F(loaded.branch.states[i], model).inf_norm();
    CHECK(r_file == r_mem);
    CHECK(r_file <= limits.newton_tol);
  }
  std::filesystem::remove(path);
}

TEST_CASE("states outside the admissible set are rejected") {
  FlowState s = continuation::static_state({1.0, 0.5}, 1.0, 33, 17);
  s.eta.values(5) = -0.1;
  CHECK_THROWS_AS(continuation::residual_F(s, models::zero()), inadmissible_state);
  CHECK_THROWS_AS(continuation::vorticity_norm(s, models::zero(), 0.5), inadmissible_state);
}

TEST_CASE("branch terminations map to the configured limits") {
  const unduloid::ShapeParams base{1.0, 0.5};
  const auto model = models::zero();
  const FlowState start = continuation::newton_correct(
      continuation::static_state(base, 1.0, 33, 17), model, 1e-10, 25);

  continuation::Limits limits;
  limits.max_abs_lambda = 0.05;

  auto l = limits;
  l.max_eta_norm = 1.0;  // below the C^2 surrogate of every nearby state
  auto b = continuation::continue_branch(start, model, 0.0125, l);
  CHECK(b.termination == continuation::Termination::norm_blowup);
  CHECK(b.states.size() == 1);

  l = limits;
  l.min_eta_floor = 2.0;  // every surface sits below this floor
  b = continuation::continue_branch(start, model, 0.0125, l);
  CHECK(b.termination == continuation::Termination::axis_approach);
  CHECK(b.states.size() == 1);

  l = limits;
  l.max_vorticity_norm = -1.0;  // even the zero norm trips the limit
  b = continuation::continue_branch(start, model, 0.0125, l);
  CHECK(b.termination == continuation::Termination::vorticity_norm_blowup);

  l = limits;
  l.newton_tol = 1e-15;  // unreachable; every correction attempt fails
  l.newton_max_iter = 0;
  b = continuation::continue_branch(start, model, 0.0125, l);
  CHECK(b.termination == continuation::Termination::newton_failure);
  CHECK(b.states.size() == 1);
}

TEST_CASE("branch: lambda = 0 sweep stays put") {
  const unduloid::ShapeParams base{1.0, 0.5};
  const auto model = models::zero();
  const FlowState start = continuation::newton_correct(
      continuation::static_state(base, 1.0, 33, 17), model, 1e-10, 25);
  continuation::Limits limits;
  limits.max_abs_lambda = 0.0;
  const auto branch = continuation::continue_branch(start, model, 0.01, limits);
  CHECK(branch.states.size() == 1);
  CHECK(branch.termination == continuation::Termination::lambda_range_exhausted);
}
