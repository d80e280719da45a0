#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "capwave/errors.hpp"
#include "capwave/flow1d.hpp"
#include "capwave/models.hpp"

using namespace capwave;

namespace {

// Test-side oracle: power series of the regular solution of
// u'' + (3/r) u' + w^2 u = 0, u(0) = 1, i.e. 2 J1(w r)/(w r).
double bessel_profile(double x) {
  double term = 1.0;  // m = 0
  double sum = term;
  for (int m = 1; m < 60; ++m) {
    term *= -x * x / (4.0 * m * (m + 1));
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

double bessel_J1(double x) { return 0.5 * x * bessel_profile(x); }

}  // namespace

TEST_CASE("model validation") {
  CHECK_NOTHROW(flow1d::validate_model(models::zero()));
  CHECK_NOTHROW(flow1d::validate_model(models::linear_both(-0.5, 2.0)));

  flow1d::VorticityModel bad = models::zero();
  bad.gamma = [](double) { return 1.0; };
  CHECK_THROWS_AS(flow1d::validate_model(bad), std::invalid_argument);

  flow1d::VorticityModel inconsistent = models::linear_swirl(1.0);
  inconsistent.FF_prime = [](double x) { return 2.0 * x; };  // should be x
  CHECK_THROWS_AS(flow1d::validate_model(inconsistent), std::invalid_argument);
}

TEST_CASE("zero right-hand side: psi is constant") {
  const auto model = models::zero();
  const auto flow = flow1d::solve_trivial_flow(0.37, 2.5, model, 48);
  for (int i = 0; i < flow.psi.size(); ++i) {
    CHECK(std::abs(flow.psi(i) - 0.37) < 1e-13);
    CHECK(std::abs(flow.psi_s(i)) < 1e-12);
  }
  CHECK(flow.m == doctest::Approx(0.37 * 2.5 * 2.5).epsilon(1e-13));
  CHECK(flow1d::m_of(0.37, 2.5, model) == doctest::Approx(0.37 * 6.25).epsilon(1e-13));
}

TEST_CASE("lambda = 0: identically zero flow for any model") {
  for (const auto& model :
       {models::linear_gamma(0.8), models::linear_swirl(1.7), models::linear_both(-0.3, 1.1)}) {
    const auto flow = flow1d::solve_trivial_flow(0.0, 1.3, model, 40);
    CHECK(flow.psi.cwiseAbs().maxCoeff() == 0.0);
    CHECK(flow.m == 0.0);
  }
}

TEST_CASE("pure swirl: Bessel-series oracle") {
  const double omega = 1.3, lambda = 0.7, d = 1.2;
  const auto model = models::linear_swirl(omega);
  const int n = 65;
  const auto flow = flow1d::solve_trivial_flow(lambda, d, model, n);
  for (int i = 0; i < n; ++i) {
    const double r = d * i / (n - 1.0);
    const double exact = lambda * bessel_profile(omega * r);
    CHECK(std::abs(flow.psi(i) - exact) < 1e-10);
  }
  const double m_exact = 2.0 * lambda * d * bessel_J1(omega * d) / omega;
  CHECK(std::abs(flow.m - m_exact) < 1e-10);
  CHECK(std::abs(flow1d::m_of(lambda, d, model) - m_exact) < 1e-10);

  // psi_s comes from the integrator state; spot-check against the series
  // derivative d/ds [lambda * profile(omega s d)].
  for (int i : {8, 32, 64}) {
    const double r = d * i / (n - 1.0);
    const double h = 1e-6;
    const double exact_s =
        d * lambda * (bessel_profile(omega * (r + h)) - bessel_profile(omega * (r - h))) /
        (2.0 * h);
    CHECK(std::abs(flow.psi_s(i) - exact_s) < 1e-7);
  }
}

TEST_CASE("linearity in lambda for linear gamma and swirl") {
  const auto model = models::linear_both(0.4, 0.9);
  const auto f1 = flow1d::solve_trivial_flow(0.31, 1.1, model, 40);
  const auto f2 = flow1d::solve_trivial_flow(0.62, 1.1, model, 40);
  for (int i = 0; i < f1.psi.size(); ++i) {
    CHECK(std::abs(f2.psi(i) - 2.0 * f1.psi(i)) < 1e-10);
  }
}

TEST_CASE("axis regularity: one-sided psi_s at s = 0") {
  const auto model = models::linear_swirl(2.0);
  double prev = 0.0;
  for (int n : {33, 65}) {
    const auto flow = flow1d::solve_trivial_flow(0.5, 1.0, model, n);
    const double hs = 1.0 / (n - 1);
    const double onesided =
        (-3.0 * flow.psi(0) + 4.0 * flow.psi(1) - flow.psi(2)) / (2.0 * hs);
    CHECK(std::abs(onesided) < 1e-4);
    if (n == 65) CHECK(std::abs(onesided) < 0.5 * std::abs(prev) + 1e-12);
    prev = onesided;
  }
}

TEST_CASE("scaling consistency: solve on [0,d] equals rescaled unit solve") {
  const double d = 1.7, lambda = 0.45;
  const auto model = models::linear_both(0.3, 0.8);
  const auto direct = flow1d::solve_trivial_flow(lambda, d, model, 48);

  // u(s) = psi(s d) solves the unit-radius problem with rescaled closures.
  flow1d::VorticityModel scaled;
  const double d2 = d * d;
  scaled.gamma = [&model, d2](double x) { return d2 * model.gamma(d2 * x); };
  scaled.gamma_prime = [&model, d2](double x) { return d2 * d2 * model.gamma_prime(d2 * x); };
  scaled.F = [&model, d, d2](double x) { return model.F(d2 * x) / d; };
  scaled.F_prime = [&model, d, d2](double x) { return d * model.F_prime(d2 * x); };
  scaled.FF_prime = [&model, d2](double x) { return model.FF_prime(d2 * x); };
  scaled.FF_prime_deriv_at_0 = d2 * model.FF_prime_deriv_at_0;
  const auto unit = flow1d::solve_trivial_flow(lambda, 1.0, scaled, 48);

  for (int i = 0; i < direct.psi.size(); ++i) {
    CHECK(std::abs(direct.psi(i) - unit.psi(i)) < 1e-9);
  }
  CHECK(std::abs(direct.m - d2 * unit.m) < 1e-9);
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(flow1d::solve_trivial_flow(0.1, -1.0, models::zero(), 48),
                  std::invalid_argument);
  CHECK_THROWS_AS(flow1d::solve_trivial_flow(0.1, 1.0, models::zero(), 16),
                  std::invalid_argument);
}

TEST_CASE("pathological model: step failure is reported, not looped on") {
  // gamma(x) = -C x^2 feeds back positively and blows psi up in finite r.
  flow1d::VorticityModel explosive = models::zero();
  explosive.gamma = [](double x) { return -1e8 * x * x; };
  explosive.gamma_prime = [](double x) { return -2e8 * x; };
  CHECK_THROWS_AS(flow1d::solve_trivial_flow(1.0, 5.0, explosive, 48), convergence_error);
}
