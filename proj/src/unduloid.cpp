#include "capwave/unduloid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "capwave/elliptic.hpp"
#include "capwave/errors.hpp"

namespace capwave::unduloid {

namespace {

constexpr double kPi = std::numbers::pi;

void check_axis(const AxisParams& p) {
  if (!(p.a > 0.0 && p.c > p.a)) {
    throw std::invalid_argument("unduloid: AxisParams require c > a > 0, got a = " +
                                std::to_string(p.a) + ", c = " + std::to_string(p.c));
  }
}

void check_shape(const ShapeParams& p, bool allow_k0) {
  const bool k_ok = allow_k0 ? (p.k >= 0.0 && p.k < 1.0) : (p.k > 0.0 && p.k < 1.0);
  if (!(p.b > 0.0) || !k_ok) {
    throw std::invalid_argument("unduloid: ShapeParams require b > 0 and k in " +
                                std::string(allow_k0 ? "[0,1)" : "(0,1)") + ", got b = " +
                                std::to_string(p.b) + ", k = " + std::to_string(p.k));
  }
}

struct CurveJet {
  double r, r_t, r_tt;
  double z, z_t, z_tt;
};

// Parametric curve and its first two t-derivatives.
CurveJet curve_jet(const AxisParams& ap, const DerivedConstants& dc, double t) {
  const double mu = dc.mu, p = dc.p, q = dc.q, k = dc.k;
  const double w = p * std::sin(mu * t) + q;
  const double w_t = p * mu * std::cos(mu * t);
  const double w_tt = -p * mu * mu * std::sin(mu * t);
  const double r = std::sqrt(w);
  const double r_t = w_t / (2.0 * r);
  const double r_tt = w_tt / (2.0 * r) - w_t * w_t / (4.0 * r * w);

  const double x = 0.5 * mu * t - 0.25 * kPi;
  const double sx = std::sin(x);
  const double D = std::sqrt(1.0 - k * k * sx * sx);
  const double z = ap.a * elliptic::incomplete_G(x, k) + ap.c * elliptic::incomplete_E(x, k);
  const double z_t = 0.5 * mu * (ap.a / D + ap.c * D);
  const double D_t = -0.25 * mu * k * k * std::sin(2.0 * x) / D;
  const double z_tt = 0.5 * mu * (ap.c - ap.a / (D * D)) * D_t;
  return {r, r_t, r_tt, z, z_t, z_tt};
}

}  // namespace

DerivedConstants derived_constants(const AxisParams& p) {
  check_axis(p);
  return {2.0 / (p.a + p.c), 0.5 * (p.c * p.c - p.a * p.a), 0.5 * (p.c * p.c + p.a * p.a),
          std::sqrt(p.c * p.c - p.a * p.a) / p.c};
}

double g_of_k(double k) {
  if (!(k >= 0.0 && k < 1.0)) throw std::domain_error("g_of_k: k outside [0,1)");
  return kPi / (elliptic::complete_E(k) + std::sqrt(1.0 - k * k) * elliptic::complete_K(k));
}

ShapeParams to_shape(const AxisParams& p) {
  const DerivedConstants dc = derived_constants(p);
  return {p.c / g_of_k(dc.k), dc.k};
}

AxisParams to_axis(const ShapeParams& p) {
  check_shape(p, /*allow_k0=*/false);
  const double c = p.b * g_of_k(p.k);
  return {c * std::sqrt(1.0 - p.k * p.k), c};
}

CurvePoint param_point(const AxisParams& p, double t) {
  const DerivedConstants dc = derived_constants(p);
  const CurveJet j = curve_jet(p, dc, t);
  return {j.r, j.z};
}

double period(const AxisParams& p) {
  const DerivedConstants dc = derived_constants(p);
  return 2.0 * p.c * elliptic::complete_E(dc.k) + 2.0 * p.a * elliptic::complete_K(dc.k);
}

double period_shape(double b) { return 2.0 * kPi * b; }

double mean_curvature_axis(const AxisParams& p) {
  check_axis(p);
  return -2.0 / (p.a + p.c);
}

double mean_curvature_shape(const ShapeParams& p) {
  check_shape(p, /*allow_k0=*/true);
  const double kp = std::sqrt(1.0 - p.k * p.k);
  const double E = elliptic::complete_E(p.k);
  const double K = elliptic::complete_K(p.k);
  return -2.0 * (E + kp * K) / (kPi * p.b * (1.0 + kp));
}

double dkappa_dk(const ShapeParams& p) {
  check_shape(p, /*allow_k0=*/false);
  const double k = p.k;
  const double kp = std::sqrt(1.0 - k * k);
  const double E = elliptic::complete_E(k);
  const double K = elliptic::complete_K(k);
  return -2.0 * (2.0 * (E - K) + k * k * K) / (kPi * p.b * k * kp * (1.0 + kp));
}

double dkappa_db(const ShapeParams& p) {
  return -mean_curvature_shape(p) / p.b;
}

namespace {

// Invert z(t) = zr for zr in (-P, 0] on the monotone branch
// t in [pi/(2mu) - 2pi/mu, pi/(2mu)] by safeguarded Newton.
double invert_branch(const AxisParams& ap, const DerivedConstants& dc, double zr, double P) {
  const double t_hi = 0.5 * kPi / dc.mu;
  const double t_lo = t_hi - 2.0 * kPi / dc.mu;
  const double width = t_hi - t_lo;
  const double tol_z = 1e-13 * std::max(1.0, P);

  double lo = t_lo, hi = t_hi;
  double t = t_lo + (zr + P) / P * width;  // linear predictor
  CurveJet j = curve_jet(ap, dc, t);
  for (int it = 0; it < 200; ++it) {
    const double f = j.z - zr;
    if (std::abs(f) <= tol_z) return t;
    if (f > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    // Bracket at quadrature resolution: accept the current iterate.
    if (hi - lo <= 1e-15 * width) return t;
    double t_next = t - f / j.z_t;  // z_t > 0 on the whole branch
    if (!(t_next > lo && t_next < hi)) t_next = 0.5 * (lo + hi);
    t = t_next;
    j = curve_jet(ap, dc, t);
  }
  if (std::abs(j.z - zr) <= 1e-10 * std::max(1.0, P)) return t;
  throw convergence_error("unduloid: inversion of z(t) did not reach tolerance at z = " +
                          std::to_string(zr));
}

// Reduce z to [-P/2, P/2] by periodicity, fold by evenness onto [-P/2, 0]
// (inside the inversion branch), and report the sign flip for eta_z.
struct ReducedZ {
  double z;
  double flip;  // +1 if the query point sits on the decreasing half
};

ReducedZ reduce_even(double z, double P) {
  const double zr = std::remainder(z, P);
  return {-std::abs(zr), zr > 0.0 ? -1.0 : 1.0};
}

}  // namespace

ProfileSample profile_eval(const ShapeParams& p, double z) {
  check_shape(p, /*allow_k0=*/true);
  // Below k ~ 1e-8 the profile variation (c-a)/2 ~ b k^2/2 is beneath double
  // precision and the (a,c) description collapses; return the flat cylinder.
  if (p.k < 1e-8) return {p.b * g_of_k(p.k), 0.0, 0.0};

  const AxisParams ap = to_axis(p);
  const DerivedConstants dc = derived_constants(ap);
  const double P = 2.0 * kPi * p.b;
  const ReducedZ rz = reduce_even(z, P);
  const double t = invert_branch(ap, dc, rz.z, P);
  const CurveJet j = curve_jet(ap, dc, t);

  const double eta = j.r;
  const double eta_z = j.r_t / j.z_t;
  const double eta_zz = (j.r_tt * j.z_t - j.r_t * j.z_tt) / (j.z_t * j.z_t * j.z_t);
  return {eta, rz.flip * eta_z, eta_zz};
}

double profile_k_deriv(const ShapeParams& p, double z) {
  check_shape(p, /*allow_k0=*/false);
  const double k = p.k;
  const AxisParams ap = to_axis(p);
  const DerivedConstants dc = derived_constants(ap);
  const double P = 2.0 * kPi * p.b;
  const ReducedZ rz = reduce_even(z, P);  // d_k eta is even in z
  const double t = invert_branch(ap, dc, rz.z, P);

  // k-derivatives of the curve data at fixed b and fixed t.
  const double kp = std::sqrt(1.0 - k * k);
  const double E = elliptic::complete_E(k);
  const double K = elliptic::complete_K(k);
  const double g = kPi / (E + kp * K);
  const double h_prime = (1.0 + kp) * (E - K) / (k * kp);  // d/dk (E + k'K)
  const double g_prime = -g * g * h_prime / kPi;
  const double c_prime = p.b * g_prime;
  const double a_prime = c_prime * kp - ap.c * k / kp;
  const double mu_prime = -0.5 * dc.mu * dc.mu * (a_prime + c_prime);
  const double p_prime = ap.c * c_prime - ap.a * a_prime;
  const double q_prime = ap.c * c_prime + ap.a * a_prime;

  const CurveJet j = curve_jet(ap, dc, t);
  const double theta = dc.mu * t;
  const double dr_dk = (p_prime * std::sin(theta) + dc.p * std::cos(theta) * mu_prime * t +
                        q_prime) /
                       (2.0 * j.r);

  const double x = 0.5 * theta - 0.25 * kPi;
  const double dx_dk = 0.5 * mu_prime * t;
  const double sx = std::sin(x), cx = std::cos(x);
  const double delta = std::sqrt(1.0 - k * k * sx * sx);
  const double Gx = elliptic::incomplete_G(x, k);
  const double Ex = elliptic::incomplete_E(x, k);
  const double dG_dk = Ex / (k * kp * kp) - Gx / k - k * sx * cx / (kp * kp * delta);
  const double dE_dk_inc = (Ex - Gx) / k;
  const double dz_dk = a_prime * Gx + ap.a * (dx_dk / delta + dG_dk) + c_prime * Ex +
                       ap.c * (delta * dx_dk + dE_dk_inc);

  return dr_dk - j.r_t * dz_dk / j.z_t;
}

ParamDerivs profile_param_derivs(const ShapeParams& p, double z) {
  check_shape(p, /*allow_k0=*/false);
  const ProfileSample s = profile_eval(p, z);
  const double d_b = (s.eta - z * s.eta_z) / p.b;

  const double h = 1e-4 * std::min(p.k, 1.0 - p.k);
  if (!(p.k - h > 0.0 && p.k + h < 1.0)) {
    throw std::domain_error("profile_param_derivs: k-stencil leaves (0,1)");
  }
  const auto eta_at = [&](double k) { return profile_eval({p.b, k}, z).eta; };
  const auto central = [&](double step) {
    return (eta_at(p.k + step) - eta_at(p.k - step)) / (2.0 * step);
  };
  const double d1 = central(h);
  const double d2 = central(0.5 * h);
  const double d_k = (4.0 * d2 - d1) / 3.0;
  return {d_b, d_k};
}

double graph_curvature(const ProfileSample& s) {
  const double m = 1.0 + s.eta_z * s.eta_z;
  return s.eta_zz / (m * std::sqrt(m)) - 1.0 / (s.eta * std::sqrt(m));
}

}  // namespace capwave::unduloid
