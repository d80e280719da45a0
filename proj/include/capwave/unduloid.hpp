#ifndef CAPWAVE_UNDULOID_HPP
#define CAPWAVE_UNDULOID_HPP

namespace capwave::unduloid {

// Unduloid in the (a,c) description: neck radius a, bulge radius c, c > a > 0.
struct AxisParams {
  double a;
  double c;
};

// Unduloid in the (size, shape) description: period 2*pi*b, shape k in (0,1).
// k = 0 is the flat cylinder of radius b; only the diagnostics that explicitly
// target that degenerate case accept it.
struct ShapeParams {
  double b;
  double k;
};

struct DerivedConstants {
  double mu;  // 2/(a+c)
  double p;   // (c^2-a^2)/2
  double q;   // (c^2+a^2)/2
  double k;   // sqrt(c^2-a^2)/c
};

// Graph-form sample r = eta(z) with z-derivatives.
struct ProfileSample {
  double eta;
  double eta_z;
  double eta_zz;
};

struct CurvePoint {
  double r;
  double z;
};

struct ParamDerivs {
  double d_b_eta;  // analytic: (eta - z eta_z)/b
  double d_k_eta;  // central differences in k with one Richardson level
};

DerivedConstants derived_constants(const AxisParams& p);

// g(k) = pi / (E(k) + sqrt(1-k^2) K(k)); g(0) = 1, g(k) -> pi as k -> 1.
double g_of_k(double k);

// Mutually inverse maps between the two parametrizations.
ShapeParams to_shape(const AxisParams& p);
AxisParams to_axis(const ShapeParams& p);

// Point of the generating curve: r(t) = sqrt(p sin(mu t) + q),
// z(t) = a G(mu t/2 - pi/4, k) + c E(mu t/2 - pi/4, k).
CurvePoint param_point(const AxisParams& p, double t);

// Period along the axis: 2 c E(k) + 2 a K(k), equal to 2 pi b.
double period(const AxisParams& p);
double period_shape(double b);

// Constant mean curvature, water-wave convention (cylinder of radius R
// has curvature -1/R): -2/(a+c), equivalently -2(E+k'K)/(pi b (1+k')).
double mean_curvature_axis(const AxisParams& p);
double mean_curvature_shape(const ShapeParams& p);

// Closed-form partials of the mean curvature at fixed b resp. fixed k:
//   d kappa/dk = -2 (2(E-K) + k^2 K) / (pi b k sqrt(1-k^2) (1+sqrt(1-k^2)))
//   d kappa/db = -kappa/b
// dkappa_dk is strictly positive on k in (0,1) (the numerator 2(E-K)+k^2 K
// is strictly negative) and is a domain error at k in {0,1}.
double dkappa_dk(const ShapeParams& p);
double dkappa_db(const ShapeParams& p);

// Graph-form evaluation at any real z by inverting t -> z(t) on the monotone
// branch t in [pi/(2mu) - 2pi/mu, pi/(2mu)]; eta is even and 2*pi*b periodic,
// with eta(0) = c (bulge) and eta(pi b) = a (neck). k = 0 returns the flat
// cylinder (b, 0, 0).
ProfileSample profile_eval(const ShapeParams& p, double z);

ParamDerivs profile_param_derivs(const ShapeParams& p, double z);

// Exact d eta/dk at fixed b and z, by implicit differentiation of the
// parametric representation (uses the closed-form k-derivatives of the
// incomplete integrals). Reference route for the finite-difference d_k_eta;
// the kernel certificate samples this one to avoid the FD noise floor.
double profile_k_deriv(const ShapeParams& p, double z);

// Mean curvature of a graph r = eta(z):
// kappa[eta] = eta_zz/(1+eta_z^2)^{3/2} - 1/(eta sqrt(1+eta_z^2)).
double graph_curvature(const ProfileSample& s);

}  // namespace capwave::unduloid

#endif  // CAPWAVE_UNDULOID_HPP
