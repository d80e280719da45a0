#ifndef CAPWAVE_ELLIPTIC_HPP
#define CAPWAVE_ELLIPTIC_HPP

namespace capwave::elliptic {

// Tolerances used by the implementations, read-only for tests.
inline constexpr double agm_rel_tol = 1e-15;   // AGM stop: |a-g| <= tol*a
inline constexpr double quad_abs_tol = 1e-13;  // adaptive Gauss-Kronrod target

// Complete elliptic integral of the first kind, modulus convention:
// K(k) = \int_0^{pi/2} du / sqrt(1 - k^2 sin^2 u), 0 <= k < 1.
double complete_K(double k);

// Complete elliptic integral of the second kind,
// E(k) = \int_0^{pi/2} sqrt(1 - k^2 sin^2 u) du, 0 <= k <= 1, E(1) = 1.
double complete_E(double k);

// Incomplete integral of the first kind G(phi,k) = \int_0^phi du/sqrt(1-k^2 sin^2 u)
// for any real phi, extended by G(phi+pi,k) = G(phi,k) + 2K(k).
double incomplete_G(double phi, double k);

// Incomplete integral of the second kind E(phi,k) = \int_0^phi sqrt(1-k^2 sin^2 u) du
// for any real phi, extended by E(phi+pi,k) = E(phi,k) + 2E(k).
double incomplete_E(double phi, double k);

// dK/dk = E/(k(1-k^2)) - K/k and dE/dk = (E-K)/k, valid on 0 < k < 1.
// The k = 0 endpoint is a domain error (both formulas are 0/0 there).
double dK_dk(double k);
double dE_dk(double k);

// Truncated hypergeometric series
//   K = pi/2 * sum_{n>=0} ((2n)!/(2^{2n}(n!)^2))^2 k^{2n}
//   E = pi/2 * sum_{n>=0} ((2n)!/(2^{2n}(n!)^2))^2 k^{2n}/(1-2n)
// with n_terms >= 1 terms; independent oracles for the AGM/quadrature routes.
double series_K(double k, int n_terms);
double series_E(double k, int n_terms);

}  // namespace capwave::elliptic

#endif  // CAPWAVE_ELLIPTIC_HPP
