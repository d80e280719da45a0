#include "capwave/elliptic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace capwave::elliptic {

namespace {

constexpr double kPi = std::numbers::pi;

void require_k_open(double k, const char* fn) {
  if (!(k >= 0.0 && k < 1.0)) {
    throw std::domain_error(std::string(fn) + ": modulus k = " + std::to_string(k) +
                            " outside [0,1)");
  }
}

void require_k_closed(double k, const char* fn) {
  if (!(k >= 0.0 && k <= 1.0)) {
    throw std::domain_error(std::string(fn) + ": modulus k = " + std::to_string(k) +
                            " outside [0,1]");
  }
}

// 7/15-point Gauss-Kronrod pair on [-1,1] (QUADPACK abscissae/weights).
constexpr double kXgk[8] = {
    0.9914553711208126392068547, 0.9491079123427585245261897,
    0.8648644233597690727897128, 0.7415311855993944398638648,
    0.5860872354676911302941448, 0.4058451513773971669066064,
    0.2077849550078984676006894, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292249637320, 0.0630920926299785532907007,
    0.1047900103222501838398763, 0.1406532597155259187451896,
    0.1690047266392679028265834, 0.1903505780647854099132564,
    0.2044329400752988924141620, 0.2094821410847278280129992};
constexpr double kWg[4] = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020};

struct GkEstimate {
  double integral;
  double error;
};

template <typename F>
GkEstimate gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double result_gauss = kWg[3] * fc;
  double result_kronrod = kWgk[7] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * kXgk[i];
    const double fsum = f(c - x) + f(c + x);
    result_kronrod += kWgk[i] * fsum;
    if (i % 2 == 1) result_gauss += kWg[i / 2] * fsum;
  }
  return {result_kronrod * h, std::abs(result_kronrod - result_gauss) * std::abs(h)};
}

template <typename F>
double adaptive_gk(const F& f, double a, double b, double abs_tol, int depth = 0) {
  const GkEstimate e = gk15(f, a, b);
  if (e.error <= abs_tol || depth >= 40) return e.integral;
  const double c = 0.5 * (a + b);
  return adaptive_gk(f, a, c, 0.5 * abs_tol, depth + 1) +
         adaptive_gk(f, c, b, 0.5 * abs_tol, depth + 1);
}

}  // namespace

double complete_K(double k) {
  require_k_open(k, "complete_K");
  if (k == 0.0) return kPi / 2.0;
  long double a = 1.0L;
  long double g = std::sqrt((1.0L - static_cast<long double>(k)) * (1.0L + k));
  while (std::abs(a - g) > agm_rel_tol * a) {
    const long double an = 0.5L * (a + g);
    g = std::sqrt(a * g);
    a = an;
  }
  return static_cast<double>(kPi / (a + g));
}

double complete_E(double k) {
  require_k_closed(k, "complete_E");
  if (k == 1.0) return 1.0;
  if (k == 0.0) return kPi / 2.0;
  // E = K (1 - sum_{n>=0} 2^{n-1} c_n^2) with c_0 = k, c_{n+1} = (a_n - g_n)/2.
  long double a = 1.0L;
  long double g = std::sqrt((1.0L - static_cast<long double>(k)) * (1.0L + k));
  long double c = k;
  long double sum = 0.5L * c * c;
  long double pow2 = 0.5L;
  while (std::abs(a - g) > agm_rel_tol * a) {
    c = 0.5L * (a - g);
    const long double an = 0.5L * (a + g);
    g = std::sqrt(a * g);
    a = an;
    pow2 *= 2.0L;
    sum += pow2 * c * c;
  }
  const long double K = kPi / (a + g);
  return static_cast<double>(K * (1.0L - sum));
}

namespace {

// Reduce phi to phi_r in [-pi/2, pi/2] plus n half-turns, then integrate the
// defining integrand on [0, |phi_r|].
template <typename Integrand>
double incomplete(double phi, double complete_value, const Integrand& f) {
  if (!std::isfinite(phi)) throw std::domain_error("incomplete integral: non-finite amplitude");
  const double n = std::round(phi / kPi);
  const double phi_r = phi - n * kPi;
  double value = (n == 0.0) ? 0.0 : 2.0 * n * complete_value;
  if (phi_r != 0.0) {
    const double body = adaptive_gk(f, 0.0, std::abs(phi_r), quad_abs_tol);
    value += std::copysign(body, phi_r);
  }
  return value;
}

}  // namespace

double incomplete_G(double phi, double k) {
  require_k_open(k, "incomplete_G");
  const double k2 = k * k;
  return incomplete(phi, complete_K(k), [k2](double u) {
    const double s = std::sin(u);
    return 1.0 / std::sqrt(1.0 - k2 * s * s);
  });
}

double incomplete_E(double phi, double k) {
  require_k_closed(k, "incomplete_E");
  const double k2 = k * k;
  return incomplete(phi, complete_E(k), [k2](double u) {
    const double s = std::sin(u);
    return std::sqrt(1.0 - k2 * s * s);
  });
}

double dK_dk(double k) {
  if (!(k > 0.0 && k < 1.0)) throw std::domain_error("dK_dk: k outside (0,1)");
  const double K = complete_K(k);
  const double E = complete_E(k);
  return E / (k * (1.0 - k * k)) - K / k;
}

double dE_dk(double k) {
  if (!(k > 0.0 && k < 1.0)) throw std::domain_error("dE_dk: k outside (0,1)");
  return (complete_E(k) - complete_K(k)) / k;
}

namespace {

double series_sum(double k, int n_terms, bool second_kind) {
  if (n_terms < 1) throw std::invalid_argument("series: n_terms must be >= 1");
  const double k2 = k * k;
  double coeff = 1.0;  // ((2n)!/(2^{2n}(n!)^2))^2 at n = 0
  double power = 1.0;  // k^{2n}
  double sum = 1.0;
  for (int n = 1; n < n_terms; ++n) {
    const double r = (2.0 * n - 1.0) / (2.0 * n);
    coeff *= r * r;
    power *= k2;
    sum += second_kind ? coeff * power / (1.0 - 2.0 * n) : coeff * power;
  }
  return kPi / 2.0 * sum;
}

}  // namespace

double series_K(double k, int n_terms) {
  require_k_open(k, "series_K");
  return series_sum(k, n_terms, false);
}

double series_E(double k, int n_terms) {
  require_k_closed(k, "series_E");
  return series_sum(k, n_terms, true);
}

}  // namespace capwave::elliptic
