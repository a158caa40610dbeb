#include "dpk/specfun.hpp"

#include "dpk/error.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace dpk::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogMax = 709.0;
constexpr double kRescale = 1e150;
const double kLogRescale = std::log(kRescale);

// phi_n(zeta) == value * exp(log_scale - zeta^2/2); the Gaussian weight is kept out of
// the recurrence so neither factor under- or overflows on its own.
struct ScaledHermite {
  double value;
  double log_scale;
};

ScaledHermite scaled_hermite(int n, double zeta) {
  double prev = 0.0;
  double cur = 1.0 / std::sqrt(std::sqrt(kPi));
  double log_scale = 0.0;
  for (int k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * zeta * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += kLogRescale;
    }
  }
  return {cur, log_scale};
}

double assemble(double value, double log_magnitude) {
  if (value == 0.0) return 0.0;
  return std::copysign(std::exp(std::log(std::abs(value)) + log_magnitude), value);
}

void require_positive_time(double t, const char* op) {
  if (!(t > 0.0)) throw DomainError(std::string(op) + ": time must be positive");
}

void require_index(int n, const char* op) {
  if (n < 0) throw DomainError(std::string(op) + ": Hermite index must be nonnegative");
}

}  // namespace

double heat_kernel(double t, double x, double xprime) {
  require_positive_time(t, "heat_kernel");
  const double d = x - xprime;
  return std::exp(-d * d / (2.0 * t)) / std::sqrt(2.0 * kPi * t);
}

double hermite_phi(int n, double zeta) {
  require_index(n, "hermite_phi");
  const auto h = scaled_hermite(n, zeta);
  return assemble(h.value, h.log_scale - 0.5 * zeta * zeta);
}

Eigen::VectorXd hermite_phi_table(int count, double zeta) {
  Eigen::VectorXd out(std::max(count, 0));
  if (count <= 0) return out;
  const double gauss = -0.5 * zeta * zeta;
  if (!std::isfinite(gauss)) return Eigen::VectorXd::Zero(count);
  double prev = 0.0;
  double cur = 1.0 / std::sqrt(std::sqrt(kPi));
  double log_scale = 0.0;
  out[0] = assemble(cur, gauss);
  for (int k = 0; k + 1 < count; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * zeta * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += kLogRescale;
    }
    out[k + 1] = assemble(cur, log_scale + gauss);
  }
  return out;
}

double phi_tx(int n, double t, double x) {
  require_index(n, "phi_tx");
  require_positive_time(t, "phi_tx");
  const double zeta = x / std::sqrt(2.0 * t);
  const auto h = scaled_hermite(n, zeta);
  // e^{-x^2/4t} phi_n(zeta) = value * exp(log_scale - zeta^2)
  const double log_mag = h.log_scale - zeta * zeta - 0.5 * std::log(2.0) - 0.5 * (n + 1) * std::log(t);
  if (h.value != 0.0 && std::log(std::abs(h.value)) + log_mag > kLogMax)
    throw RangeError("phi_tx: result overflows double precision");
  return assemble(h.value, log_mag);
}

double hatphi_tx(int n, double t, double x) {
  require_index(n, "hatphi_tx");
  require_positive_time(t, "hatphi_tx");
  const double zeta = x / std::sqrt(2.0 * t);
  const auto h = scaled_hermite(n, zeta);
  // e^{x^2/4t} phi_n(zeta) = value * exp(log_scale): the Gaussian cancels exactly.
  const double log_mag = h.log_scale + 0.5 * n * std::log(t);
  if (h.value != 0.0 && std::log(std::abs(h.value)) + log_mag > kLogMax)
    throw RangeError("hatphi_tx: result overflows double precision");
  return assemble(h.value, log_mag);
}

double mehler_sum(double t, double tprime, double x, double xprime, int terms) {
  require_positive_time(tprime, "mehler_sum");
  if (!(tprime < t)) throw DomainError("mehler_sum: requires tprime < t for convergence");
  if (terms <= 0) throw ArgumentError("mehler_sum: terms must be positive");
  const double ratio = std::sqrt(tprime / t);
  const Eigen::VectorXd a = hermite_phi_table(terms, x / std::sqrt(2.0 * t));
  const Eigen::VectorXd b = hermite_phi_table(terms, xprime / std::sqrt(2.0 * tprime));
  double sum = 0.0;
  double weight = 1.0;
  for (int n = 0; n < terms; ++n) {
    sum += weight * a[n] * b[n];
    weight *= ratio;
  }
  return std::exp(-x * x / (4.0 * t) + xprime * xprime / (4.0 * tprime)) * sum / std::sqrt(2.0 * t);
}

// ---------------------------------------------------------------------------
// Airy

namespace detail {

AiryValue airy_maclaurin(double xd) {
  using real = long double;
  constexpr real c1 = 0.355028053887817239260063186004183176L;  // Ai(0)
  constexpr real c2 = 0.258819403792806798405183560189203963L;  // -Ai'(0)
  const real x = xd;
  const real x3 = x * x * x;
  const real eps = 1e-22L;

  // f = sum a_k, g = sum b_k; derivatives fp = sum p_k, gp = sum q_k.
  real a = 1, b = x, p = x * x / 2, q = 1;
  real f = a, g = b, fp = p, gp = q;
  for (int k = 1; k < 400; ++k) {
    a *= x3 / ((3 * k - 1) * (3 * k));
    b *= x3 / ((3 * k) * (3 * k + 1));
    if (k >= 2) p *= x3 / ((3 * k - 1) * (3 * k - 3));
    q *= x3 / ((3 * k) * (3 * k - 2));
    f += a;
    g += b;
    if (k >= 2) fp += p;
    gp += q;
    const real scale = std::abs(f) + std::abs(g) + std::abs(fp) + std::abs(gp) + 1;
    if (std::abs(a) + std::abs(b) + std::abs(p) + std::abs(q) < eps * scale && k > 3) break;
  }
  return {static_cast<double>(c1 * f - c2 * g), static_cast<double>(c1 * fp - c2 * gp)};
}

AiryValue airy_asymptotic(double x) {
  const int max_terms = kAiryConfig.max_asymptotic_terms;
  const double z = std::abs(x);
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  const double z14 = std::sqrt(std::sqrt(z));

  // u_k and v_k coefficients, with u_k/zeta^k and v_k/zeta^k accumulated directly.
  std::vector<double> u{1.0}, v{1.0};
  for (int k = 1; k < max_terms; ++k) {
    const double ratio = double(6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k);
    u.push_back(u.back() * ratio / zeta);
    v.push_back(-u.back() * (6 * k + 1) / (6 * k - 1));
  }

  if (x > 0) {
    double su = 0, sv = 0, last = INFINITY;
    for (int k = 0; k < max_terms; ++k) {
      const double term = std::abs(u[k]) + std::abs(v[k]);
      if (term > last) break;
      const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
      su += sgn * u[k];
      sv += sgn * v[k];
      last = term;
      if (term < 1e-17) break;
    }
    const double e = std::exp(-zeta) / (2.0 * std::sqrt(kPi));
    return {e * su / z14, -e * z14 * sv};
  }

  double ue = 0, uo = 0, ve = 0, vo = 0, last = INFINITY;
  for (int k = 0; k < max_terms; ++k) {
    const double term = std::abs(u[k]) + std::abs(v[k]);
    if (term > last) break;
    const double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      ue += sgn * u[k];
      ve += sgn * v[k];
    } else {
      uo += sgn * u[k];
      vo += sgn * v[k];
    }
    last = term;
    if (term < 1e-17) break;
  }
  const double theta = zeta - kPi / 4.0;
  const double c = std::cos(theta), s = std::sin(theta);
  const double rp = std::sqrt(kPi);
  return {(c * ue + s * uo) / (rp * z14), z14 * (s * ve - c * vo) / rp};
}

}  // namespace detail

AiryValue airy(double x) {
  if (std::isnan(x)) return {x, x};
  if (x >= kAiryConfig.negative_switch && x <= kAiryConfig.positive_switch)
    return detail::airy_maclaurin(x);
  if (x > 0 && x > 150.0) return {0.0, 0.0};  // below the smallest subnormal
  return detail::airy_asymptotic(x);
}

double airy_ai(double x) { return airy(x).ai; }
double airy_ai_prime(double x) { return airy(x).ai_prime; }

// ---------------------------------------------------------------------------
// Bessel

namespace {

void check_bessel_args(double nu, double x, const char* op) {
  if (!(nu > -1.0)) throw DomainError(std::string(op) + ": order must exceed -1");
  if (!(x >= 0.0)) throw DomainError(std::string(op) + ": argument must be nonnegative");
}

double bessel_j_series(double nu, double x) {
  const double h2 = 0.25 * x * x;
  double term = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0));
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -h2 / (k * (k + nu));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Hankel expansion; accurate once x >> nu^2.
double bessel_j_hankel(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 0, q = 0, term = 1.0, last = INFINITY;
  for (int k = 0; k < 80; ++k) {
    if (k > 0) term *= (mu - double(2 * k - 1) * (2 * k - 1)) / (8.0 * k * x);
    const double mag = std::abs(term);
    if (mag > last && k > 2) break;
    const double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    (k % 2 == 0 ? p : q) += sgn * term;
    if (mag < 1e-17) break;
    last = mag;
  }
  const double omega = x - 0.5 * nu * kPi - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(omega) - q * std::sin(omega));
}

// Miller backward recurrence normalized with
//   (x/2)^mu = Gamma(1+mu) J_mu + sum_{k>=1} (mu+2k) Gamma(mu+k)/k! J_{mu+2k}.
double bessel_j_miller(double nu, double x) {
  const double mu = nu >= 0.0 ? nu - std::floor(nu) : nu;
  const int n = static_cast<int>(std::lround(nu - mu));
  const int m_top = std::max(n, static_cast<int>(std::ceil(x))) + 30 + static_cast<int>(std::ceil(6.0 * std::cbrt(x)));
  std::vector<double> f(m_top + 2, 0.0);
  f[m_top + 1] = 0.0;
  f[m_top] = 1e-30;
  for (int m = m_top; m >= 1; --m) {
    f[m - 1] = 2.0 * (mu + m) / x * f[m] - f[m + 1];
    if (std::abs(f[m - 1]) > 1e250) {
      for (int j = m - 1; j <= m_top + 1; ++j) f[j] *= 1e-250;
    }
  }
  double norm = std::tgamma(1.0 + mu) * f[0];
  for (int k = 1; 2 * k <= m_top; ++k) {
    const double c = (mu + 2 * k) * std::exp(std::lgamma(mu + k) - std::lgamma(k + 1.0));
    norm += c * f[2 * k];
  }
  return f[n] * std::pow(0.5 * x, mu) / norm;
}

}  // namespace

double bessel_j(double nu, double x) {
  check_bessel_args(nu, x, "bessel_j");
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0) return 0.0;
    throw DomainError("bessel_j: J_nu(0) is infinite for negative order");
  }
  if (x <= 4.0) return bessel_j_series(nu, x);
  if (x > 60.0 && x > 2.0 * nu * nu) return bessel_j_hankel(nu, x);
  return bessel_j_miller(nu, x);
}

double bessel_j_prime(double nu, double x) {
  check_bessel_args(nu, x, "bessel_j_prime");
  if (x == 0.0) {
    if (nu == 0.0 || nu > 1.0) return 0.0;
    if (nu == 1.0) return 0.5;
    throw DomainError("bessel_j_prime: derivative is infinite at the origin for this order");
  }
  return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x);
}

double bessel_i_scaled(double nu, double x) {
  check_bessel_args(nu, x, "bessel_i");
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0) return 0.0;
    throw DomainError("bessel_i: I_nu(0) is infinite for negative order");
  }
  if (x > 30.0 && x > 2.0 * nu * nu) {
    const double mu = 4.0 * nu * nu;
    double sum = 0, term = 1.0, last = INFINITY;
    for (int k = 0; k < 80; ++k) {
      if (k > 0) term *= -(mu - double(2 * k - 1) * (2 * k - 1)) / (8.0 * k * x);
      if (std::abs(term) > last && k > 2) break;
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
      last = std::abs(term);
    }
    return sum / std::sqrt(2.0 * kPi * x);
  }
  const double h2 = 0.25 * x * x;
  double term = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0) - x);
  double sum = term;
  for (int k = 1; k < 100000; ++k) {
    term *= h2 / (k * (k + nu));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

double bessel_i(double nu, double x) {
  const double scaled = bessel_i_scaled(nu, x);
  if (x > kLogMax) throw RangeError("bessel_i: result overflows double precision; use bessel_i_scaled");
  return scaled * std::exp(x);
}

}  // namespace dpk::specfun
