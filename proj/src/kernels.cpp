#include "dpk/kernels.hpp"

#include "dpk/error.hpp"
#include "dpk/quadrature.hpp"
#include "dpk/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <string>

namespace dpk::kernels {

namespace {

constexpr double kPi = std::numbers::pi;
// e^{-32.3} < 1e-14: cutoff for exponentially damped tails.
constexpr double kTailExponent = 32.3;
constexpr double kRelTail = 1e-10;
// sup |phi_k|^2 <= (1.0865 pi^{-1/4})^2
constexpr double kPhiSquareBound = 1.18 / 1.7724538509055160273;
constexpr long kMaxTailTerms = 4'000'000;

const quad::Options kQuad{1e-12, 0.0, 4000};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double hermite_forward(int n, double tm, double x, double tn, double y) {
  const Eigen::VectorXd a = specfun::hermite_phi_table(n, x / std::sqrt(2.0 * tm));
  const Eigen::VectorXd b = specfun::hermite_phi_table(n, y / std::sqrt(2.0 * tn));
  const double ratio = std::sqrt(tn / tm);
  double sum = 0.0, weight = 1.0;
  for (int k = 0; k < n; ++k) {
    sum += weight * a[k] * b[k];
    weight *= ratio;
  }
  return sum / std::sqrt(2.0 * tm);
}

// -(2 tm)^{-1/2} sum_{k >= N} (tn/tm)^{k/2} phi_k phi_k, certified by the geometric bound.
double hermite_tail(int n, double tm, double x, double tn, double y) {
  if (!(tn < tm)) throw NumericalConsistencyError("hermite kernel: tail branch requires t_n < t_m");
  const double r = std::sqrt(tn / tm);
  if (r >= 1.0 - 1e-12)
    throw PrecisionError("hermite kernel: tail ratio too close to 1 for a certified sum", 1.0);
  const double prefactor = 1.0 / std::sqrt(2.0 * tm);
  // Number of extra terms K so that r^{N+K} / (1 - r) * bound is below the target.
  auto bound_after = [&](long terms) {
    return prefactor * kPhiSquareBound * std::exp((n + terms) * std::log(r)) / (1.0 - r);
  };
  long terms = 64;
  double sum = 0.0;
  while (true) {
    const long count = n + terms;
    if (count > kMaxTailTerms)
      throw PrecisionError("hermite kernel: tail did not converge within the term cap", bound_after(terms));
    const Eigen::VectorXd a = specfun::hermite_phi_table(static_cast<int>(count), x / std::sqrt(2.0 * tm));
    const Eigen::VectorXd b = specfun::hermite_phi_table(static_cast<int>(count), y / std::sqrt(2.0 * tn));
    sum = 0.0;
    double weight = std::exp(n * std::log(r));
    for (long k = n; k < count; ++k) {
      sum += weight * a[k] * b[k];
      weight *= r;
    }
    sum *= prefactor;
    const double bound = bound_after(terms);
    if (bound <= kRelTail * std::abs(sum) || bound <= 1e-16 * prefactor) break;
    terms *= 2;
  }
  return -sum;
}

double hermite_kernel(int n, const SpaceTimePoint& a, const SpaceTimePoint& b) {
  if (!(a.time > 0.0) || !(b.time > 0.0)) throw DomainError("HermiteFinite kernel requires positive times");
  if (a.time <= b.time) return hermite_forward(n, a.time, a.position, b.time, b.position);
  return hermite_tail(n, a.time, a.position, b.time, b.position);
}

double sinc_over_pi(double d) {
  if (std::abs(d) < 1e-4) return (1.0 - d * d / 6.0 + d * d * d * d / 120.0) / kPi;
  return std::sin(d) / (kPi * d);
}

double airy_equal_time(double x, double y) {
  if (std::abs(x - y) < 1e-6) {
    // Symmetric kernel: the midpoint diagonal is accurate to O((x - y)^2).
    const double m = 0.5 * (x + y);
    const auto am = specfun::airy(m);
    return am.ai_prime * am.ai_prime - m * am.ai * am.ai;
  }
  const auto ax = specfun::airy(x), ay = specfun::airy(y);
  return (ax.ai * ay.ai_prime - ax.ai_prime * ay.ai) / (x - y);
}

double bessel_integrand_product(double nu, double lambda, double x, double y) {
  const double s = std::sqrt(lambda);
  return specfun::bessel_j(nu, 2.0 * s * std::sqrt(x)) * specfun::bessel_j(nu, 2.0 * s * std::sqrt(y));
}

void require_bessel_domain(double x, double y, const char* op) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError(std::string(op) + ": Bessel kernel requires positive positions");
}

double bessel_equal_time(double nu, double x, double y) {
  require_bessel_domain(x, y, "kernel_eval");
  if (std::abs(x - y) < 1e-4 * (1.0 + std::abs(x))) {
    return quad::integrate([&](double l) { return bessel_integrand_product(nu, l, x, y); }, 0.0, 1.0, kQuad).value;
  }
  const double sx = std::sqrt(x), sy = std::sqrt(y);
  const double jx = specfun::bessel_j(nu, 2 * sx), jy = specfun::bessel_j(nu, 2 * sy);
  const double dx = specfun::bessel_j_prime(nu, 2 * sx), dy = specfun::bessel_j_prime(nu, 2 * sy);
  return (jy * sx * dx - sy * dy * jx) / (y - x);
}

double equal_time(const KernelKind& kind, double x, double y) {
  return std::visit(overloaded{[&](const HermiteFinite& h) { return hermite_equal_time(h.n, 1.0, x, y); },
                               [&](const Sine&) { return sinc_over_pi(y - x); },
                               [&](const Airy&) { return airy_equal_time(x, y); },
                               [&](const Bessel& b) { return bessel_equal_time(b.nu, x, y); }},
                    kind);
}

}  // namespace

void validate(const KernelKind& kind) {
  if (const auto* h = std::get_if<HermiteFinite>(&kind); h && h->n < 1)
    throw ArgumentError("HermiteFinite kernel requires N >= 1");
  if (const auto* b = std::get_if<Bessel>(&kind); b && !(b->nu > -1.0))
    throw ArgumentError("Bessel kernel requires nu > -1");
}

bool is_limit_kernel(const KernelKind& kind) { return !std::holds_alternative<HermiteFinite>(kind); }

std::string kind_name(const KernelKind& kind) {
  return std::visit(overloaded{[](const HermiteFinite& h) { return "hermite(N=" + std::to_string(h.n) + ")"; },
                               [](const Sine&) { return std::string("sine"); },
                               [](const Airy&) { return std::string("airy"); },
                               [](const Bessel& b) {
                                 char buf[64];
                                 std::snprintf(buf, sizeof buf, "bessel(nu=%.17g)", b.nu);
                                 return std::string(buf);
                               }},
                    kind);
}

double g_plus(const KernelKind& kind, double tau, double x, double y) {
  validate(kind);
  return std::visit(
      overloaded{
          [&](const HermiteFinite&) -> double {
            throw ArgumentError("g_plus: defined for the Sine, Airy and Bessel families");
          },
          [&](const Sine&) {
            const double d = y - x;
            return quad::integrate([&](double u) { return std::exp(tau * u * u) * std::cos(u * d); }, 0.0, 1.0, kQuad)
                       .value /
                   kPi;
          },
          [&](const Airy&) {
            if (tau == 0.0) return airy_equal_time(x, y);
            auto f = [&](double u) {
              const double ai_x = specfun::airy_ai(x + u);
              if (ai_x == 0.0) return 0.0;
              return std::exp(-tau * u) * ai_x * specfun::airy_ai(y + u);
            };
            // The oscillatory part sits on u < -min(x, y); integrate it on a finite range.
            const double knee = std::max(0.0, -std::min(x, y));
            double value = 0.0;
            if (knee > 0.0) value += quad::integrate_panels(f, 0.0, knee, 2.0, kQuad).value;
            value += quad::integrate_to_infinity(f, knee, 2.0, kQuad).value;
            return value;
          },
          [&](const Bessel& b) {
            require_bessel_domain(x, y, "g_plus");
            return quad::integrate(
                       [&](double l) { return std::exp(tau * l) * bessel_integrand_product(b.nu, l, x, y); }, 0.0,
                       1.0, kQuad)
                .value;
          }},
      kind);
}

double g_bar(const KernelKind& kind, double tau, double x, double y) {
  validate(kind);
  if (!(tau > 0.0)) throw DomainError("g_bar: requires tau > 0");
  return std::visit(
      overloaded{
          [&](const HermiteFinite&) -> double {
            throw ArgumentError("g_bar: defined for the Sine, Airy and Bessel families");
          },
          [&](const Sine&) {
            const double d = y - x;
            const double upper = std::sqrt(1.0 + kTailExponent / tau);
            const double width = std::min(1.0, kPi / std::max(std::abs(d), 1e-3));
            return -quad::integrate_panels([&](double u) { return std::exp(-tau * u * u) * std::cos(u * d); }, 1.0,
                                           upper, width, kQuad)
                        .value /
                   kPi;
          },
          [&](const Airy&) {
            // lambda >= 0 where Ai(x - lambda) Ai(y - lambda) oscillates; damping alone sets the range.
            const double upper = kTailExponent / tau + std::max(0.0, std::max(x, y)) + 10.0;
            return -quad::integrate_panels(
                        [&](double l) { return std::exp(-tau * l) * specfun::airy_ai(x - l) * specfun::airy_ai(y - l); },
                        0.0, upper, 2.0, kQuad)
                        .value;
          },
          [&](const Bessel& b) {
            require_bessel_domain(x, y, "g_bar");
            const double upper = 1.0 + kTailExponent / tau;
            const double freq = std::sqrt(std::max(x, y));
            const double width = std::clamp(4.0 / freq, 0.5, 8.0);
            return -quad::integrate_panels(
                        [&](double l) { return std::exp(-tau * l) * bessel_integrand_product(b.nu, l, x, y); }, 1.0,
                        upper, width, kQuad)
                        .value;
          }},
      kind);
}

double kernel_eval(const KernelKind& kind, const SpaceTimePoint& a, const SpaceTimePoint& b) {
  validate(kind);
  if (const auto* h = std::get_if<HermiteFinite>(&kind)) return hermite_kernel(h->n, a, b);
  if (a.time == b.time) return equal_time(kind, a.position, b.position);
  if (a.time < b.time) return g_plus(kind, b.time - a.time, a.position, b.position);
  return g_bar(kind, a.time - b.time, a.position, b.position);
}

double hermite_equal_time(int n, double t, double x, double y) {
  if (n < 1) throw ArgumentError("hermite_equal_time: N must be positive");
  if (!(t > 0.0)) throw DomainError("hermite_equal_time: time must be positive");
  const double s = std::sqrt(2.0 * t);
  if (x == y) {
    const Eigen::VectorXd p = specfun::hermite_phi_table(n + 2, x / s);
    return (n * p[n] * p[n] - std::sqrt(double(n) * (n + 1)) * p[n - 1] * p[n + 1]) / s;
  }
  const Eigen::VectorXd px = specfun::hermite_phi_table(n + 1, x / s);
  const Eigen::VectorXd py = specfun::hermite_phi_table(n + 1, y / s);
  return std::sqrt(n / 2.0) * (px[n] * py[n - 1] - px[n - 1] * py[n]) / (x - y);
}

double hermite_equal_time_sum(int n, double t, double x, double y) {
  if (n < 1) throw ArgumentError("hermite_equal_time_sum: N must be positive");
  if (!(t > 0.0)) throw DomainError("hermite_equal_time_sum: time must be positive");
  return hermite_forward(n, t, x, t, y);
}

double density_rho_n(int n, double t, double x) {
  const double value = hermite_equal_time(n, t, x, x);
  if (value < 0.0) {
    if (value < -1e-12)
      std::cerr << "warning: density_rho_n clamped a negative value " << value << " at x=" << x << " to 0\n";
    return 0.0;
  }
  return value;
}

double semicircle(int n, double t, double x) {
  if (!(t > 0.0)) throw DomainError("semicircle: time must be positive");
  const double inside = 2.0 * n - x * x / (2.0 * t);
  if (inside <= 0.0) return 0.0;
  return std::sqrt(inside) / (kPi * std::sqrt(2.0 * t));
}

double edge_shift(int n, double s) {
  if (n < 1) throw ArgumentError("edge_shift: N must be positive");
  const double c = std::cbrt(double(n));
  return 2.0 * c * c + 2.0 * c * s - s * s;
}

double bulk_scaled_kernel(int n, double sa, double xa, double sb, double xb) {
  if (n < 2 || n % 2 != 0) throw ArgumentError("bulk_scaled_kernel: N must be a positive even integer");
  const double ta = n + 2.0 * sa, tb = n + 2.0 * sb;
  if (!(ta > 0.0) || !(tb > 0.0)) throw DomainError("bulk_scaled_kernel: requires N + 2s > 0");
  return kernel_eval(HermiteFinite{n}, {ta, xa}, {tb, xb});
}

double edge_scaled_kernel(int n, double sa, double xa, double sb, double xb) {
  if (n < 1) throw ArgumentError("edge_scaled_kernel: N must be positive");
  const double c = std::cbrt(double(n));
  const double ta = c + 2.0 * sa, tb = c + 2.0 * sb;
  if (!(ta > 0.0) || !(tb > 0.0)) throw DomainError("edge_scaled_kernel: requires N^{1/3} + 2s > 0");
  const double gauge = std::exp(0.5 * (n - 1) * std::log(ta / tb));
  return gauge * kernel_eval(HermiteFinite{n}, {ta, edge_shift(n, sa) + xa}, {tb, edge_shift(n, sb) + xb});
}

double delta_t(const KernelKind& kind, double t, double x, double y) {
  validate(kind);
  if (!(t > 0.0)) throw DomainError("delta_t: time must be positive");
  return std::visit(
      overloaded{[&](const HermiteFinite&) {
                   const double d = x - y;
                   return std::exp(-d * d / 8.0 / std::tanh(0.5 * t) - 0.25 * x * y * std::tanh(0.25 * t)) /
                          (2.0 * std::sqrt(-kPi * std::expm1(-t)));
                 },
                 [&](const Sine&) {
                   const double d = x - y;
                   return std::exp(-d * d / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
                 },
                 [&](const Airy&) {
                   const double d = x - y;
                   return std::exp(-d * d / (4.0 * t) - 0.5 * t * (x + y) + t * t * t / 12.0) /
                          std::sqrt(4.0 * kPi * t);
                 },
                 [&](const Bessel& b) {
                   if (!(x > 0.0) || !(y > 0.0)) throw DomainError("delta_t: Bessel family requires x, y > 0");
                   const double z = x * y / (2.0 * t);
                   const double d = x - y;
                   // e^{-(x^2+y^2)/4t} I_nu(z) = e^{-(x-y)^2/4t} [e^{-z} I_nu(z)]
                   return std::sqrt(x * y) / (2.0 * t) * std::exp(-d * d / (4.0 * t)) *
                          specfun::bessel_i_scaled(b.nu, z);
                 }},
      kind);
}

double bound1_diagnostic(const KernelKind& kind, double t, double x) {
  validate(kind);
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("bound1_diagnostic: requires t in (0, 1]");
  auto moment = [&](double y) {
    const double d = x - y;
    return d * d * d * d * delta_t(kind, t, x, y);
  };
  const quad::Options opts{1e-13, 0.0, 4000};
  if (std::holds_alternative<Bessel>(kind)) {
    if (!(x > 0.0)) throw DomainError("bound1_diagnostic: Bessel family requires x > 0");
    return quad::integrate_to_infinity(moment, 0.0, std::max(x, std::sqrt(t)), opts).value;
  }
  const double center = std::holds_alternative<Airy>(kind) ? x - t * t : x;
  return quad::integrate_line(moment, center, 2.0 * std::sqrt(2.0 * t), opts).value;
}

double spectral_rho(const KernelKind& kind, double x) {
  validate(kind);
  if (!is_limit_kernel(kind)) throw ArgumentError("spectral_rho: defined for the Sine, Airy and Bessel families");
  if (std::holds_alternative<Sine>(kind)) return 1.0 / kPi;
  if (std::holds_alternative<Airy>(kind)) {
    const auto a = specfun::airy(x);
    return std::max(0.0, a.ai_prime * a.ai_prime - x * a.ai * a.ai);
  }
  return std::max(0.0, bessel_equal_time(std::get<Bessel>(kind).nu, x, x));
}

double palm_kernel(const KernelKind& kind, double z, double x, double y) {
  validate(kind);
  const double kzz = equal_time(kind, z, z);
  if (!(std::abs(kzz) > 1e-300)) throw DivisionError("palm_kernel: K(z, z) vanishes");
  return (equal_time(kind, x, y) * kzz - equal_time(kind, x, z) * equal_time(kind, z, y)) / kzz;
}

}  // namespace dpk::kernels
