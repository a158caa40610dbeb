#include "doctest.h"

#include "dpk/error.hpp"
#include "dpk/kernels.hpp"
#include "dpk/specfun.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace dpk;
using namespace dpk::kernels;

namespace {

constexpr double kPi = std::numbers::pi;

double ai(double x) { return x > 100 ? 0.0 : boost::math::airy_ai(x); }
double aip(double x) { return boost::math::airy_ai_prime(x); }

// Normalized Hermite functions by the three-term recurrence in long double.
std::vector<long double> phi_oracle(int count, long double z) {
  std::vector<long double> out(std::max(count, 2));
  out[0] = std::exp(-z * z / 2) / std::pow(std::numbers::pi_v<long double>, 0.25L);
  out[1] = std::sqrt(2.0L) * z * out[0];
  for (int k = 1; k + 1 < count; ++k)
    out[k + 1] = std::sqrt(2.0L / (k + 1)) * z * out[k] - std::sqrt(static_cast<long double>(k) / (k + 1)) * out[k - 1];
  return out;
}

double forward_oracle(int n, double ta, double x, double tb, double y) {
  const auto a = phi_oracle(n, x / std::sqrt(2.0L * ta));
  const auto b = phi_oracle(n, y / std::sqrt(2.0L * tb));
  long double s = 0;
  for (int k = 0; k < n; ++k) s += std::pow(static_cast<long double>(tb / ta), k / 2.0L) * a[k] * b[k];
  return static_cast<double>(s / std::sqrt(2.0L * ta));
}

double heat(double t, double x, double y) { return std::exp(-(x - y) * (x - y) / (2 * t)) / std::sqrt(2 * kPi * t); }

double line_integral(const std::function<double(double)>& f) {
  boost::math::quadrature::sinh_sinh<double> q;
  return q.integrate(f, 1e-13);
}

double half_line_integral(const std::function<double(double)>& f) {
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
}

double finite_integral(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

TEST_CASE("kernel kinds") {
  CHECK_THROWS_AS(validate(HermiteFinite{0}), ArgumentError);
  CHECK_THROWS_AS(validate(Bessel{-1.0}), ArgumentError);
  CHECK_NOTHROW(validate(Bessel{-0.5}));
  CHECK(is_limit_kernel(Sine{}));
  CHECK_FALSE(is_limit_kernel(HermiteFinite{3}));
  CHECK(kind_name(HermiteFinite{3}) == "hermite(N=3)");
  CHECK(kind_name(Airy{}) == "airy");
  CHECK_THROWS_AS(kernel_eval(HermiteFinite{2}, {0.0, 1.0}, {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(kernel_eval(Bessel{0}, {0.0, -1.0}, {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(g_plus(HermiteFinite{2}, 1.0, 0.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(g_bar(Sine{}, 0.0, 0.0, 0.0), DomainError);
}

TEST_CASE("equal-time limit kernels") {
  CHECK(kernel_eval(Sine{}, {0.0, 0.4}, {0.0, 0.4}) == doctest::Approx(1 / kPi).epsilon(1e-15));
  CHECK(std::abs(kernel_eval(Sine{}, {1.0, 0.2}, {1.0, 0.2 + kPi})) <= 1e-16);
  CHECK(kernel_eval(Sine{}, {0.0, 0.0}, {0.0, 1.0}) == doctest::Approx(std::sin(1.0) / kPi).epsilon(1e-14));
  for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    const double diag = aip(x) * aip(x) - x * ai(x) * ai(x);
    const double oracle = half_line_integral([&](double u) { return ai(x + u) * ai(x + u); });
    CHECK(std::abs(oracle - diag) <= 1e-10);
    CHECK(std::abs(kernel_eval(Airy{}, {0.0, x}, {0.0, x}) - diag) <= 1e-12);
  }
  for (double x : {-2.0, -0.5, 1.0})
    for (double y : {-1.5, 0.0, 2.0}) {
      if (x == y) continue;
      const double oracle = half_line_integral([&](double u) { return ai(x + u) * ai(y + u); });
      CHECK(std::abs(kernel_eval(Airy{}, {0.5, x}, {0.5, y}) - oracle) <= 1e-9);
    }
  // Bessel: equal-time closed form against the defining integral over [0, 1].
  for (double nu : {0.0, 0.5, 2.0})
    for (auto [x, y] : {std::pair{0.3, 1.7}, std::pair{2.0, 2.5}, std::pair{4.0, 4.0}}) {
      const double oracle = finite_integral(
          [&](double l) {
            return boost::math::cyl_bessel_j(nu, 2 * std::sqrt(l * x)) * boost::math::cyl_bessel_j(nu, 2 * std::sqrt(l * y));
          },
          0.0, 1.0);
      CHECK(std::abs(kernel_eval(Bessel{nu}, {0.0, x}, {0.0, y}) - oracle) <= 1e-10);
    }
}

TEST_CASE("hermite kernel") {
  const double one = kernel_eval(HermiteFinite{1}, {0.5, 0.3}, {1.2, -0.4});
  const double expected = std::pow(2 * 0.5, -0.5) * specfun::hermite_phi(0, 0.3 / std::sqrt(1.0)) *
                          specfun::hermite_phi(0, -0.4 / std::sqrt(2.4));
  CHECK(one == doctest::Approx(expected).epsilon(1e-14));
  CHECK(std::abs(hermite_equal_time(20, 1, 0.3, 0.7) - hermite_equal_time_sum(20, 1, 0.3, 0.7)) <= 1e-10);
  CHECK(std::abs(hermite_equal_time(20, 1, 0.3, 0.7) - forward_oracle(20, 1, 0.3, 1, 0.7)) <= 1e-10);
  for (int n : {1, 7, 20})
    for (double x : {-2.0, 0.1, 3.3}) {
      // Symmetric kernel: the off-diagonal branch straddling x is O(h^2) from the diagonal.
      const double gap = std::abs(hermite_equal_time(n, 1.5, x - 5e-5, x + 5e-5) - hermite_equal_time(n, 1.5, x, x));
      CHECK(gap <= 1e-6);
    }
  const double z = 0.8 / std::sqrt(2 * 1.3);
  CHECK(hermite_equal_time(1, 1.3, 0.8, 0.8) ==
        doctest::Approx(specfun::hermite_phi(0, z) * specfun::hermite_phi(0, z) / std::sqrt(2.6)).epsilon(1e-14));

  double worst = 0.0;
  for (int n : {1, 3, 10})
    for (double x : {-2.0, -0.5, 0.0, 1.0, 2.5})
      for (double y : {-1.5, 0.0, 0.7, 2.0})
        for (auto [tm, tn] : {std::pair{2.0, 1.0}, std::pair{1.5, 0.5}, std::pair{3.0, 2.9}}) {
          const double tail = kernel_eval(HermiteFinite{n}, {tm, x}, {tn, y});
          const double oracle =
              forward_oracle(n, tm, x, tn, y) - std::exp(x * x / (4 * tm) - y * y / (4 * tn)) * heat(tm - tn, x, y);
          worst = std::max(worst, std::abs(tail - oracle));
          CHECK(kernel_eval(HermiteFinite{n}, {tn, y}, {tm, x}) ==
                doctest::Approx(forward_oracle(n, tn, y, tm, x)).epsilon(1e-12));
        }
  CHECK(worst <= 1e-8);
  CHECK_THROWS_AS(kernel_eval(HermiteFinite{2}, {1.0, 0.0}, {1.0 - 1e-14, 0.0}), PrecisionError);
}

TEST_CASE("density profile") {
  for (int n : {1, 20}) {
    const double mass = line_integral([&](double x) { return density_rho_n(n, 1.0, x); });
    CHECK(std::abs(mass - n) <= 1e-6);
  }
  CHECK(density_rho_n(1, 2.0, 0.7) == doctest::Approx(heat(2.0, 0.0, 0.7)).epsilon(1e-14));
  CHECK(density_rho_n(100, 1.0, 25.0) <= 1e-6);
  CHECK(density_rho_n(100, 1.0, -25.0) <= 1e-6);
  CHECK(density_rho_n(100, 1.0, 0.0) >= 0.0);

  CHECK(semicircle(50, 2, 0) == doctest::Approx(std::sqrt(100.0) / (kPi * 2)).epsilon(1e-15));
  CHECK(semicircle(50, 2, 2 * std::sqrt(100.0)) == 0.0);
  CHECK(semicircle(50, 2, 30.0) == 0.0);
  for (double xi : {-0.8, 0.0, 0.6}) {
    const double n = 30, t = 0.7, edge = 2 * std::sqrt(n * t);
    CHECK(semicircle(30, t, edge * xi) * edge / n == doctest::Approx(2 / kPi * std::sqrt(1 - xi * xi)).epsilon(1e-13));
  }
  auto sup_error = [](int n) {
    double worst = 0.0;
    const double edge = 2 * std::sqrt(n);
    for (double xi = -0.9; xi <= 0.9 + 1e-12; xi += 0.01)
      worst = std::max(worst, std::abs(edge / n * density_rho_n(n, 1.0, edge * xi) - 2 / kPi * std::sqrt(1 - xi * xi)));
    return worst;
  };
  const double e50 = sup_error(50), e100 = sup_error(100);
  CHECK(e100 <= 0.05);
  CHECK(e100 < e50);
}

TEST_CASE("edge shift") {
  CHECK(edge_shift(8, 0) == doctest::Approx(8).epsilon(1e-15));
  CHECK(edge_shift(8, 1) == doctest::Approx(11).epsilon(1e-15));
  CHECK(edge_shift(1000, 0) == doctest::Approx(200).epsilon(1e-14));
}

TEST_CASE("bulk scaling limit") {
  std::vector<double> err;
  for (int n : {100, 200, 400}) err.push_back(std::abs(bulk_scaled_kernel(n, 0, 0, 0, 0) - 1 / kPi));
  CHECK(err[2] <= 0.01);
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
  CHECK(std::abs(bulk_scaled_kernel(400, 0, 0, 0, 1) - std::sin(1.0) / kPi) <= 0.01);
  const double forward_oracle_value = finite_integral([](double u) { return std::exp(u * u); }, 0, 1) / kPi;
  CHECK(std::abs(bulk_scaled_kernel(400, 0, 0, 1, 0) - forward_oracle_value) <= 0.02);
  // Translation covariance improves with N.
  auto drift = [](int n) { return std::abs(bulk_scaled_kernel(n, 0, 0.2, 0, 0.9) - bulk_scaled_kernel(n, 0, 1.2, 0, 1.9)); };
  const double d100 = drift(100), d400 = drift(400);
  MESSAGE("translation drift N=100: " << d100 << ", N=400: " << d400);
  CHECK(d400 < d100);
  CHECK_THROWS_AS(bulk_scaled_kernel(101, 0, 0, 0, 0), ArgumentError);
}

TEST_CASE("soft edge scaling limit") {
  const double target = aip(0) * aip(0);
  CHECK(target == doctest::Approx(0.06698748377966397).epsilon(1e-12));
  std::vector<double> err;
  for (int n : {50, 100, 200}) err.push_back(std::abs(edge_scaled_kernel(n, 0, 0, 0, 0) - target));
  CHECK(err[2] <= 0.05);
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
  CHECK(edge_scaled_kernel(200, 0, -8, 0, -8) > edge_scaled_kernel(200, 0, 0, 0, 0));
  // Off-diagonal and two-time values also approach the Airy kernel.
  const double two_time = kernel_eval(Airy{}, {0.0, 0.3}, {0.5, -0.2});
  CHECK(std::abs(edge_scaled_kernel(200, 0, 0.3, 0.5, -0.2) - two_time) < 0.05);
}

TEST_CASE("closed-form heat kernels") {
  CHECK(delta_t(Sine{}, 0.25, 0, 0) == doctest::Approx(0.5641895835).epsilon(1e-9));
  for (double t : {0.25, 0.5})
    for (auto [x, y] : {std::pair{0.0, 0.3}, std::pair{-1.0, 0.5}, std::pair{1.5, 1.2}}) {
      const double airy = finite_integral(
          [&](double l) { return std::exp(-l * t) * ai(x - l) * ai(y - l); }, 0.0, 60.0 / t);
      const double airy_tail = half_line_integral([&](double u) {
        const double a = ai(x + u);
        return a == 0.0 ? 0.0 : std::exp(u * t) * a * ai(y + u);
      });
      CHECK(std::abs(delta_t(Airy{}, t, x, y) - (airy + airy_tail)) <= 1e-7);

      const double sine = finite_integral([&](double u) { return std::exp(-u * u * t) * std::cos(u * (x - y)); }, 0, 40) / kPi;
      CHECK(std::abs(delta_t(Sine{}, t, x, y) - sine) <= 1e-12);

      const auto px = phi_oracle(200, x / 2.0L), py = phi_oracle(200, y / 2.0L);
      long double herm = 0;
      for (int k = 0; k < 200; ++k) herm += px[k] * py[k] * std::exp(-k * t / 2.0L);
      CHECK(std::abs(delta_t(HermiteFinite{3}, t, x, y) - static_cast<double>(herm / 2)) <= 1e-12);

      const double bx = std::abs(x) + 0.2, by = std::abs(y) + 0.4;
      const double weber =
          std::sqrt(bx * by) * half_line_integral([&](double k) {
            return std::exp(-k * k * t) * boost::math::cyl_bessel_j(0.5, k * bx) * boost::math::cyl_bessel_j(0.5, k * by) * k;
          });
      CHECK(std::abs(delta_t(Bessel{0.5}, t, bx, by) - weber) <= 1e-7);
    }
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double t = u(rng) / 3, x = u(rng), y = u(rng);
    for (const KernelKind& k : {KernelKind{Sine{}}, KernelKind{Airy{}}, KernelKind{Bessel{1.3}}, KernelKind{HermiteFinite{1}}})
      CHECK(delta_t(k, t, x, y) == doctest::Approx(delta_t(k, t, y, x)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(delta_t(Bessel{0}, 1.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(delta_t(Sine{}, 0.0, 0.0, 1.0), DomainError);
}

TEST_CASE("fourth moment diagnostic") {
  for (double t : {1.0, 0.5, 0.25, 0.125}) CHECK(std::abs(bound1_diagnostic(Sine{}, t, 0.3) - 12 * t * t) <= 1e-9);
  // Airy: the tilted Gaussian gives the exact value e^{t^3/3}(12 t^2 + 12 t^5 + t^8) at x = 0.
  for (double t : {1.0, 0.5, 0.25, 0.125}) {
    const double exact = std::exp(t * t * t / 3) * (12 * t * t + 12 * std::pow(t, 5) + std::pow(t, 8));
    CHECK(bound1_diagnostic(Airy{}, t, 0.0) == doctest::Approx(exact).epsilon(1e-9));
  }
  std::vector<double> ratios;
  for (double t : {1.0, 0.5, 0.25, 0.125}) ratios.push_back(bound1_diagnostic(HermiteFinite{1}, t, 0.0) / (t * t));
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo < 1.2);
  CHECK(bound1_diagnostic(Bessel{0.5}, 0.25, 2.0) > 0.0);
  CHECK_THROWS_AS(bound1_diagnostic(Sine{}, 1.5, 0.0), DomainError);
}

TEST_CASE("spectral identities") {
  const double t = 0.4;
  for (const KernelKind& kind : {KernelKind{Sine{}}, KernelKind{Airy{}}}) {
    for (auto [x, z] : {std::pair{0.3, 0.3}, std::pair{-0.5, 0.8}}) {
      const double lhs = line_integral([&](double y) {
        const double d = delta_t(kind, t, x, y);
        return d < 1e-300 ? 0.0 : d * g_plus(kind, t, y, z);
      });
      CHECK(std::abs(lhs - kernel_eval(kind, {0.0, x}, {0.0, z})) <= 1e-6);
    }
  }
  for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{-1.0, 0.7}, std::pair{1.2, 2.0}}) {
    const double rhs = g_plus(Airy{}, -0.3, x, y) - delta_t(Airy{}, 0.3, x, y);
    CHECK(std::abs(g_bar(Airy{}, 0.3, x, y) - rhs) <= 1e-7);
  }
  CHECK(spectral_rho(Sine{}, 12.0) == doctest::Approx(1 / kPi).epsilon(1e-15));
  CHECK(spectral_rho(Airy{}, 0.0) == doctest::Approx(aip(0) * aip(0)).epsilon(1e-12));
  CHECK(spectral_rho(Bessel{1}, 2.0) == doctest::Approx(kernel_eval(Bessel{1}, {0, 2.0}, {0, 2.0})).epsilon(1e-12));
  CHECK_THROWS_AS(spectral_rho(HermiteFinite{2}, 0.0), ArgumentError);
}

TEST_CASE("palm kernel") {
  for (const KernelKind& kind : {KernelKind{Sine{}}, KernelKind{Airy{}}, KernelKind{Bessel{0.5}}, KernelKind{HermiteFinite{4}}}) {
    CHECK(std::abs(palm_kernel(kind, 1.1, 1.1, 0.4)) <= 1e-14);
    CHECK(std::abs(palm_kernel(kind, 1.1, 0.4, 1.1)) <= 1e-14);
  }
  const double k = palm_kernel(Sine{}, 0.0, 1.0, 2.0);
  const double s = [](double d) { return d == 0 ? 1 / kPi : std::sin(d) / (kPi * d); }(1.0);
  CHECK(k == doctest::Approx(s - kPi * std::sin(1.0) / kPi * std::sin(2.0) / (2 * kPi)).epsilon(1e-13));
  CHECK_THROWS_AS(palm_kernel(Airy{}, 200.0, 0.0, 0.0), DivisionError);
}

TEST_CASE("continuity in positions at distinct times") {
  const double h = 1e-6;
  for (const KernelKind& kind : {KernelKind{Sine{}}, KernelKind{Airy{}}, KernelKind{Bessel{0.0}}, KernelKind{HermiteFinite{5}}})
    for (auto [ta, tb] : {std::pair{0.5, 1.0}, std::pair{1.0, 0.5}}) {
      const double base = kernel_eval(kind, {ta, 1.0}, {tb, 1.5});
      CHECK(std::abs(kernel_eval(kind, {ta, 1.0 + h}, {tb, 1.5}) - base) <= 1e-4);
      CHECK(std::abs(kernel_eval(kind, {ta, 1.0}, {tb, 1.5 + h}) - base) <= 1e-4);
    }
}
