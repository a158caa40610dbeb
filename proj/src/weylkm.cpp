#include "dpk/weylkm.hpp"

#include "dpk/error.hpp"
#include "dpk/linalg.hpp"
#include "dpk/mcsim.hpp"
#include "dpk/quadrature.hpp"
#include "dpk/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace dpk::weylkm {

namespace {

constexpr double kPi = std::numbers::pi;

double log_gue_constant(int n) {
  double out = 0.5 * n * std::log(2.0 * kPi);
  for (int j = 1; j <= n; ++j) out += std::lgamma(double(j));
  return out;
}

void enumerate_partitions(int length, int max_part, std::vector<int>& current,
                          std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == length) {
    out.push_back(current);
    return;
  }
  const int cap = current.empty() ? max_part : current.back();
  for (int part = 0; part <= cap; ++part) {
    current.push_back(part);
    enumerate_partitions(length, max_part, current, out);
    current.pop_back();
  }
}

// det[x_j^{lambda_k}]
double alternant(const Eigen::Ref<const Points>& x, const std::vector<int>& lambda) {
  const auto n = x.size();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) m(j, k) = std::pow(x[j], lambda[k]);
  return linalg::det(m);
}

}  // namespace

double vandermonde(const Eigen::Ref<const Points>& x) {
  double out = 1.0;
  for (Eigen::Index j = 0; j < x.size(); ++j)
    for (Eigen::Index k = j + 1; k < x.size(); ++k) out *= x[k] - x[j];
  return out;
}

double km_density(double t, const Eigen::Ref<const Points>& y, const Eigen::Ref<const Points>& x) {
  if (x.size() != y.size() || x.size() == 0)
    throw ArgumentError("km_density: x and y must have the same positive length");
  if (!(t > 0.0)) throw DomainError("km_density: time must be positive");
  const auto n = x.size();
  if (n == 1) return specfun::heat_kernel(t, y[0], x[0]);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) m(j, k) = specfun::heat_kernel(t, y[j], x[k]);
  return linalg::det(m);
}

double integrate_weyl(int n, const WeylIntegrand& f, const WeylQuadrature& q) {
  if (n < 1 || n > 3) throw UnsupportedSizeError("integrate_weyl: quadrature over W_N supports N <= 3");
  const quad::Options outer{q.abs_tol, 0.0, 2000};
  const quad::Options inner{q.abs_tol * 0.05, 0.0, 2000};
  const quad::Options innermost{q.abs_tol * 0.0025, 0.0, 2000};
  std::array<double, 3> y{};
  const std::span<const double> view(y.data(), static_cast<std::size_t>(n));

  auto base = [&](const quad::Options& opts, auto&& gaps) {
    return quad::integrate_line(
               [&](double y1) {
                 y[0] = y1;
                 gaps(y1);
                 return f(view);
               },
               q.center, q.scale, opts)
        .value;
  };

  if (n == 1) return base(outer, [](double) {});
  if (n == 2) {
    return quad::integrate_to_infinity(
               [&](double g) { return base(inner, [&](double y1) { y[1] = y1 + g; }); }, 0.0, q.gap_scale, outer)
        .value;
  }
  return quad::integrate_to_infinity(
             [&](double g1) {
               return quad::integrate_to_infinity(
                          [&](double g2) {
                            return base(innermost, [&](double y1) {
                              y[1] = y1 + g1;
                              y[2] = y1 + g1 + g2;
                            });
                          },
                          0.0, q.gap_scale, inner)
                   .value;
             },
             0.0, q.gap_scale, outer)
      .value;
}

SurvivalEstimate survival(double t, const Configuration& x, const SurvivalOptions& opts) {
  if (!(t > 0.0)) throw DomainError("survival: time must be positive");
  const int n = x.size();
  if (n == 1) return {1.0, 0.0};
  if (opts.method == SurvivalMethod::montecarlo) {
    const auto mc = mcsim::survival_mc(t, x, opts.dt, opts.paths, opts.seed);
    return {mc.estimate, mc.std_error};
  }
  if (n > 3) throw UnsupportedSizeError("survival: quadrature supports N <= 3; use the Monte Carlo method");
  const Points xs = x.points();
  WeylQuadrature q;
  q.center = xs[0];
  q.scale = std::sqrt(t);
  q.gap_scale = std::sqrt(t) + (xs[n - 1] - xs[0]) / (n - 1);
  q.abs_tol = opts.abs_tol;
  const double value = integrate_weyl(
      n, [&](std::span<const double> y) { return km_density(t, Eigen::Map<const Points>(y.data(), n), xs); }, q);
  return {std::clamp(value, std::numeric_limits<double>::min(), 1.0), 0.0};
}

double noncolliding_transition(double dt, const Configuration& y, const Configuration& x) {
  if (x.size() != y.size()) throw ArgumentError("noncolliding_transition: size mismatch");
  const double hx = vandermonde(x.points());
  if (hx == 0.0)
    throw DomainError(
        "noncolliding_transition: h_N(x) = 0 (boundary start); the entrance law from such a state is gue_density");
  return vandermonde(y.points()) * km_density(dt, y.points(), x.points()) / hx;
}

double finite_t_transition(double horizon, double t0, double t, const Configuration& y, const Configuration& x,
                           const SurvivalOptions& opts) {
  if (!(0.0 < t0 && t0 <= t && t < horizon))
    throw ArgumentError("finite_t_transition: requires 0 < t0 <= t < T");
  if (x.size() != y.size()) throw ArgumentError("finite_t_transition: size mismatch");
  const double f = km_density(t - t0, y.points(), x.points());
  if (x.size() == 1) return f;
  return survival(horizon - t, y, opts).probability * f / survival(horizon - t0, x, opts).probability;
}

SchurCheck schur_expansion_check(const Eigen::Ref<const Points>& x, const Eigen::Ref<const Points>& y,
                                 int max_part) {
  const int n = static_cast<int>(x.size());
  if (y.size() != n || n == 0) throw ArgumentError("schur_expansion_check: x and y must have the same positive length");
  if (n > 4 || max_part > 12) throw UnsupportedSizeError("schur_expansion_check: supports N <= 4 and mu_1 <= 12");
  if (max_part < 0) throw ArgumentError("schur_expansion_check: max_part must be nonnegative");

  SchurCheck out;
  Eigen::MatrixXd e(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) e(j, k) = std::exp(x[j] * y[k]);
  out.lhs = linalg::det(e);

  std::vector<int> delta(n);
  for (int k = 0; k < n; ++k) delta[k] = n - 1 - k;
  const double ax = alternant(x, delta), ay = alternant(y, delta);
  const double hx = vandermonde(x), hy = vandermonde(y);

  std::vector<std::vector<int>> partitions;
  std::vector<int> scratch;
  enumerate_partitions(n, max_part, scratch, partitions);
  out.partitions = static_cast<int>(partitions.size());

  double sum = 0.0;
  if (hx != 0.0 && hy != 0.0) {
    for (const auto& mu : partitions) {
      std::vector<int> lambda(n);
      double log_denominator = 0.0;
      for (int k = 0; k < n; ++k) {
        lambda[k] = mu[k] + delta[k];
        log_denominator += std::lgamma(lambda[k] + 1.0);
      }
      const double sx = alternant(x, lambda) / ax;
      const double sy = alternant(y, lambda) / ay;
      sum += sx * sy * std::exp(-log_denominator);
    }
  }
  out.rhs = hx * hy * sum;

  const double xy = std::max(x.cwiseAbs().maxCoeff() * y.cwiseAbs().maxCoeff(), 1e-300);
  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;
  const int first_omitted = max_part + n;
  double tail = 0.0;
  double term = std::exp(first_omitted * std::log(xy) - std::lgamma(first_omitted + 1.0));
  for (int m = first_omitted; m < first_omitted + 400 && term > 1e-300; ++m) {
    tail += term;
    term *= xy / (m + 1);
  }
  out.remainder_bound = factorial * factorial * std::exp((n - 1) * xy) * tail;
  return out;
}

double gue_constant(int n) { return std::exp(log_gue_constant(n)); }

double gue_constant_prime(int n) {
  double out = 0.5 * n * std::log(2.0);
  for (int j = 1; j <= n; ++j) out += std::lgamma(0.5 * j);
  return std::exp(out);
}

double gue_density(const GueParams& params, const Eigen::Ref<const Points>& x) {
  if (params.n < 1 || x.size() != params.n) throw ArgumentError("gue_density: configuration size must equal N");
  if (!(params.variance > 0.0)) throw DomainError("gue_density: variance must be positive");
  const double h = vandermonde(x);
  if (h == 0.0) return 0.0;
  const double t0 = params.variance;
  const double n = params.n;
  const double log_value = -log_gue_constant(params.n) - 0.5 * n * n * std::log(t0) - x.squaredNorm() / (2.0 * t0) +
                           2.0 * std::log(std::abs(h));
  return std::exp(log_value);
}

SelbergCheck selberg_check(int n, double t, double abs_tol) {
  if (n < 1) throw ArgumentError("selberg_check: N must be positive");
  if (n > 3) throw UnsupportedSizeError("selberg_check: quadrature supports N <= 3");
  if (!(t > 0.0)) throw DomainError("selberg_check: t must be positive");
  WeylQuadrature q;
  q.center = -std::sqrt(t) * (n - 1);
  q.scale = std::sqrt(t);
  q.gap_scale = std::sqrt(t);
  q.abs_tol = abs_tol;
  SelbergCheck out;
  auto weight = [&](std::span<const double> y) {
    const Eigen::Map<const Points> v(y.data(), n);
    return std::exp(-v.squaredNorm() / (2.0 * t)) * vandermonde(v);
  };
  // Tolerances are relative to the reference magnitudes, which grow like t^{N^2/2}.
  out.ref1 = gue_constant_prime(n) * std::pow(t, n * (n + 1) / 4.0);
  out.ref2 = gue_constant(n) * std::pow(t, n * n / 2.0);
  q.abs_tol = abs_tol * out.ref1;
  out.i1 = integrate_weyl(n, weight, q);
  q.abs_tol = abs_tol * out.ref2;
  out.i2 = integrate_weyl(
      n,
      [&](std::span<const double> y) {
        const Eigen::Map<const Points> v(y.data(), n);
        const double h = vandermonde(v);
        return std::exp(-v.squaredNorm() / (2.0 * t)) * h * h;
      },
      q);
  return out;
}

AbsorbedDensity abs_bm_1d(double t, double y, double x) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("abs_bm_1d: x and y must be positive");
  if (!(t > 0.0)) throw DomainError("abs_bm_1d: time must be positive");
  // p(t,y|x) - p(t,y|-x) = p(t,y|x) (1 - e^{-2xy/t}), written to keep accuracy as y -> 0.
  const double p_abs = specfun::heat_kernel(t, y, x) * -std::expm1(-2.0 * x * y / t);
  return {p_abs, y / x * p_abs};
}

}  // namespace dpk::weylkm
