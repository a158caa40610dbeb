#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

namespace dpk::quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (G7/K15) integration of f over the finite interval [a, b].
template <class F>
Result integrate(F&& f, double a, double b, const Options& opts = {}) {
  if (a == b) return {};
  const double sign = a < b ? 1.0 : -1.0;
  if (a > b) std::swap(a, b);

  std::priority_queue<detail::Segment> heap;
  heap.push(detail::gauss_kronrod_15(f, a, b));
  double total = heap.top().value;
  double error = heap.top().error;
  long evals = 15;
  int intervals = 1;

  while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
         intervals < opts.max_intervals) {
    const detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    evals += 30;
    ++intervals;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift accumulated by incremental updates.
  total = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {sign * total, error, evals};
}

// Integral over [a, +inf) via x = a + scale * u / (1 - u).
template <class F>
Result integrate_to_infinity(F&& f, double a, double scale = 1.0, const Options& opts = {}) {
  auto mapped = [&](double u) {
    if (u >= 1.0) return 0.0;
    const double w = 1.0 - u;
    const double value = f(a + scale * u / w);
    return value == 0.0 ? 0.0 : value * scale / (w * w);
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

// Integral over (-inf, +inf) via x = center + scale * u / (1 - u^2).
template <class F>
Result integrate_line(F&& f, double center = 0.0, double scale = 1.0, const Options& opts = {}) {
  auto mapped = [&](double u) {
    const double w = 1.0 - u * u;
    if (w <= 0.0) return 0.0;
    const double value = f(center + scale * u / w);
    return value == 0.0 ? 0.0 : value * scale * (1.0 + u * u) / (w * w);
  };
  return integrate(mapped, -1.0, 1.0, opts);
}

// Integral over [a, b) split into consecutive panels of the given width; suited to long
// oscillatory ranges where one adaptive pass would exhaust its interval budget.
template <class F>
Result integrate_panels(F&& f, double a, double b, double width, const Options& opts = {}) {
  Result out;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
  Options local = opts;
  local.abs_tol = opts.abs_tol / panels;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + (b - a) * k / panels;
    const double hi = a + (b - a) * (k + 1) / panels;
    const Result r = integrate(f, lo, hi, local);
    out.value += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
  }
  return out;
}

struct Rule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// n-point Gauss-Legendre rule mapped to [a, b]; nodes by Newton iteration on P_n.
Rule gauss_legendre(int n, double a, double b);

}  // namespace dpk::quad
