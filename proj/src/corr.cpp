#include "dpk/corr.hpp"

#include "dpk/error.hpp"
#include "dpk/linalg.hpp"
#include "dpk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

namespace dpk::corr {

namespace {

void require_increasing(const std::vector<double>& times, const char* op) {
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ArgumentError(std::string(op) + ": times must be strictly increasing");
}

// All subsets of {0, ..., n-1} of the given size, in lexicographic order.
std::vector<std::vector<int>> subsets(int n, int size) {
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) != size) continue;
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) s.push_back(i);
    out.push_back(std::move(s));
  }
  return out;
}

Eigen::MatrixXd remove(const Eigen::MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Eigen::MatrixXd out(m.rows() - static_cast<Eigen::Index>(rows.size()), m.cols() - static_cast<Eigen::Index>(cols.size()));
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (std::find(rows.begin(), rows.end(), i) != rows.end()) continue;
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::find(cols.begin(), cols.end(), j) != cols.end()) continue;
      out(r, c++) = m(i, j);
    }
    ++r;
  }
  return out;
}

}  // namespace

CorrelationRequest::CorrelationRequest(KernelKind kind, std::vector<Block> blocks)
    : kind_(kind), blocks_(std::move(blocks)) {
  kernels::validate(kind_);
  if (blocks_.empty()) throw ArgumentError("CorrelationRequest: at least one block is required");
  const auto* hermite = std::get_if<kernels::HermiteFinite>(&kind_);
  for (std::size_t m = 0; m < blocks_.size(); ++m) {
    const auto& block = blocks_[m];
    if (block.points.empty()) throw ArgumentError("CorrelationRequest: every block must be nonempty");
    if (m > 0 && !(block.time > blocks_[m - 1].time))
      throw ArgumentError("CorrelationRequest: block times must be strictly increasing");
    if (hermite) {
      if (!(block.time > 0.0)) throw ArgumentError("CorrelationRequest: HermiteFinite times must be positive");
      if (static_cast<int>(block.points.size()) > hermite->n)
        throw ArgumentError("CorrelationRequest: a HermiteFinite block holds at most N points");
    }
  }
}

int CorrelationRequest::total_points() const {
  int total = 0;
  for (const auto& b : blocks_) total += static_cast<int>(b.points.size());
  return total;
}

Eigen::MatrixXd correlation_matrix(const CorrelationRequest& request) {
  std::vector<kernels::SpaceTimePoint> pts;
  for (const auto& b : request.blocks())
    for (double x : b.points) pts.push_back({b.time, x});
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = kernels::kernel_eval(request.kind(), pts[i], pts[j]);
  return m;
}

double multitime_correlation(const CorrelationRequest& request) {
  const double value = linalg::log_det(correlation_matrix(request)).value();
  if (value >= 0.0) return value;
  if (value > -1e-10) return 0.0;
  throw NumericalConsistencyError("multitime_correlation: determinant " + std::to_string(value) +
                                  " is negative beyond rounding");
}

StepFunction::StepFunction(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  std::sort(intervals_.begin(), intervals_.end(), [](const Interval& l, const Interval& r) { return l.a < r.a; });
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& iv = intervals_[i];
    if (!(iv.a < iv.b) || !std::isfinite(iv.a) || !std::isfinite(iv.b))
      throw ArgumentError("StepFunction: each interval needs finite a < b");
    if (i > 0 && iv.a < intervals_[i - 1].b) throw ArgumentError("StepFunction: intervals must be disjoint");
  }
}

double StepFunction::operator()(double x) const {
  for (const auto& iv : intervals_)
    if (x >= iv.a && x < iv.b) return iv.value;
  return 0.0;
}

bool StepFunction::is_zero() const {
  return std::all_of(intervals_.begin(), intervals_.end(), [](const Interval& iv) { return iv.value == 0.0; });
}

StepFunction StepFunction::scaled(double factor) const {
  auto copy = intervals_;
  for (auto& iv : copy) iv.value *= factor;
  return StepFunction(std::move(copy));
}

QuadratureGrid QuadratureGrid::gauss_legendre(const std::vector<StepFunction>& chis, int per_interval) {
  if (per_interval < 1) throw ArgumentError("QuadratureGrid: need at least one node per interval");
  QuadratureGrid grid;
  for (const auto& chi : chis) {
    std::vector<double> nodes, weights;
    for (const auto& iv : chi.intervals()) {
      const auto rule = quad::gauss_legendre(per_interval, iv.a, iv.b);
      nodes.insert(nodes.end(), rule.nodes.begin(), rule.nodes.end());
      weights.insert(weights.end(), rule.weights.begin(), rule.weights.end());
    }
    grid.nodes.push_back(Eigen::Map<Eigen::VectorXd>(nodes.data(), static_cast<Eigen::Index>(nodes.size())));
    grid.weights.push_back(Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size())));
  }
  return grid;
}

double fredholm_generating(const KernelKind& kind, const std::vector<double>& times,
                           const std::vector<StepFunction>& chis, const QuadratureGrid& grid, Discretization mode) {
  kernels::validate(kind);
  if (times.size() != chis.size() || times.empty())
    throw ArgumentError("fredholm_generating: need one step function per time");
  require_increasing(times, "fredholm_generating");
  if (grid.nodes.size() != times.size() || grid.weights.size() != times.size())
    throw ArgumentError("fredholm_generating: grid must provide one node set per time slice");

  struct Node {
    double time, x, w, chi;
  };
  std::vector<Node> active;
  for (std::size_t m = 0; m < times.size(); ++m) {
    const auto& nodes = grid.nodes[m];
    const auto& weights = grid.weights[m];
    if (nodes.size() != weights.size()) throw ArgumentError("fredholm_generating: node and weight counts differ");
    if ((weights.array() <= 0.0).any()) throw ArgumentError("fredholm_generating: weights must be positive");
    for (const auto& iv : chis[m].intervals()) {
      if (iv.value == 0.0) continue;
      double covered = 0.0;
      for (Eigen::Index i = 0; i < nodes.size(); ++i)
        if (nodes[i] >= iv.a && nodes[i] <= iv.b) covered += weights[i];
      if (std::abs(covered - (iv.b - iv.a)) > 1e-9 * (iv.b - iv.a))
        throw ArgumentError("fredholm_generating: grid does not cover the support of chi");
    }
    for (Eigen::Index i = 0; i < nodes.size(); ++i) {
      const double c = chis[m](nodes[i]);
      if (c != 0.0) active.push_back({times[m], nodes[i], weights[i], c});
    }
  }
  if (active.empty()) return 1.0;

  const auto n = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = 0; q < n; ++q) {
      const double k = kernels::kernel_eval(kind, {active[p].time, active[p].x}, {active[q].time, active[q].x});
      const double weight = mode == Discretization::symmetric ? std::sqrt(active[p].w * active[q].w) : active[q].w;
      a(p, q) += k * active[q].chi * weight;
    }
  return linalg::log_det(a).value();
}

double gap_probability(const KernelKind& kind, double time, double a, double b, const QuadratureGrid& grid) {
  if (a > b) throw ArgumentError("gap_probability: requires a <= b");
  if (a == b) return 1.0;
  const std::vector<StepFunction> chi{StepFunction({{a, b, -1.0}})};
  const double value = fredholm_generating(kind, {time}, chi, grid);
  if (value < -1e-8 || value > 1.0 + 1e-8)
    throw PrecisionError("gap_probability: discretized determinant left [0, 1]", value);
  return std::clamp(value, 0.0, 1.0);
}

double gap_probability(const KernelKind& kind, double time, double a, double b, int nodes) {
  if (a > b) throw ArgumentError("gap_probability: requires a <= b");
  if (a == b) return 1.0;
  const std::vector<StepFunction> chi{StepFunction({{a, b, -1.0}})};
  return gap_probability(kind, time, a, b, QuadratureGrid::gauss_legendre(chi, nodes));
}

ExpansionCheck two_time_expansion_check(const KernelKind& kind, double t, const std::vector<double>& x_points,
                                        const std::vector<double>& y_points) {
  if (!std::holds_alternative<kernels::Sine>(kind) && !std::holds_alternative<kernels::Airy>(kind))
    throw ArgumentError("two_time_expansion_check: supported for the Sine and Airy kinds");
  if (!(t > 0.0)) throw DomainError("two_time_expansion_check: t must be positive");
  const int m = static_cast<int>(x_points.size()), n = static_cast<int>(y_points.size());
  if (m > 2 || n > 2) throw UnsupportedSizeError("two_time_expansion_check: at most two points per time");
  if (m + n == 0) return {1.0, 1.0};

  Eigen::MatrixXd mbar(m + n, m + n), mm(m + n, m + n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j)
      mbar(i, j) = mm(i, j) = kernels::kernel_eval(kind, {0.0, x_points[i]}, {0.0, x_points[j]});
    for (int j = 0; j < n; ++j)
      mbar(i, m + j) = mm(i, m + j) = kernels::kernel_eval(kind, {0.0, x_points[i]}, {t, y_points[j]});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      mbar(m + i, j) = kernels::kernel_eval(kind, {t, y_points[i]}, {0.0, x_points[j]});
      mm(m + i, j) = kernels::g_plus(kind, -t, y_points[i], x_points[j]);
    }
    for (int j = 0; j < n; ++j)
      mbar(m + i, m + j) = mm(m + i, m + j) = kernels::kernel_eval(kind, {t, y_points[i]}, {t, y_points[j]});
  }
  Eigen::MatrixXd d(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = kernels::delta_t(kind, t, x_points[i], y_points[j]);

  ExpansionCheck out;
  out.direct = linalg::det(mbar);
  out.expanded = linalg::det(mm);
  for (int l = 1; l <= std::min(m, n); ++l)
    for (const auto& a : subsets(m, l))
      for (const auto& b : subsets(n, l)) {
        int exponent = l;
        std::vector<int> rows, cols;
        for (int i = 0; i < l; ++i) {
          exponent += (a[i] + 1) + m + (b[i] + 1);
          rows.push_back(m + b[i]);
          cols.push_back(a[i]);
        }
        Eigen::MatrixXd dab(l, l);
        for (int i = 0; i < l; ++i)
          for (int j = 0; j < l; ++j) dab(i, j) = d(a[i], b[j]);
        const double sign = exponent % 2 == 0 ? 1.0 : -1.0;
        out.expanded += sign * linalg::det(dab) * linalg::det(remove(mm, rows, cols));
      }
  return out;
}

HeineCheck heine_identity(const std::vector<RealFunction>& g, const std::vector<RealFunction>& gbar,
                          double abs_tol) {
  const int n = static_cast<int>(g.size());
  if (n < 1 || static_cast<int>(gbar.size()) != n)
    throw ArgumentError("heine_identity: families must have the same positive size");
  if (n > 3) throw UnsupportedSizeError("heine_identity: N-fold quadrature supports N <= 3");

  const quad::Options opts{abs_tol * 0.01, 0.0, 4000};
  Eigen::MatrixXd gram(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      gram(j, k) = quad::integrate_line([&](double x) { return g[j](x) * gbar[k](x); }, 0.0, 1.0, opts).value;

  HeineCheck out;
  out.rhs = linalg::det(gram);

  // The integrand is symmetric and vanishes on the diagonals, so (1/N!) times the integral
  // over R^N equals the sum over strictly increasing node tuples of a tensor rule.
  auto tensor_lhs = [&](int m) {
    const auto rule = quad::gauss_legendre(m, -1.0, 1.0);
    Eigen::MatrixXd gv(n, m), bv(n, m);
    Eigen::VectorXd w(m);
    for (int i = 0; i < m; ++i) {
      const double u = rule.nodes[i], den = 1.0 - u * u;
      const double x = u / den;
      w[i] = rule.weights[i] * (1.0 + u * u) / (den * den);
      for (int j = 0; j < n; ++j) {
        gv(j, i) = g[j](x);
        bv(j, i) = gbar[j](x);
      }
    }
    double sum = 0.0;
    if (n == 1) return (w.array() * gv.row(0).transpose().array() * bv.row(0).transpose().array()).sum();
    Eigen::MatrixXd a(n, n), b(n, n);
    for (int i = 0; i < m; ++i)
      for (int k = i + 1; k < m; ++k) {
        if (n == 2) {
          a << gv.col(i), gv.col(k);
          b << bv.col(i), bv.col(k);
          sum += w[i] * w[k] * linalg::det_cofactor(a) * linalg::det_cofactor(b);
          continue;
        }
        for (int l = k + 1; l < m; ++l) {
          a << gv.col(i), gv.col(k), gv.col(l);
          b << bv.col(i), bv.col(k), bv.col(l);
          sum += w[i] * w[k] * w[l] * linalg::det_cofactor(a) * linalg::det_cofactor(b);
        }
      }
    return sum;
  };
  double previous = tensor_lhs(32);
  for (int m = 64;; m *= 2) {
    out.lhs = tensor_lhs(m);
    if (std::abs(out.lhs - previous) <= abs_tol) break;
    if (m >= 512) throw PrecisionError("heine_identity: tensor rule did not settle", std::abs(out.lhs - previous));
    previous = out.lhs;
  }
  return out;
}

}  // namespace dpk::corr
