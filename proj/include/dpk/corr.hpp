#pragma once

#include "dpk/kernels.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace dpk::corr {

using kernels::KernelKind;

struct Block {
  double time = 0.0;
  std::vector<double> points;
};

/// Ordered (time, points) blocks for a multitime correlation function.
class CorrelationRequest {
 public:
  /// Throws ArgumentError unless block times strictly increase, every block is nonempty,
  /// and (for HermiteFinite) times are positive and each block holds at most N points.
  CorrelationRequest(KernelKind kind, std::vector<Block> blocks);

  const KernelKind& kind() const { return kind_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  int total_points() const;

 private:
  KernelKind kind_;
  std::vector<Block> blocks_;
};

/// Block matrix [K(t_m, x_j^{(m)}; t_n, x_k^{(n)})].
Eigen::MatrixXd correlation_matrix(const CorrelationRequest& request);

/// Determinant of correlation_matrix; values in (-1e-10, 0) clamp to 0, anything more
/// negative raises NumericalConsistencyError.
double multitime_correlation(const CorrelationRequest& request);

struct Interval {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
};

/// Piecewise-constant test function with finite support.
class StepFunction {
 public:
  StepFunction() = default;
  /// Intervals must satisfy a < b and be pairwise disjoint (touching endpoints allowed).
  explicit StepFunction(std::vector<Interval> intervals);

  const std::vector<Interval>& intervals() const { return intervals_; }
  double operator()(double x) const;
  bool is_zero() const;
  StepFunction scaled(double factor) const;

 private:
  std::vector<Interval> intervals_;
};

/// Quadrature nodes and weights, one set per time slice.
struct QuadratureGrid {
  std::vector<Eigen::VectorXd> nodes;
  std::vector<Eigen::VectorXd> weights;

  /// Gauss-Legendre rule with `per_interval` nodes on every interval of every step function.
  static QuadratureGrid gauss_legendre(const std::vector<StepFunction>& chis, int per_interval = 64);
};

enum class Discretization { symmetric, nystrom };

/// det(I + K chi) for the multitime operator, discretized on the grid. Symmetric mode
/// splits the weights as W^{1/2} K chi W^{1/2}; nystrom uses K chi W.
double fredholm_generating(const KernelKind& kind, const std::vector<double>& times,
                           const std::vector<StepFunction>& chis, const QuadratureGrid& grid,
                           Discretization mode = Discretization::symmetric);

/// Probability of no particle in [a, b] at one time: the generating function at chi = -1 on [a, b].
double gap_probability(const KernelKind& kind, double time, double a, double b, const QuadratureGrid& grid);
double gap_probability(const KernelKind& kind, double time, double a, double b, int nodes = 64);

struct ExpansionCheck {
  double direct = 0.0;
  double expanded = 0.0;
};

/// Two-time correlation rho(0, x; t, y) computed as det M-bar and through the expansion
/// det M + sum of signed minors of D = [delta_t(x_i, y_j)] and M. Sine and Airy kinds,
/// at most two points per time.
ExpansionCheck two_time_expansion_check(const KernelKind& kind, double t, const std::vector<double>& x_points,
                                        const std::vector<double>& y_points);

struct HeineCheck {
  double lhs = 0.0;  // (1/N!) N-fold integral of det[g_j(x_k)] det[gbar_j(x_k)]
  double rhs = 0.0;  // det of the one-dimensional Gram integrals
};

using RealFunction = std::function<double(double)>;

/// Heine identity on R for N <= 3 square-integrable families.
HeineCheck heine_identity(const std::vector<RealFunction>& g, const std::vector<RealFunction>& gbar,
                          double abs_tol = 1e-11);

}  // namespace dpk::corr
