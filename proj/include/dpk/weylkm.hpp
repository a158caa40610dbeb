#pragma once

#include "dpk/types.hpp"

#include <cstdint>
#include <functional>
#include <span>

namespace dpk::weylkm {

/// Product of differences prod_{j<k} (x_k - x_j).
double vandermonde(const Eigen::Ref<const Points>& x);

/// Karlin-McGregor density f_N(t, y | x) = det[p(t, y_j | x_k)].
/// Takes raw sequences: entries need not be ordered, only equally sized.
double km_density(double t, const Eigen::Ref<const Points>& y, const Eigen::Ref<const Points>& x);

/// Integration domain helper for W_N, N <= 3: coordinates are rewritten as a base
/// point plus nonnegative gaps and integrated by nested adaptive Gauss-Kronrod.
struct WeylQuadrature {
  double center = 0.0;  // typical location of the lowest coordinate
  double scale = 1.0;   // spread of the lowest coordinate
  double gap_scale = 1.0;
  double abs_tol = 1e-10;
};

using WeylIntegrand = std::function<double(std::span<const double>)>;

double integrate_weyl(int n, const WeylIntegrand& f, const WeylQuadrature& q = {});

enum class SurvivalMethod { quadrature, montecarlo };

struct SurvivalOptions {
  SurvivalMethod method = SurvivalMethod::quadrature;
  double abs_tol = 1e-10;
  // Monte Carlo settings, forwarded to mcsim::survival_mc.
  double dt = 1e-3;
  std::size_t paths = 100000;
  std::uint64_t seed = 0;
};

struct SurvivalEstimate {
  double probability = 1.0;
  double std_error = 0.0;  // zero for quadrature
};

/// Probability that independent BMs started at x stay ordered up to time t.
SurvivalEstimate survival(double t, const Configuration& x, const SurvivalOptions& opts = {});

/// Temporally homogeneous noncolliding transition density p_N(dt, y | x)
/// = h_N(y) f_N(dt, y | x) / h_N(x).
double noncolliding_transition(double dt, const Configuration& y, const Configuration& x);

/// Noncolliding density on the finite horizon (0, T):
/// g_{N,T} = N_N(T - t, y) f_N(t - t0, y | x) / N_N(T - t0, x), 0 < t0 <= t < T.
double finite_t_transition(double horizon, double t0, double t, const Configuration& y,
                           const Configuration& x, const SurvivalOptions& opts = {});

struct SchurCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double remainder_bound = 0.0;  // bound on the omitted partitions (mu_1 > max_part)
  int partitions = 0;
};

/// det[e^{x_j y_k}] against its Schur-function expansion truncated at mu_1 <= max_part.
/// N <= 4 and max_part <= 12.
SchurCheck schur_expansion_check(const Eigen::Ref<const Points>& x, const Eigen::Ref<const Points>& y,
                                 int max_part);

struct GueParams {
  int n = 1;
  double variance = 1.0;
};

/// C_N = (2 pi)^{N/2} prod_{j=1}^N Gamma(j).
double gue_constant(int n);
/// C'_N = 2^{N/2} prod_{j=1}^N Gamma(j/2).
double gue_constant_prime(int n);

/// GUE eigenvalue density C_N^{-1} t0^{-N^2/2} e^{-|x|^2/2t0} h_N(x)^2 on the closure of W_N.
double gue_density(const GueParams& params, const Eigen::Ref<const Points>& x);

struct SelbergCheck {
  double i1 = 0.0, i2 = 0.0;
  double ref1 = 0.0, ref2 = 0.0;
};

/// Integrates e^{-|x|^2/2t} h_N(x) and e^{-|x|^2/2t} h_N(x)^2 over W_N, N <= 3.
SelbergCheck selberg_check(int n, double t, double abs_tol = 1e-10);

struct AbsorbedDensity {
  double p_abs = 0.0;
  double p_bessel3 = 0.0;
};

/// Absorbing BM on (0, inf) and its h-transform, the 3D Bessel process.
AbsorbedDensity abs_bm_1d(double t, double y, double x);

}  // namespace dpk::weylkm
