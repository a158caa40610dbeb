#pragma once

#include "dpk/rng.hpp"
#include "dpk/types.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace dpk::corr {
class CorrelationRequest;
}

namespace dpk::mcsim {

enum class Scheme { matrix, sde };

struct SimulationConfig {
  int n = 2;
  std::vector<double> times;
  double dt = 1e-3;
  std::size_t paths = 1000;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::matrix;

  void validate() const;
};

/// Sampled configurations, stored path-major: positions(path, time * n + particle).
class PathEnsemble {
 public:
  PathEnsemble() = default;
  PathEnsemble(SimulationConfig config, Eigen::MatrixXd positions, std::size_t collision_events = 0);

  const SimulationConfig& config() const { return config_; }
  const Eigen::MatrixXd& positions() const { return positions_; }
  std::size_t collision_events() const { return collision_events_; }
  std::size_t paths() const { return static_cast<std::size_t>(positions_.rows()); }
  int particles() const { return config_.n; }
  std::size_t time_count() const { return config_.times.size(); }

  /// Positions of one path at one time index.
  Eigen::VectorXd at(std::size_t path, std::size_t time_index) const;
  /// Index of `time` among the ensemble times (within 1e-12), or -1.
  int time_index(double time) const;

 private:
  SimulationConfig config_;
  Eigen::MatrixXd positions_;
  std::size_t collision_events_ = 0;
};

/// Number of worker threads: hardware concurrency, capped by DPK_THREADS.
unsigned thread_count();

/// Runs body(first, last) over contiguous chunks of [0, count) on thread_count() threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

/// Sorted eigenvalues of an N x N GUE matrix (diagonal variance `variance`, off-diagonal
/// real and imaginary parts variance/2 each), drawn from stream `index` of `seed`.
Configuration gue_sample(int n, double variance, std::uint64_t seed, std::uint64_t index = 0);

/// `count` independent GUE samples, one per row.
Eigen::MatrixXd gue_samples(int n, double variance, std::size_t count, std::uint64_t seed);

/// Hermitian matrix Brownian motion from the zero matrix, diagonalized at each time:
/// exact-in-law multitime samples of the noncolliding system with GUE entrance law.
PathEnsemble matrix_bm_eigen(const SimulationConfig& config);

/// Euler-Maruyama integration of dX_j = dB_j + sum_{k != j} dt / (X_j - X_k) from x0 at time 0.
/// A step that breaks the ordering is redone as two Brownian-bridge half steps (up to 20
/// halvings); failing that, neighbours are pushed apart by 1e-12 and the event is counted.
PathEnsemble dyson_sde(const SimulationConfig& config, const Configuration& x0);

struct SurvivalMc {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Fraction of discretized independent BM paths from x that remain strictly ordered at
/// every grid time up to t. Ordering is only monitored on the grid, so the estimate is
/// biased upward by O(sqrt(dt)).
SurvivalMc survival_mc(double t, const Configuration& x, double dt, std::size_t paths, std::uint64_t seed);

struct Bessel3Summary {
  std::size_t paths = 0;
  double max_eigen_error = 0.0;  // max |lambda_+ - |B(t)|| over paths
  double min_radius = 0.0;
  double chi2 = 0.0;
  int dof = 0;
  std::vector<double> bin_edges;
  std::vector<double> observed;  // counts
  std::vector<double> expected;  // counts from the h-transform density
};

/// 3D BM from (x, 0, 0): checks the 2x2 traceless Hermitian matrix eigenvalues +-|B(t)|
/// and compares the |B(t)| histogram with (y/x) p_abs(t, y | x).
Bessel3Summary bessel3_demo(double t, double x, std::size_t paths, std::uint64_t seed, int bins = 40);

struct CorrelationEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t contributing_paths = 0;
  bool precision_warning = false;
};

/// Box-kernel estimate of the multitime product density at the requested points, with a
/// bootstrap standard error. Points within one block are matched to distinct particles.
CorrelationEstimate empirical_correlation(const PathEnsemble& ensemble, const corr::CorrelationRequest& request,
                                          double bandwidth, int bootstrap = 200, std::uint64_t seed = 1);

// Two-sample and one-sample Kolmogorov-Smirnov statistics.
double ks_statistic(std::vector<double> a, std::vector<double> b);
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Asymptotic critical value c(alpha) * sqrt((n + m) / (n m)); pass m = 0 for one sample.
double ks_critical(double alpha, std::size_t n, std::size_t m = 0);

// Ensemble export: columnar CSV and the "DPKE" little-endian binary form.
void write_csv(const PathEnsemble& ensemble, std::ostream& out);
void write_binary(const PathEnsemble& ensemble, std::ostream& out);
PathEnsemble read_binary(std::istream& in);

}  // namespace dpk::mcsim
