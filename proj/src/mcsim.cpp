#include "dpk/mcsim.hpp"

#include "dpk/corr.hpp"
#include "dpk/error.hpp"
#include "dpk/quadrature.hpp"
#include "dpk/weylkm.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

namespace dpk::mcsim {

namespace {

constexpr int kMaxHalvings = 20;
constexpr double kSeparation = 1e-12;

bool strictly_ordered(const Eigen::Ref<const Eigen::VectorXd>& x) {
  for (Eigen::Index j = 1; j < x.size(); ++j)
    if (!(x[j] > x[j - 1])) return false;
  return true;
}

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

// Adds a Hermitian Gaussian increment with diagonal variance `var` and off-diagonal
// real/imaginary variances var/2.
void add_hermitian_noise(Eigen::MatrixXcd& h, double var, rng::NormalStream& normal) {
  const auto n = h.rows();
  const double sd = std::sqrt(var), off = std::sqrt(0.5 * var);
  for (Eigen::Index j = 0; j < n; ++j) {
    h(j, j) += sd * normal();
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const std::complex<double> z(off * normal(), off * normal());
      h(j, k) += z;
      h(k, j) += std::conj(z);
    }
  }
}

Eigen::VectorXd dyson_drift(const Eigen::VectorXd& x) {
  const auto n = x.size();
  Eigen::VectorXd drift = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const double f = 1.0 / (x[j] - x[k]);
      drift[j] += f;
      drift[k] -= f;
    }
  return drift;
}

// One Euler-Maruyama step driven by the Brownian increment db over time h. A step that
// breaks the ordering is replaced by two half steps whose increments are a Brownian-bridge
// split of db.
void dyson_step(Eigen::VectorXd& x, double h, const Eigen::VectorXd& db, int depth, rng::NormalStream& normal,
                std::size_t& events) {
  Eigen::VectorXd next = x + h * dyson_drift(x) + db;
  if (strictly_ordered(next)) {
    x = std::move(next);
    return;
  }
  if (depth < kMaxHalvings) {
    Eigen::VectorXd first(x.size());
    const double sd = std::sqrt(h / 4.0);
    for (Eigen::Index j = 0; j < x.size(); ++j) first[j] = 0.5 * db[j] + sd * normal();
    const Eigen::VectorXd second = db - first;
    dyson_step(x, 0.5 * h, first, depth + 1, normal, events);
    dyson_step(x, 0.5 * h, second, depth + 1, normal, events);
    return;
  }
  std::sort(next.begin(), next.end());
  for (Eigen::Index j = 1; j < next.size(); ++j) next[j] = std::max(next[j], next[j - 1] + kSeparation);
  x = std::move(next);
  ++events;
}

void put_bytes(std::ostream& out, std::uint64_t value, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(buf, bytes);
}

std::uint64_t get_bytes(std::istream& in, int bytes) {
  unsigned char buf[8] = {};
  in.read(reinterpret_cast<char*>(buf), bytes);
  if (!in) throw ArgumentError("read_binary: truncated ensemble file");
  std::uint64_t value = 0;
  for (int i = 0; i < bytes; ++i) value |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return value;
}

void put_double(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  put_bytes(out, bits, 8);
}

double get_double(std::istream& in) {
  const std::uint64_t bits = get_bytes(in, 8);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

void SimulationConfig::validate() const {
  if (n < 1) throw ArgumentError("SimulationConfig: N must be positive");
  if (times.empty()) throw ArgumentError("SimulationConfig: at least one time is required");
  if (!(times.front() > 0.0)) throw ArgumentError("SimulationConfig: times must be positive");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ArgumentError("SimulationConfig: times must be strictly increasing");
  if (!(dt > 0.0)) throw ArgumentError("SimulationConfig: dt must be positive");
  if (paths < 1) throw ArgumentError("SimulationConfig: paths must be at least 1");
}

PathEnsemble::PathEnsemble(SimulationConfig config, Eigen::MatrixXd positions, std::size_t collision_events)
    : config_(std::move(config)), positions_(std::move(positions)), collision_events_(collision_events) {}

Eigen::VectorXd PathEnsemble::at(std::size_t path, std::size_t time_index) const {
  const int n = config_.n;
  return positions_.row(static_cast<Eigen::Index>(path)).segment(static_cast<Eigen::Index>(time_index) * n, n).transpose();
}

int PathEnsemble::time_index(double time) const {
  for (std::size_t i = 0; i < config_.times.size(); ++i)
    if (std::abs(config_.times[i] - time) <= 1e-12 * std::max(1.0, std::abs(time))) return static_cast<int>(i);
  return -1;
}

unsigned thread_count() {
  unsigned count = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DPK_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) count = std::min<unsigned>(count, static_cast<unsigned>(cap));
  }
  return count;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    body(0, count);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr failure;
  std::mutex guard;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t first = w * chunk, last = std::min(count, first + chunk);
    if (first >= last) break;
    threads.emplace_back([&, first, last] {
      try {
        body(first, last);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

Configuration gue_sample(int n, double variance, std::uint64_t seed, std::uint64_t index) {
  if (n < 1) throw ArgumentError("gue_sample: N must be positive");
  if (!(variance > 0.0)) throw DomainError("gue_sample: variance must be positive");
  rng::NormalStream normal(seed, index);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  add_hermitian_noise(h, variance, normal);
  return Configuration(sorted_eigenvalues(h));
}

Eigen::MatrixXd gue_samples(int n, double variance, std::size_t count, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("gue_samples: N must be positive");
  if (!(variance > 0.0)) throw DomainError("gue_samples: variance must be positive");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), n);
  parallel_for(count, [&](std::size_t first, std::size_t last) {
    Eigen::MatrixXcd h(n, n);
    for (std::size_t i = first; i < last; ++i) {
      rng::NormalStream normal(seed, i);
      h.setZero();
      add_hermitian_noise(h, variance, normal);
      out.row(static_cast<Eigen::Index>(i)) = sorted_eigenvalues(h).transpose();
    }
  });
  return out;
}

PathEnsemble matrix_bm_eigen(const SimulationConfig& config) {
  config.validate();
  const int n = config.n;
  const auto times = static_cast<Eigen::Index>(config.times.size());
  Eigen::MatrixXd positions(static_cast<Eigen::Index>(config.paths), times * n);
  parallel_for(config.paths, [&](std::size_t first, std::size_t last) {
    Eigen::MatrixXcd h(n, n);
    for (std::size_t p = first; p < last; ++p) {
      rng::NormalStream normal(config.seed, p);
      h.setZero();
      double previous = 0.0;
      for (Eigen::Index i = 0; i < times; ++i) {
        add_hermitian_noise(h, config.times[i] - previous, normal);
        previous = config.times[i];
        positions.block(static_cast<Eigen::Index>(p), i * n, 1, n) = sorted_eigenvalues(h).transpose();
      }
    }
  });
  return PathEnsemble(config, std::move(positions), 0);
}

PathEnsemble dyson_sde(const SimulationConfig& config, const Configuration& x0) {
  config.validate();
  const int n = config.n;
  if (x0.size() != n) throw ArgumentError("dyson_sde: initial configuration must have N points");
  const auto times = static_cast<Eigen::Index>(config.times.size());
  Eigen::MatrixXd positions(static_cast<Eigen::Index>(config.paths), times * n);
  std::atomic<std::size_t> total_events{0};
  parallel_for(config.paths, [&](std::size_t first, std::size_t last) {
    std::size_t events = 0;
    Eigen::VectorXd db(n);
    for (std::size_t p = first; p < last; ++p) {
      rng::NormalStream normal(config.seed, p);
      Eigen::VectorXd x = x0.points();
      double now = 0.0;
      for (Eigen::Index i = 0; i < times; ++i) {
        const double target = config.times[i];
        while (now < target) {
          const double h = std::min(config.dt, target - now);
          const double sd = std::sqrt(h);
          for (int j = 0; j < n; ++j) db[j] = sd * normal();
          dyson_step(x, h, db, 0, normal, events);
          now = (target - now <= config.dt) ? target : now + h;
        }
        positions.block(static_cast<Eigen::Index>(p), i * n, 1, n) = x.transpose();
      }
    }
    total_events += events;
  });
  return PathEnsemble(config, std::move(positions), total_events.load());
}

SurvivalMc survival_mc(double t, const Configuration& x, double dt, std::size_t paths, std::uint64_t seed) {
  if (!(t > 0.0)) throw DomainError("survival_mc: time must be positive");
  if (!(dt > 0.0)) throw ArgumentError("survival_mc: dt must be positive");
  if (paths < 1) throw ArgumentError("survival_mc: paths must be at least 1");
  const int n = x.size();
  if (n == 1) return {1.0, 0.0};

  // Ordering only depends on the gaps; their increments are Gaussian with the tridiagonal
  // covariance dt * [2, -1; -1, 2, ...], sampled through its Cholesky factor.
  const int m = n - 1;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    cov(j, j) = 2.0;
    if (j + 1 < m) cov(j, j + 1) = cov(j + 1, j) = -1.0;
  }
  const Eigen::MatrixXd chol = cov.llt().matrixL();
  Eigen::VectorXd gaps0(m);
  for (int j = 0; j < m; ++j) gaps0[j] = x[j + 1] - x[j];

  const auto full_steps = static_cast<long>(std::floor(t / dt * (1.0 + 1e-12)));
  const double remainder = std::max(0.0, t - full_steps * dt);
  const double sd_full = std::sqrt(dt), sd_last = std::sqrt(remainder);

  std::atomic<std::size_t> survived{0};
  parallel_for(paths, [&](std::size_t first, std::size_t last) {
    std::size_t local = 0;
    Eigen::VectorXd z(m), gaps(m);
    for (std::size_t p = first; p < last; ++p) {
      rng::NormalStream normal(seed, p);
      gaps = gaps0;
      bool alive = true;
      const long steps = full_steps + (remainder > 1e-12 * dt ? 1 : 0);
      for (long s = 0; s < steps && alive; ++s) {
        const double sd = s < full_steps ? sd_full : sd_last;
        if (m == 1) {
          gaps[0] += sd * 1.4142135623730951 * normal();
          alive = gaps[0] > 0.0;
          continue;
        }
        for (int j = 0; j < m; ++j) z[j] = normal();
        gaps.noalias() += sd * (chol * z);
        alive = (gaps.array() > 0.0).all();
      }
      if (alive) ++local;
    }
    survived += local;
  });
  const double p = static_cast<double>(survived.load()) / static_cast<double>(paths);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(paths))};
}

Bessel3Summary bessel3_demo(double t, double x, std::size_t paths, std::uint64_t seed, int bins) {
  if (!(t > 0.0)) throw DomainError("bessel3_demo: time must be positive");
  if (!(x > 0.0)) throw DomainError("bessel3_demo: starting radius must be positive");
  if (paths < 1 || bins < 2) throw ArgumentError("bessel3_demo: need paths >= 1 and bins >= 2");

  Eigen::VectorXd radius(static_cast<Eigen::Index>(paths)), eig_error(static_cast<Eigen::Index>(paths));
  const double sd = std::sqrt(t);
  parallel_for(paths, [&](std::size_t first, std::size_t last) {
    for (std::size_t p = first; p < last; ++p) {
      rng::NormalStream normal(seed, p);
      const double b1 = x + sd * normal(), b2 = sd * normal(), b3 = sd * normal();
      Eigen::Matrix2cd m;
      m << b1, std::complex<double>(b2, b3), std::complex<double>(b2, -b3), -b1;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(m, Eigen::EigenvaluesOnly);
      const double r = std::sqrt(b1 * b1 + b2 * b2 + b3 * b3);
      radius[static_cast<Eigen::Index>(p)] = r;
      eig_error[static_cast<Eigen::Index>(p)] =
          std::max(std::abs(solver.eigenvalues()[1] - r), std::abs(solver.eigenvalues()[0] + r));
    }
  });

  Bessel3Summary out;
  out.paths = paths;
  out.max_eigen_error = eig_error.maxCoeff();
  out.min_radius = radius.minCoeff();
  const double upper = x + 6.0 * sd;
  out.bin_edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) out.bin_edges[b] = upper * b / bins;
  out.observed.assign(bins, 0.0);
  out.expected.assign(bins, 0.0);
  for (Eigen::Index p = 0; p < radius.size(); ++p) {
    const int b = static_cast<int>(radius[p] / upper * bins);
    if (b < bins) out.observed[b] += 1.0;
  }
  for (int b = 0; b < bins; ++b) {
    const auto mass = quad::integrate([&](double y) { return y > 0.0 ? weylkm::abs_bm_1d(t, y, x).p_bessel3 : 0.0; },
                                      out.bin_edges[b], out.bin_edges[b + 1], {1e-12, 0.0, 200});
    out.expected[b] = mass.value * static_cast<double>(paths);
  }
  int used = 0;
  for (int b = 0; b < bins; ++b) {
    if (out.expected[b] < 5.0) continue;
    const double d = out.observed[b] - out.expected[b];
    out.chi2 += d * d / out.expected[b];
    ++used;
  }
  out.dof = std::max(used - 1, 1);
  return out;
}

CorrelationEstimate empirical_correlation(const PathEnsemble& ensemble, const corr::CorrelationRequest& request,
                                          double bandwidth, int bootstrap, std::uint64_t seed) {
  if (!(bandwidth > 0.0)) throw ArgumentError("empirical_correlation: bandwidth must be positive");
  if (ensemble.paths() == 0) throw ArgumentError("empirical_correlation: empty ensemble");
  const int n = ensemble.particles();
  std::vector<int> time_indices;
  for (const auto& block : request.blocks()) {
    const int idx = ensemble.time_index(block.time);
    if (idx < 0) throw ArgumentError("empirical_correlation: request time not present in the ensemble");
    time_indices.push_back(idx);
  }
  const double half = 0.5 * bandwidth;
  const double volume = std::pow(bandwidth, request.total_points());

  // Injective assignments of distinct particles to the points of one block, counted
  // by depth-first search over particles.
  auto block_count = [&](const Eigen::VectorXd& config, const std::vector<double>& points) {
    const int k = static_cast<int>(points.size());
    std::vector<char> used(n, 0);
    std::function<double(int)> count = [&](int j) -> double {
      if (j == k) return 1.0;
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        if (used[i] || std::abs(config[i] - points[j]) > half) continue;
        used[i] = 1;
        total += count(j + 1);
        used[i] = 0;
      }
      return total;
    };
    return count(0);
  };

  const std::size_t paths = ensemble.paths();
  Eigen::VectorXd values(static_cast<Eigen::Index>(paths));
  parallel_for(paths, [&](std::size_t first, std::size_t last) {
    for (std::size_t p = first; p < last; ++p) {
      double v = 1.0;
      for (std::size_t b = 0; b < request.blocks().size() && v != 0.0; ++b)
        v *= block_count(ensemble.at(p, static_cast<std::size_t>(time_indices[b])), request.blocks()[b].points);
      values[static_cast<Eigen::Index>(p)] = v / volume;
    }
  });

  CorrelationEstimate out;
  out.estimate = values.mean();
  out.contributing_paths = static_cast<std::size_t>((values.array() > 0.0).count());
  out.precision_warning = out.contributing_paths < 50;
  if (bootstrap > 1) {
    rng::Philox engine(seed, 0);
    double sum = 0.0, sum_sq = 0.0;
    for (int b = 0; b < bootstrap; ++b) {
      double mean = 0.0;
      for (std::size_t i = 0; i < paths; ++i) mean += values[static_cast<Eigen::Index>(engine() % paths)];
      mean /= static_cast<double>(paths);
      sum += mean;
      sum_sq += mean * mean;
    }
    const double mean = sum / bootstrap;
    out.std_error = std::sqrt(std::max(0.0, (sum_sq - bootstrap * mean * mean) / (bootstrap - 1)));
  }
  return out;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("ks_statistic: samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ArgumentError("ks_statistic: sample must be nonempty");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_critical(double alpha, std::size_t n, std::size_t m) {
  if (!(alpha > 0.0 && alpha < 1.0) || n == 0) throw ArgumentError("ks_critical: need alpha in (0,1) and n > 0");
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double dn = static_cast<double>(n);
  if (m == 0) return c / std::sqrt(dn);
  const double dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

void write_csv(const PathEnsemble& ensemble, std::ostream& out) {
  out << "path,time,particle,position\n";
  char line[128];
  for (std::size_t p = 0; p < ensemble.paths(); ++p)
    for (std::size_t i = 0; i < ensemble.time_count(); ++i) {
      const Eigen::VectorXd x = ensemble.at(p, i);
      for (int j = 0; j < ensemble.particles(); ++j) {
        std::snprintf(line, sizeof line, "%zu,%.17g,%d,%.17g\n", p, ensemble.config().times[i], j, x[j]);
        out << line;
      }
    }
}

void write_binary(const PathEnsemble& ensemble, std::ostream& out) {
  const auto& c = ensemble.config();
  out.write("DPKE", 4);
  put_bytes(out, 1, 2);
  put_bytes(out, static_cast<std::uint64_t>(c.n), 4);
  put_bytes(out, c.times.size(), 4);
  put_bytes(out, ensemble.paths(), 8);
  put_bytes(out, c.seed, 8);
  put_bytes(out, ensemble.collision_events(), 8);
  put_bytes(out, c.scheme == Scheme::sde ? 1 : 0, 1);
  put_double(out, c.dt);
  for (double t : c.times) put_double(out, t);
  const auto& pos = ensemble.positions();
  for (Eigen::Index p = 0; p < pos.rows(); ++p)
    for (Eigen::Index k = 0; k < pos.cols(); ++k) put_double(out, pos(p, k));
}

PathEnsemble read_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "DPKE", 4) != 0) throw ArgumentError("read_binary: not an ensemble file");
  if (get_bytes(in, 2) != 1) throw ArgumentError("read_binary: unsupported version");
  SimulationConfig c;
  c.n = static_cast<int>(get_bytes(in, 4));
  const auto time_count = get_bytes(in, 4);
  c.paths = get_bytes(in, 8);
  c.seed = get_bytes(in, 8);
  const auto events = get_bytes(in, 8);
  c.scheme = get_bytes(in, 1) == 1 ? Scheme::sde : Scheme::matrix;
  c.dt = get_double(in);
  for (std::uint64_t i = 0; i < time_count; ++i) c.times.push_back(get_double(in));
  Eigen::MatrixXd pos(static_cast<Eigen::Index>(c.paths), static_cast<Eigen::Index>(time_count) * c.n);
  for (Eigen::Index p = 0; p < pos.rows(); ++p)
    for (Eigen::Index k = 0; k < pos.cols(); ++k) pos(p, k) = get_double(in);
  return PathEnsemble(std::move(c), std::move(pos), events);
}

}  // namespace dpk::mcsim
