#include "doctest.h"

#include "dpk/corr.hpp"
#include "dpk/error.hpp"
#include "dpk/kernels.hpp"
#include "dpk/mcsim.hpp"
#include "dpk/weylkm.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <sstream>

using namespace dpk;
using namespace dpk::mcsim;
using kernels::HermiteFinite;

namespace {

double bin_mass(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 8, 1e-12);
}

// Tabulated CDF of rho_N(t, .) / N on a fine grid, linearly interpolated.
std::function<double(double)> density_cdf(int n, double t) {
  const double lo = -4 * std::sqrt(n * t) - 6 * std::sqrt(t), hi = -lo, h = (hi - lo) / 4000;
  auto table = std::make_shared<std::vector<double>>(1, 0.0);
  for (int i = 0; i < 4000; ++i)
    table->push_back(table->back() +
                     bin_mass([&](double x) { return kernels::density_rho_n(n, t, x) / n; }, lo + i * h, lo + (i + 1) * h));
  return [=](double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double u = (x - lo) / h;
    const auto i = static_cast<std::size_t>(u);
    return (*table)[i] + (u - i) * ((*table)[i + 1] - (*table)[i]);
  };
}

SimulationConfig matrix_config(int n, std::vector<double> times, std::size_t paths, std::uint64_t seed) {
  SimulationConfig c;
  c.n = n;
  c.times = std::move(times);
  c.paths = paths;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("configuration validation") {
  SimulationConfig c = matrix_config(2, {1.0, 0.5}, 10, 0);
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c.times = {0.0, 1.0};
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c.times = {1.0};
  c.paths = 0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c.paths = 1;
  c.dt = 0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("gue samples") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Configuration x = gue_sample(6, 1.3, 17, i);
    CHECK(x.size() == 6);
    CHECK(is_strictly_increasing(x.points()));
  }
  CHECK(gue_sample(3, 1.0, 5, 2).points() == gue_sample(3, 1.0, 5, 2).points());

  const Eigen::MatrixXd big = gue_samples(100, 1.0, 200, 3);
  const double mean_max = big.col(99).mean();
  CHECK(std::abs(mean_max - 20.0) <= 0.05 * 20.0);

  // N = 2 one-point histogram against rho_2 within 3-sigma binomial bands.
  const std::size_t count = 100000;
  const Eigen::MatrixXd two = gue_samples(2, 1.0, count, 8);
  const int bins = 24;
  const double lo = -4.0, hi = 4.0, w = (hi - lo) / bins;
  std::vector<double> observed(bins, 0.0);
  for (Eigen::Index i = 0; i < two.size(); ++i) {
    const double v = two.data()[i];
    if (v >= lo && v < hi) observed[static_cast<int>((v - lo) / w)] += 1.0;
  }
  for (int b = 0; b < bins; ++b) {
    const double p = bin_mass([](double x) { return kernels::density_rho_n(2, 1.0, x) / 2; }, lo + b * w, lo + (b + 1) * w);
    const double expected = p * 2.0 * count;
    const double sigma = std::sqrt(2.0 * count * p * (1 - p));
    CHECK(std::abs(observed[b] - expected) <= 3 * sigma + 1);
  }
}

TEST_CASE("matrix brownian motion") {
  const SimulationConfig c = matrix_config(3, {0.5, 1.0, 2.0}, 10000, 21);
  const PathEnsemble e = matrix_bm_eigen(c);
  CHECK(e.paths() == 10000);
  CHECK(e.time_index(1.0) == 1);
  CHECK(e.time_index(1.5) == -1);
  bool ordered = true;
  for (std::size_t p = 0; p < e.paths(); ++p)
    for (std::size_t i = 0; i < 3; ++i) ordered &= is_strictly_increasing(e.at(p, i));
  CHECK(ordered);

  // The trace is a one-dimensional BM with variance N t.
  for (std::size_t i = 0; i < 3; ++i) {
    Eigen::VectorXd trace(static_cast<Eigen::Index>(e.paths()));
    for (std::size_t p = 0; p < e.paths(); ++p) trace[static_cast<Eigen::Index>(p)] = e.at(p, i).sum();
    const double var = (trace.array() - trace.mean()).square().sum() / (trace.size() - 1);
    const double target = 3 * c.times[i];
    CHECK(std::abs(var - target) <= 3 * target * std::sqrt(2.0 / (trace.size() - 1)));
  }

  // Single-time marginal against gue_sample.
  std::vector<double> a, b;
  const Eigen::MatrixXd g = gue_samples(3, 1.0, 10000, 99);
  for (std::size_t p = 0; p < e.paths(); ++p) a.push_back(e.at(p, 1)[2]);
  for (Eigen::Index p = 0; p < g.rows(); ++p) b.push_back(g(p, 2));
  CHECK(ks_statistic(a, b) < ks_critical(0.01, a.size(), b.size()));
}

TEST_CASE("matrix scheme one-time law equals GUE") {
  const PathEnsemble e = matrix_bm_eigen(matrix_config(2, {1.7}, 10000, 4));
  std::vector<double> pooled(e.positions().data(), e.positions().data() + e.positions().size());
  const double d = ks_statistic(pooled, density_cdf(2, 1.7));
  // Pooled eigenvalues are dependent in pairs; use the per-path count for the threshold.
  CHECK(d < ks_critical(0.01, e.paths()));
}

TEST_CASE("determinism across thread counts") {
  const SimulationConfig c = matrix_config(4, {0.3, 0.9}, 64, 1234);
  setenv("DPK_THREADS", "1", 1);
  const PathEnsemble one = matrix_bm_eigen(c);
  setenv("DPK_THREADS", "4", 1);
  const PathEnsemble four = matrix_bm_eigen(c);
  unsetenv("DPK_THREADS");
  CHECK(one.positions() == four.positions());
  SimulationConfig s = c;
  s.scheme = Scheme::sde;
  s.dt = 1e-3;
  const Configuration x0{-1.0, 0.0, 0.5, 2.0};
  CHECK(dyson_sde(s, x0).positions() == dyson_sde(s, x0).positions());
}

TEST_CASE("dyson sde") {
  SimulationConfig c = matrix_config(1, {0.5, 1.0}, 5000, 2);
  c.scheme = Scheme::sde;
  c.dt = 0.01;
  const PathEnsemble bm = dyson_sde(c, Configuration{0.3});
  Eigen::VectorXd inc(5000);
  for (std::size_t p = 0; p < 5000; ++p) inc[static_cast<Eigen::Index>(p)] = bm.at(p, 1)[0] - 0.3;
  const double var = (inc.array() - inc.mean()).square().sum() / (inc.size() - 1);
  CHECK(std::abs(var - 1.0) <= 3 * std::sqrt(2.0 / 4999));
  CHECK(std::abs(inc.mean()) <= 3 * std::sqrt(1.0 / 5000));

  // Repulsion keeps every sampled configuration ordered.
  SimulationConfig r = matrix_config(5, {0.25, 0.5, 1.0}, 100, 6);
  r.scheme = Scheme::sde;
  r.dt = 1e-4;
  const PathEnsemble five = dyson_sde(r, Configuration{-1.0, -0.5, 0.0, 0.5, 1.0});
  double min_gap = INFINITY;
  for (std::size_t p = 0; p < five.paths(); ++p)
    for (std::size_t i = 0; i < 3; ++i) min_gap = std::min(min_gap, Configuration(five.at(p, i)).min_gap());
  CHECK(min_gap > 0.0);
  MESSAGE("N=5 forced separations: " << five.collision_events());

  // Long-time gap law matches the matrix scheme.
  SimulationConfig g = matrix_config(2, {100.0}, 2000, 8);
  g.scheme = Scheme::sde;
  g.dt = 0.02;
  const PathEnsemble sde = dyson_sde(g, Configuration{-0.5, 0.5});
  const PathEnsemble mat = matrix_bm_eigen(matrix_config(2, {100.0}, 4000, 9));
  std::vector<double> ga, gb;
  for (std::size_t p = 0; p < sde.paths(); ++p) ga.push_back(sde.at(p, 0)[1] - sde.at(p, 0)[0]);
  for (std::size_t p = 0; p < mat.paths(); ++p) gb.push_back(mat.at(p, 0)[1] - mat.at(p, 0)[0]);
  CHECK(ks_statistic(ga, gb) < ks_critical(0.01, ga.size(), gb.size()));

  // Long-time shape: pooled positions against the GUE(t) one-point law.
  std::vector<double> pooled;
  for (std::size_t p = 0; p < sde.paths(); ++p)
    for (int j = 0; j < 2; ++j) pooled.push_back(sde.at(p, 0)[j]);
  CHECK(ks_statistic(pooled, density_cdf(2, 100.0)) < ks_critical(0.01, sde.paths()));

  CHECK_THROWS_AS(dyson_sde(g, Configuration{0.0, 1.0, 2.0}), ArgumentError);
}

TEST_CASE("survival monte carlo") {
  const auto two = survival_mc(1.0, Configuration{0.0, 2.0}, 1e-3, 20000, 1);
  CHECK(std::abs(two.estimate - std::erf(1.0)) <= 3 * two.std_error + 0.02);
  CHECK(two.std_error == doctest::Approx(std::sqrt(two.estimate * (1 - two.estimate) / 20000)).epsilon(1e-12));

  const Configuration x{-1.0, 0.0, 1.0};
  const double exact = weylkm::survival(1.0, x).probability;
  const auto three = survival_mc(1.0, x, 1e-3, 20000, 2);
  CHECK(std::abs(three.estimate - exact) <= 3 * three.std_error + 0.03);

  CHECK(survival_mc(1e-4, Configuration{0.0, 1.0}, 1e-5, 2000, 3).estimate == 1.0);
  CHECK(survival_mc(5.0, Configuration{4.0}, 1e-2, 10, 3).estimate == 1.0);

  // Common random numbers: nested horizons give nested survivor sets.
  double last = 1.0;
  for (double t : {0.25, 0.5, 1.0, 2.0}) {
    const double p = survival_mc(t, x, 1e-2, 5000, 77).estimate;
    CHECK(p <= last);
    last = p;
  }
}

TEST_CASE("3D Bessel demo") {
  const auto s = bessel3_demo(1.0, 1.0, 100000, 5);
  CHECK(s.max_eigen_error <= 1e-12);
  CHECK(s.min_radius > 0.0);
  const boost::math::chi_squared dist(s.dof);
  CHECK(s.chi2 <= boost::math::quantile(dist, 0.999));
  double expected_total = 0.0;
  for (double e : s.expected) expected_total += e;
  CHECK(expected_total == doctest::Approx(100000).epsilon(1e-4));
  CHECK_THROWS_AS(bessel3_demo(1.0, 0.0, 10, 1), DomainError);
}

TEST_CASE("empirical correlation") {
  const PathEnsemble e = matrix_bm_eigen(matrix_config(2, {1.0, 1.5}, 40000, 12));
  const corr::CorrelationRequest one(HermiteFinite{2}, {{1.0, {0.3}}});
  const auto est = empirical_correlation(e, one, 0.1);
  CHECK(std::abs(est.estimate - kernels::density_rho_n(2, 1.0, 0.3)) <= 3 * est.std_error + 1e-3);
  CHECK_FALSE(est.precision_warning);

  const auto wide = empirical_correlation(e, one, 1e4, 10);
  CHECK(wide.estimate * 1e4 == doctest::Approx(2.0).epsilon(1e-12));

  const corr::CorrelationRequest two(HermiteFinite{2}, {{1.0, {-0.4}}, {1.5, {0.6}}});
  const auto est2 = empirical_correlation(e, two, 0.2);
  CHECK(std::abs(est2.estimate - corr::multitime_correlation(two)) <= 3 * est2.std_error + 2e-3);

  CHECK(empirical_correlation(e, one, 1e-6).precision_warning);
  CHECK_THROWS_AS(empirical_correlation(e, corr::CorrelationRequest(HermiteFinite{2}, {{2.0, {0.0}}}), 0.1),
                  ArgumentError);
}

TEST_CASE("kolmogorov-smirnov helpers") {
  CHECK(ks_statistic({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK(ks_statistic({0.0, 0.1}, {5.0, 6.0}) == 1.0);
  CHECK(ks_statistic({0.5}, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.5));
  CHECK(ks_critical(0.05, 100) == doctest::Approx(1.3581 / 10).epsilon(1e-3));
  CHECK(ks_critical(0.01, 100, 100) == doctest::Approx(1.6276 * std::sqrt(0.02)).epsilon(1e-3));
  CHECK_THROWS_AS(ks_critical(1.5, 10), ArgumentError);
}

TEST_CASE("ensemble export") {
  SimulationConfig c = matrix_config(3, {0.5, 1.25}, 5, 99);
  const PathEnsemble e = matrix_bm_eigen(c);
  std::stringstream bin;
  write_binary(e, bin);
  const std::string bytes = bin.str();
  CHECK(bytes.substr(0, 4) == "DPKE");
  CHECK(bytes.size() == 4 + 2 + 4 + 4 + 8 + 8 + 8 + 1 + 8 + 2 * 8 + 5 * 2 * 3 * 8);
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  CHECK(static_cast<unsigned char>(bytes[5]) == 0);
  const PathEnsemble back = read_binary(bin);
  CHECK(back.positions() == e.positions());
  CHECK(back.config().times == c.times);
  CHECK(back.config().seed == 99);
  CHECK(back.particles() == 3);

  std::stringstream csv;
  write_csv(e, csv);
  std::string header, first;
  std::getline(csv, header);
  std::getline(csv, first);
  CHECK(header == "path,time,particle,position");
  CHECK(first.rfind("0,0.5,0,", 0) == 0);
  std::size_t lines = 2;
  for (std::string line; std::getline(csv, line);) ++lines;
  CHECK(lines == 1 + 5 * 2 * 3);

  std::stringstream junk("XXXX");
  CHECK_THROWS_AS(read_binary(junk), ArgumentError);
  std::stringstream truncated(bytes.substr(0, 40));
  CHECK_THROWS_AS(read_binary(truncated), ArgumentError);
}
