#include "commands.hpp"

#include "dpk/corr.hpp"
#include "dpk/kernels.hpp"
#include "dpk/mcsim.hpp"
#include "dpk/specfun.hpp"
#include "dpk/weylkm.hpp"
#include "suite.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace dpk::cli {

using nlohmann::json;

namespace {

int checked_int(long long v, long long lo, long long hi, const std::string& what) {
  if (v < lo || v > hi)
    throw UsageError("'" + what + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

kernels::KernelKind make_kind(const Params& p) {
  const auto kind = p.text("kind");
  if (kind == "hermite") return kernels::HermiteFinite{checked_int(p.integer("n"), 1, 100000, "n")};
  if (kind == "sine") return kernels::Sine{};
  if (kind == "airy") return kernels::Airy{};
  return kernels::Bessel{p.real("nu")};
}

std::vector<double> reals_of(const std::string& text, const std::string& what) {
  std::vector<double> xs;
  for (const auto& part : split(text, ',')) xs.push_back(parse_real(part, what));
  return xs;
}

Table kernel_command(const Params& p) {
  const auto kind = make_kind(p);
  const double ta = p.real("ta"), xa = p.real("xa"), tb = p.real("tb");
  const auto xbs = p.has("grid") ? parse_grid(p.text("grid")) : std::vector<double>{p.real("xb")};
  Table t{{"ta", "xa", "tb", "xb", "value"}};
  for (double xb : xbs) t.add({ta, xa, tb, xb, kernels::kernel_eval(kind, {ta, xa}, {tb, xb})});
  return t;
}

Table density_command(const Params& p) {
  const auto kind = make_kind(p);
  const auto xs = parse_grid(p.text("grid"));
  const bool hermite = std::holds_alternative<kernels::HermiteFinite>(kind);
  Table t;
  t.columns = hermite ? std::vector<std::string>{"x", "rho", "semicircle"} : std::vector<std::string>{"x", "rho"};
  for (double x : xs) {
    if (hermite) {
      const int n = std::get<kernels::HermiteFinite>(kind).n;
      const double time = p.real("t");
      t.add({x, kernels::density_rho_n(n, time, x), kernels::semicircle(n, time, x)});
    } else {
      t.add({x, kernels::spectral_rho(kind, x)});
    }
  }
  return t;
}

Table corr_command(const Params& p) {
  std::vector<corr::Block> blocks;
  for (const auto& spec : p.texts("block")) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw UsageError("block must look like t:x1,x2,...");
    blocks.push_back({parse_real(spec.substr(0, colon), "block"), reals_of(spec.substr(colon + 1), "block")});
  }
  const corr::CorrelationRequest request(make_kind(p), blocks);
  Table t{{"points", "value"}};
  t.add({request.total_points(), corr::multitime_correlation(request)});
  return t;
}

Table fredholm_command(const Params& p) {
  std::map<double, std::vector<corr::Interval>> by_time;
  for (const auto& spec : p.texts("chi")) {
    const auto parts = split(spec, ':');
    if (parts.size() != 4) throw UsageError("chi must look like t:a:b:value");
    by_time[parse_real(parts[0], "chi")].push_back(
        {parse_real(parts[1], "chi"), parse_real(parts[2], "chi"), parse_real(parts[3], "chi")});
  }
  if (by_time.empty()) throw UsageError("fredholm needs at least one --chi");
  std::vector<double> times;
  std::vector<corr::StepFunction> chis;
  for (auto& [time, intervals] : by_time) {
    times.push_back(time);
    chis.emplace_back(intervals);
  }
  const auto grid = corr::QuadratureGrid::gauss_legendre(chis, checked_int(p.integer("nodes"), 1, 2000, "nodes"));
  const auto mode = p.text("discretization") == "nystrom" ? corr::Discretization::nystrom : corr::Discretization::symmetric;
  Table t{{"slices", "value"}};
  t.add({static_cast<long long>(times.size()), corr::fredholm_generating(make_kind(p), times, chis, grid, mode)});
  return t;
}

Table gap_command(const Params& p) {
  const auto kind = make_kind(p);
  const double time = p.real("t"), a = p.real("a");
  const int nodes = checked_int(p.integer("nodes"), 1, 2000, "nodes");
  const auto bs = p.has("grid") ? parse_grid(p.text("grid")) : std::vector<double>{p.real("b")};
  Table t{{"a", "b", "probability"}};
  for (double b : bs) t.add({a, b, corr::gap_probability(kind, time, a, b, nodes)});
  return t;
}

Table simulate_command(const Params& p, const RunConfig& config) {
  mcsim::SimulationConfig sim;
  sim.n = checked_int(p.integer("n"), 1, 10000, "n");
  sim.times = p.reals("times");
  sim.dt = p.real("dt");
  sim.paths = static_cast<std::size_t>(checked_int(p.integer("paths"), 1, 100000000, "paths"));
  sim.seed = config.seed.value_or(0);
  sim.scheme = p.text("scheme") == "sde" ? mcsim::Scheme::sde : mcsim::Scheme::matrix;
  sim.validate();

  mcsim::PathEnsemble ensemble;
  if (sim.scheme == mcsim::Scheme::sde) {
    if (!p.has("x0")) throw UsageError("the sde scheme needs --x0");
    const auto x0 = p.reals("x0");
    if (static_cast<int>(x0.size()) != sim.n) throw UsageError("x0 must hold n positions");
    ensemble = mcsim::dyson_sde(sim, Configuration(x0));
  } else {
    if (p.has("x0")) throw UsageError("x0 applies to the sde scheme only");
    ensemble = mcsim::matrix_bm_eigen(sim);
  }

  if (p.has("binary")) {
    std::ostringstream bin;
    mcsim::write_binary(ensemble, bin);
    write_atomic(p.text("binary"), bin.str());
  }

  Table t{{"path", "time"}};
  for (int j = 0; j < sim.n; ++j) t.columns.push_back("x" + std::to_string(j + 1));
  for (std::size_t path = 0; path < ensemble.paths(); ++path)
    for (std::size_t k = 0; k < ensemble.time_count(); ++k) {
      std::vector<json> row{static_cast<long long>(path), sim.times[k]};
      const auto x = ensemble.at(path, k);
      for (int j = 0; j < sim.n; ++j) row.push_back(x[j]);
      t.add(std::move(row));
    }
  if (ensemble.collision_events() > 0)
    t.warnings.push_back(std::to_string(ensemble.collision_events()) + " forced separations during integration");
  return t;
}

Table survival_command(const Params& p, const RunConfig& config) {
  weylkm::SurvivalOptions opts;
  opts.method = p.text("method") == "montecarlo" ? weylkm::SurvivalMethod::montecarlo : weylkm::SurvivalMethod::quadrature;
  opts.abs_tol = p.real("tolerance");
  opts.dt = p.real("dt");
  opts.paths = static_cast<std::size_t>(checked_int(p.integer("paths"), 1, 100000000, "paths"));
  opts.seed = config.seed.value_or(0);
  const Configuration x(p.reals("x"));
  const auto ts = p.has("grid") ? parse_grid(p.text("grid")) : std::vector<double>{p.real("t")};
  Table t{{"t", "probability", "std_error"}};
  for (double time : ts) {
    const auto s = weylkm::survival(time, x, opts);
    t.add({time, s.probability, s.std_error});
  }
  return t;
}

Table limits_command(const Params& p) {
  const bool bulk = p.text("kind") == "bulk";
  const auto ns = p.integers("n-list");
  if (ns.empty()) throw UsageError("n-list must not be empty");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] <= 0 || ns[i] % 2 != 0) throw UsageError("n-list entries must be even positive integers");
    if (i > 0 && ns[i] <= ns[i - 1]) throw UsageError("n-list must be strictly increasing");
    checked_int(ns[i], 2, 1000000, "n-list");
  }
  std::vector<std::array<double, 4>> probes;
  const auto text = p.text("probes");
  if (!text.empty())
    for (const auto& spec : split(text, ';')) {
      const auto parts = split(spec, ':');
      if (parts.size() != 4) throw UsageError("probe must look like sa:xa:sb:xb");
      probes.push_back({parse_real(parts[0], "probe"), parse_real(parts[1], "probe"), parse_real(parts[2], "probe"),
                        parse_real(parts[3], "probe")});
    }

  Table t{{"probe", "n", "sa", "xa", "sb", "xb", "scaled", "limit", "error", "flagged"}};
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const auto [sa, xa, sb, xb] = probes[k];
    const double limit = bulk ? kernels::kernel_eval(kernels::Sine{}, {sa, xa}, {sb, xb})
                              : kernels::kernel_eval(kernels::Airy{}, {sa, xa}, {sb, xb});
    double previous = INFINITY;
    for (long long n : ns) {
      const int ni = static_cast<int>(n);
      const double scaled = bulk ? kernels::bulk_scaled_kernel(ni, sa, xa, sb, xb) : kernels::edge_scaled_kernel(ni, sa, xa, sb, xb);
      const double error = std::abs(scaled - limit);
      const bool flagged = !(error <= previous);
      if (flagged && previous != INFINITY)
        t.warnings.push_back("probe " + std::to_string(k) + ": error did not decrease at n=" + std::to_string(n));
      t.add({static_cast<long long>(k), n, sa, xa, sb, xb, scaled, limit, error, (flagged && previous != INFINITY) ? 1 : 0});
      previous = error;
    }
  }
  return t;
}

Table specfun_command(const Params& p) {
  const auto f = p.text("function");
  const auto xs = parse_grid(p.text("grid"));
  const double nu = p.real("nu"), time = p.real("t"), xprime = p.real("xprime");
  const int n = checked_int(p.integer("n"), 0, 1000000, "n");
  Table t{{"x", f}};
  for (double x : xs) {
    double v = 0.0;
    if (f == "airy_ai") v = specfun::airy_ai(x);
    else if (f == "airy_ai_prime") v = specfun::airy_ai_prime(x);
    else if (f == "bessel_j") v = specfun::bessel_j(nu, x);
    else if (f == "bessel_i") v = specfun::bessel_i(nu, x);
    else if (f == "hermite_phi") v = specfun::hermite_phi(n, x);
    else v = specfun::heat_kernel(time, x, xprime);
    t.add({x, v});
  }
  return t;
}

Table verify_command(const Params& p) {
  const acceptance::SuiteOptions options{p.text("suite") == "fast"};
  const int only = checked_int(p.integer("only"), 0, acceptance::kCriterionCount, "only");
  Table t{{"id", "status", "title", "seconds", "budget", "detail"}};
  for (int id = 1; id <= acceptance::kCriterionCount; ++id) {
    if (only != 0 && id != only) continue;
    const auto o = acceptance::run_criterion(id, options);
    t.add({o.id, o.passed ? "PASS" : "FAIL", o.title, o.seconds, o.budget, o.detail});
    if (!o.passed) {
      t.consistency_failure = true;
      t.warnings.push_back("criterion " + std::to_string(id) + " failed");
    }
  }
  return t;
}

}  // namespace

Table run_command(const RunConfig& config) {
  const Params p(config.parameters);
  const auto& c = config.command;
  if (c == "kernel") return kernel_command(p);
  if (c == "density") return density_command(p);
  if (c == "corr") return corr_command(p);
  if (c == "fredholm") return fredholm_command(p);
  if (c == "gap") return gap_command(p);
  if (c == "simulate") return simulate_command(p, config);
  if (c == "survival") return survival_command(p, config);
  if (c == "limits") return limits_command(p);
  if (c == "specfun") return specfun_command(p);
  if (c == "verify") return verify_command(p);
  throw UsageError("unknown command '" + c + "'");
}

}  // namespace dpk::cli
