#include "run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>

namespace dpk::cli {

using nlohmann::json;

namespace {

std::vector<ParamSpec> kind_params(const char* kind, int n) {
  return {{"kind", ParamType::text, kind, "Kernel family", {"hermite", "sine", "airy", "bessel"}},
          {"n", ParamType::integer, n, "Number of particles (hermite)"},
          {"nu", ParamType::real, 0.0, "Bessel order (bessel)"}};
}

std::vector<CommandSpec> build_specs() {
  std::vector<CommandSpec> specs;

  auto kernel = kind_params("sine", 2);
  for (const char* name : {"ta", "xa", "tb", "xb"}) kernel.push_back({name, ParamType::real, 0.0, "Space-time point"});
  kernel.push_back({"grid", ParamType::text, nullptr, "Sweep xb over a:b:count"});
  specs.push_back({"kernel", "Evaluate the extended kernel K(ta, xa; tb, xb)", kernel});

  auto density = kind_params("hermite", 20);
  density.push_back({"t", ParamType::real, 1.0, "Time (hermite)"});
  density.push_back({"grid", ParamType::text, "-5:5:101", "Positions a:b:count"});
  specs.push_back({"density", "One-point density on a grid", density});

  auto corr = kind_params("sine", 2);
  corr.push_back({"block", ParamType::text_list, json::array(), "Time block t:x1,x2,... (repeatable)"});
  specs.push_back({"corr", "Multitime correlation function", corr});

  auto fredholm = kind_params("sine", 2);
  fredholm.push_back({"chi", ParamType::text_list, json::array(), "Step t:a:b:value (repeatable)"});
  fredholm.push_back({"nodes", ParamType::integer, 64, "Gauss-Legendre nodes per interval"});
  fredholm.push_back({"discretization", ParamType::text, "symmetric", "Operator discretization", {"symmetric", "nystrom"}});
  specs.push_back({"fredholm", "Fredholm generating function det(I + K chi)", fredholm});

  auto gap = kind_params("sine", 2);
  gap.push_back({"t", ParamType::real, 1.0, "Time"});
  gap.push_back({"a", ParamType::real, -1.0, "Left end"});
  gap.push_back({"b", ParamType::real, 1.0, "Right end"});
  gap.push_back({"nodes", ParamType::integer, 64, "Gauss-Legendre nodes"});
  gap.push_back({"grid", ParamType::text, nullptr, "Sweep b over a:b:count"});
  specs.push_back({"gap", "Gap probability of an interval", gap});

  specs.push_back({"simulate",
                   "Sample the noncolliding system",
                   {{"n", ParamType::integer, 3, "Number of particles"},
                    {"times", ParamType::real_list, json::array({1.0}), "Observation times"},
                    {"paths", ParamType::integer, 100, "Number of paths"},
                    {"dt", ParamType::real, 1e-3, "SDE step"},
                    {"scheme", ParamType::text, "matrix", "Sampler", {"matrix", "sde"}},
                    {"x0", ParamType::real_list, nullptr, "Start configuration (sde)"},
                    {"binary", ParamType::text, nullptr, "Also write the ensemble in binary form"}},
                   true});

  specs.push_back({"survival",
                   "Probability that independent BMs stay ordered",
                   {{"t", ParamType::real, 1.0, "Horizon"},
                    {"x", ParamType::real_list, json::array({0.0, 1.0}), "Start configuration"},
                    {"method", ParamType::text, "quadrature", "Estimator", {"quadrature", "montecarlo"}},
                    {"paths", ParamType::integer, 100000, "Monte Carlo paths"},
                    {"dt", ParamType::real, 1e-3, "Monte Carlo step"},
                    {"tolerance", ParamType::real, 1e-10, "Quadrature tolerance"},
                    {"grid", ParamType::text, nullptr, "Sweep t over a:b:count"}},
                   true});

  specs.push_back({"limits",
                   "Convergence table of scaled Hermite kernels",
                   {{"kind", ParamType::text, "bulk", "Scaling regime", {"bulk", "edge"}},
                    {"n-list", ParamType::integer_list, json::array({100, 200, 400}), "Increasing even N values"},
                    {"probes", ParamType::text, "0:0:0:0", "Probes sa:xa:sb:xb separated by ';'"}}});

  specs.push_back({"specfun",
                   "Tabulate a special function",
                   {{"function", ParamType::text, "airy_ai", "Function",
                     {"airy_ai", "airy_ai_prime", "bessel_j", "bessel_i", "hermite_phi", "heat_kernel"}},
                    {"grid", ParamType::text, "0:1:11", "Arguments a:b:count"},
                    {"nu", ParamType::real, 0.0, "Bessel order"},
                    {"n", ParamType::integer, 0, "Hermite index"},
                    {"t", ParamType::real, 1.0, "Heat kernel time"},
                    {"xprime", ParamType::real, 0.0, "Heat kernel source"}}});

  specs.push_back({"verify",
                   "Replay the acceptance suite",
                   {{"suite", ParamType::text, "fast", "Sample sizes", {"fast", "full"}},
                    {"only", ParamType::integer, 0, "Single criterion (0 runs all)"}}});
  return specs;
}

json coerce_scalar(const json& value, ParamType type, const std::string& key) {
  switch (type) {
    case ParamType::integer:
      if (value.is_number_integer()) return value;
      if (value.is_number_float() && std::trunc(value.get<double>()) == value.get<double>())
        return static_cast<long long>(value.get<double>());
      if (value.is_string()) return parse_integer(value.get<std::string>(), key);
      break;
    case ParamType::real:
      if (value.is_number()) return value.get<double>();
      if (value.is_string()) return parse_real(value.get<std::string>(), key);
      break;
    default:
      if (value.is_string()) return value;
      break;
  }
  throw UsageError("parameter '" + key + "' has the wrong type");
}

json coerce(const json& value, const ParamSpec& spec) {
  const auto& key = spec.name;
  switch (spec.type) {
    case ParamType::integer:
    case ParamType::real:
    case ParamType::text:
      return coerce_scalar(value, spec.type, key);
    case ParamType::integer_list:
    case ParamType::real_list:
    case ParamType::text_list: {
      const ParamType elem = spec.type == ParamType::integer_list ? ParamType::integer
                             : spec.type == ParamType::real_list  ? ParamType::real
                                                                  : ParamType::text;
      json items = json::array();
      if (value.is_array()) {
        for (const auto& v : value) {
          // A flag value like "1,2,3" arrives as a one-element array.
          if (elem != ParamType::text && v.is_string()) {
            for (const auto& part : split(v.get<std::string>(), ',')) items.push_back(coerce_scalar(part, elem, key));
          } else {
            items.push_back(coerce_scalar(v, elem, key));
          }
        }
      } else if (value.is_string() && elem != ParamType::text) {
        const auto text = value.get<std::string>();
        if (!text.empty())
          for (const auto& part : split(text, ',')) items.push_back(coerce_scalar(part, elem, key));
      } else {
        items.push_back(coerce_scalar(value, elem, key));
      }
      return items;
    }
  }
  return value;
}

}  // namespace

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = build_specs();
  return specs;
}

const CommandSpec& command_spec(const std::string& name) {
  for (const auto& spec : command_specs())
    if (spec.name == name) return spec;
  throw UsageError("unknown command '" + name + "'");
}

json RunConfig::to_json() const {
  json j{{"command", command}, {"parameters", parameters}, {"output", output}};
  if (!output_path.empty()) j["output_path"] = output_path;
  if (seed) j["seed"] = *seed;
  return j;
}

RunConfig RunConfig::from_json(const json& input) {
  const json& j = input.contains("config") ? input.at("config") : input;
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "command" && value.is_string()) {
      c.command = value.get<std::string>();
    } else if (key == "parameters" && value.is_object()) {
      c.parameters = value;
    } else if (key == "output" && value.is_string()) {
      c.output = value.get<std::string>();
    } else if (key == "output_path" && value.is_string()) {
      c.output_path = value.get<std::string>();
    } else if (key == "seed" && value.is_number_unsigned()) {
      c.seed = value.get<std::uint64_t>();
    } else {
      throw UsageError("config: unexpected or mistyped field '" + key + "'");
    }
  }
  return c;
}

void normalize(RunConfig& config) {
  const auto& spec = command_spec(config.command);
  if (config.output != "csv" && config.output != "json" && config.output != "svg")
    throw UsageError("output must be csv, json or svg");
  for (const auto& [key, value] : config.parameters.items()) {
    const bool known = std::any_of(spec.params.begin(), spec.params.end(), [&](const ParamSpec& p) { return p.name == key; });
    if (!known) throw UsageError("command '" + config.command + "' has no parameter '" + key + "'");
  }
  json out = json::object();
  for (const auto& p : spec.params) {
    if (config.parameters.contains(p.name)) {
      out[p.name] = coerce(config.parameters.at(p.name), p);
    } else if (!p.fallback.is_null()) {
      out[p.name] = coerce(p.fallback, p);
    } else {
      continue;
    }
    if (!p.choices.empty()) {
      const auto v = out[p.name].get<std::string>();
      if (std::find(p.choices.begin(), p.choices.end(), v) == p.choices.end())
        throw UsageError("parameter '" + p.name + "' must be one of the listed choices, got '" + v + "'");
    }
  }
  config.parameters = std::move(out);
  if (spec.stochastic && !config.seed) config.seed = 0;
}

double parse_real(const std::string& text, const std::string& what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || errno == ERANGE || !std::isfinite(v))
    throw UsageError("'" + what + "': not a finite number: '" + text + "'");
  return v;
}

long long parse_integer(const std::string& text, const std::string& what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(begin, &end, 10);
  if (text.empty() || end != begin + text.size() || errno == ERANGE)
    throw UsageError("'" + what + "': not an integer: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<double> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("grid must look like a:b:count, got '" + text + "'");
  const double a = parse_real(parts[0], "grid"), b = parse_real(parts[1], "grid");
  const long long count = parse_integer(parts[2], "grid");
  if (count < 1 || count > 10000000) throw UsageError("grid count must be between 1 and 1e7");
  if (count == 1) return {a};
  std::vector<double> xs(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) xs[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  xs.back() = b;
  return xs;
}

}  // namespace dpk::cli
