#include "cli.hpp"

#include "commands.hpp"
#include "dpk/error.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <fstream>
#include <map>
#include <ostream>

namespace dpk::cli {

using nlohmann::json;

namespace {

struct FlagValues {
  std::map<std::string, std::string> scalars;
  std::map<std::string, std::vector<std::string>> lists;
  std::string config_path, output, output_path, seed;
};

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open config '" + path + "'");
  try {
    return RunConfig::from_json(json::parse(f));
  } catch (const json::exception& e) {
    throw UsageError("config '" + path + "': " + e.what());
  }
}

// "--xa -1" would otherwise be read as a short flag; glue such values to their option.
std::vector<std::string> glue_negative_values(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    const bool option = a.size() > 2 && a.rfind("--", 0) == 0 && a.find('=') == std::string::npos;
    if (option && i + 1 < args.size()) {
      const auto& v = args[i + 1];
      if (v.size() > 1 && v[0] == '-' && (std::isdigit(static_cast<unsigned char>(v[1])) || v[1] == '.')) {
        out.push_back(a + "=" + v);
        ++i;
        continue;
      }
    }
    out.push_back(a);
  }
  return out;
}

std::uint64_t parse_seed(const std::string& text) {
  const long long v = parse_integer(text, "seed");
  if (v < 0) throw UsageError("seed must be non-negative");
  return static_cast<std::uint64_t>(v);
}

void add_common(CLI::App* app, FlagValues& v) {
  app->add_option("--config", v.config_path, "JSON config file (flags override its values)");
  app->add_option("--output", v.output, "Output format: csv, json or svg");
  app->add_option("--output-path", v.output_path, "Write output to this file instead of stdout");
  app->add_option("--seed", v.seed, "Random seed");
}

RunConfig resolve(CLI::App& app, std::map<std::string, FlagValues>& values, FlagValues& top) {
  CLI::App* chosen = nullptr;
  for (auto* sub : app.get_subcommands()) chosen = sub;

  RunConfig config;
  if (!top.config_path.empty()) config = load_config(top.config_path);
  if (chosen) {
    auto& v = values.at(chosen->get_name());
    if (!v.config_path.empty()) config = load_config(v.config_path);
    if (!config.command.empty() && config.command != chosen->get_name())
      throw UsageError("config is for '" + config.command + "', not '" + chosen->get_name() + "'");
    config.command = chosen->get_name();
    for (const auto& p : command_spec(config.command).params) {
      auto* opt = chosen->get_option("--" + p.name);
      if (opt->count() == 0) continue;
      if (p.type == ParamType::text_list || p.type == ParamType::integer_list || p.type == ParamType::real_list)
        config.parameters[p.name] = v.lists[p.name];
      else
        config.parameters[p.name] = v.scalars[p.name];
    }
    for (FlagValues* layer : {&top, &v}) {
      if (!layer->output.empty()) config.output = layer->output;
      if (!layer->output_path.empty()) config.output_path = layer->output_path;
      if (!layer->seed.empty()) config.seed = parse_seed(layer->seed);
    }
  } else {
    if (top.config_path.empty()) throw UsageError("a command or --config is required (see --help)");
    if (!top.output.empty()) config.output = top.output;
    if (!top.output_path.empty()) config.output_path = top.output_path;
    if (!top.seed.empty()) config.seed = parse_seed(top.seed);
  }
  if (config.command.empty()) throw UsageError("config names no command");
  normalize(config);
  return config;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dpk: noncolliding Brownian motion and determinantal kernels"};
  app.set_version_flag("--version", kVersion);
  FlagValues top;
  add_common(&app, top);
  std::map<std::string, FlagValues> values;
  for (const auto& spec : command_specs()) {
    auto* sub = app.add_subcommand(spec.name, spec.summary);
    auto& v = values[spec.name];
    add_common(sub, v);
    for (const auto& p : spec.params) {
      std::string help = p.help;
      if (!p.fallback.is_null()) help += " [default " + p.fallback.dump() + "]";
      if (p.type == ParamType::text_list || p.type == ParamType::integer_list || p.type == ParamType::real_list)
        sub->add_option("--" + p.name, v.lists[p.name], help);
      else
        sub->add_option("--" + p.name, v.scalars[p.name], help);
    }
  }
  app.require_subcommand(0, 1);

  auto glued = glue_negative_values(args);
  std::vector<std::string> reversed(glued.rbegin(), glued.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUserError;
  }

  RunConfig config;
  try {
    config = resolve(app, values, top);
    const Table table = run_command(config);
    for (const auto& w : table.warnings) err << "warning: " << w << '\n';
    const auto text = render(table, config);
    if (config.output_path.empty())
      out << text << std::flush;
    else
      write_atomic(config.output_path, text);
    return table.consistency_failure ? kNumericalFailure : kSuccess;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUserError;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const UnsupportedSizeError& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace dpk::cli
