#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpk::cli {

inline constexpr const char* kVersion = "1.0.0";

// Bad flags, malformed values, unreadable config files.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ParamType { integer, real, text, integer_list, real_list, text_list };

struct ParamSpec {
  std::string name;
  ParamType type;
  nlohmann::json fallback;  // null: optional with no default
  std::string help;
  std::vector<std::string> choices = {};
};

struct CommandSpec {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
  bool stochastic = false;
};

const std::vector<CommandSpec>& command_specs();
const CommandSpec& command_spec(const std::string& name);

struct RunConfig {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::string output = "csv";
  std::string output_path;
  std::optional<std::uint64_t> seed;

  nlohmann::json to_json() const;
  /// Accepts a bare config object or an emitted JSON result carrying one under "config".
  static RunConfig from_json(const nlohmann::json& j);
};

/// Coerces every parameter to its declared type, fills defaults and rejects unknown keys.
/// String values (as they arrive from flags) are parsed; lists accept comma-separated text.
void normalize(RunConfig& config);

/// Typed read access to normalized parameters.
class Params {
 public:
  explicit Params(const nlohmann::json& parameters) : p_(parameters) {}

  bool has(const std::string& key) const { return p_.contains(key); }
  long long integer(const std::string& key) const { return p_.at(key).get<long long>(); }
  double real(const std::string& key) const { return p_.at(key).get<double>(); }
  std::string text(const std::string& key) const { return p_.at(key).get<std::string>(); }
  std::vector<long long> integers(const std::string& key) const { return p_.at(key).get<std::vector<long long>>(); }
  std::vector<double> reals(const std::string& key) const { return p_.at(key).get<std::vector<double>>(); }
  std::vector<std::string> texts(const std::string& key) const { return p_.at(key).get<std::vector<std::string>>(); }

 private:
  const nlohmann::json& p_;
};

double parse_real(const std::string& text, const std::string& what);
long long parse_integer(const std::string& text, const std::string& what);
std::vector<std::string> split(const std::string& text, char sep);

/// "a:b:count" -> count equally spaced points from a to b.
std::vector<double> parse_grid(const std::string& text);

}  // namespace dpk::cli
