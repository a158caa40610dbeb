#pragma once

#include "run_config.hpp"

#include <string>
#include <vector>

namespace dpk::cli {

// Cells are JSON numbers or strings.
struct Table {
  Table() = default;
  explicit Table(std::vector<std::string> names) : columns(std::move(names)) {}

  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  std::vector<std::string> warnings;
  bool consistency_failure = false;

  void add(std::vector<nlohmann::json> row) { rows.push_back(std::move(row)); }
};

std::string format_number(double v);

std::string render_csv(const Table& table, const RunConfig& config);
std::string render_json(const Table& table, const RunConfig& config);
std::string render_svg(const Table& table, const RunConfig& config);
std::string render(const Table& table, const RunConfig& config);

/// Writes to a temporary file next to `path` and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace dpk::cli
