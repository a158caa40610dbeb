#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace dpk::cli {

using nlohmann::json;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_cell(const json& cell) {
  if (cell.is_number_integer()) return std::to_string(cell.get<long long>());
  if (cell.is_number()) return format_number(cell.get<double>());
  const auto s = cell.is_string() ? cell.get<std::string>() : cell.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string render_csv(const Table& table, const RunConfig& config) {
  std::ostringstream out;
  const auto& p = config.parameters;
  out << "# command: " << config.command << '\n';
  out << "# version: " << kVersion << '\n';
  out << "# seed: " << (config.seed ? std::to_string(*config.seed) : std::string("none")) << '\n';
  out << "# tolerance: " << (p.contains("tolerance") ? format_number(p.at("tolerance").get<double>()) : "default") << '\n';
  out << "# config: " << config.to_json().dump() << '\n';
  for (const auto& w : table.warnings) out << "# warning: " << w << '\n';
  for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << table.columns[j];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << csv_cell(row[j]);
    out << '\n';
  }
  return out.str();
}

std::string render_json(const Table& table, const RunConfig& config) {
  json j{{"config", config.to_json()},
         {"version", kVersion},
         {"columns", table.columns},
         {"rows", table.rows},
         {"warnings", table.warnings}};
  return j.dump(2) + "\n";
}

std::string render_svg(const Table& table, const RunConfig& config) {
  constexpr double width = 800, height = 600, left = 80, right = 160, top = 40, bottom = 60;
  std::vector<std::size_t> numeric;
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    const bool all = !table.rows.empty() && std::all_of(table.rows.begin(), table.rows.end(), [&](const auto& r) {
      return j < r.size() && r[j].is_number();
    });
    if (all) numeric.push_back(j);
  }

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (numeric.size() >= 2) {
    x0 = y0 = std::numeric_limits<double>::infinity();
    x1 = y1 = -x0;
    for (const auto& r : table.rows) {
      const double x = r[numeric[0]].get<double>();
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      for (std::size_t k = 1; k < numeric.size(); ++k) {
        const double y = r[numeric[k]].get<double>();
        if (!std::isfinite(y)) continue;
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
    if (!std::isfinite(y0)) y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  }
  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  out << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">dpk "
      << xml_escape(config.command) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = x0 + (x1 - x0) * i / 5.0, fy = y0 + (y1 - y0) * i / 5.0;
    out << "<line x1=\"" << sx(fx) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(fx) << "\" y2=\"" << top + ph + 5
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << sx(fx) << "\" y=\"" << top + ph + 20 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << short_number(fx) << "</text>\n";
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << left << "\" y2=\"" << sy(fy)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << sy(fy) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << short_number(fy) << "</text>\n";
  }
  if (!numeric.empty())
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(table.columns[numeric[0]])
        << "</text>\n";

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  for (std::size_t k = 1; k < numeric.size(); ++k) {
    const char* color = colors[(k - 1) % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : table.rows) {
      const double y = r[numeric[k]].get<double>();
      if (std::isfinite(y)) out << sx(r[numeric[0]].get<double>()) << ',' << sy(y) << ' ';
    }
    out << "\"/>\n";
    const double ly = top + 20.0 * static_cast<double>(k);
    out << "<line x1=\"" << width - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 30 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << width - right + 36 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << xml_escape(table.columns[numeric[k]]) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render(const Table& table, const RunConfig& config) {
  if (config.output == "json") return render_json(table, config);
  if (config.output == "svg") return render_svg(table, config);
  return render_csv(table, config);
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw UsageError("failed while writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw UsageError("cannot move output into place at '" + path + "'");
  }
}

}  // namespace dpk::cli
