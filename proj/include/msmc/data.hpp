#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "msmc/error.hpp"

namespace msmc {

enum class Transformation { none, log_diff_100 };

inline Transformation parse_transformation(const std::string& s) {
  if (s == "none") return Transformation::none;
  if (s == "logdiff100" || s == "log_diff_100") return Transformation::log_diff_100;
  throw InvalidInput("unknown transformation '" + s + "' (expected none or logdiff100)");
}

inline const char* to_string(Transformation t) {
  return t == Transformation::none ? "none" : "logdiff100";
}

/// Observations with strictly increasing period labels.
struct SeriesDataset {
  std::vector<std::string> labels;
  std::vector<double> values;
  Transformation transformation = Transformation::none;

  std::size_t size() const noexcept { return values.size(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

inline bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::logic_error&) {
    return false;
  }
  return used == s.size();
}

inline bool is_missing(const std::string& s) {
  return s.empty() || s == "NA" || s == "na" || s == "." || s == "NaN" || s == "nan" ||
         s == "null";
}

/// Numeric labels compare as numbers; others (1952Q2, 1952-04-01) as text.
inline bool label_less(const std::string& a, const std::string& b) {
  double x = 0, y = 0;
  if (parse_number(a, x) && parse_number(b, y)) return x < y;
  return a < b;
}

}  // namespace detail

/// y_t = 100 (ln x_t - ln x_{t-1}); the first period is dropped.
inline SeriesDataset log_diff_100(const SeriesDataset& levels) {
  if (levels.size() < 2) throw InvalidInput("logdiff100: need at least 2 observations");
  SeriesDataset out;
  out.transformation = Transformation::log_diff_100;
  for (std::size_t t = 0; t < levels.size(); ++t) {
    if (!(levels.values[t] > 0.0)) {
      throw InvalidInput("logdiff100: non-positive level " + std::to_string(levels.values[t]) +
                         " at " + levels.labels[t]);
    }
  }
  for (std::size_t t = 1; t < levels.size(); ++t) {
    out.labels.push_back(levels.labels[t]);
    out.values.push_back(100.0 * (std::log(levels.values[t]) - std::log(levels.values[t - 1])));
  }
  return out;
}

/// One-column (value) or two-column (period, value) comma-separated text.
/// Lines starting with '#' are comments; a non-numeric first row is a header.
inline SeriesDataset parse_series(std::istream& in, Transformation transformation,
                                  const std::string& source = "series") {
  SeriesDataset raw;
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(detail::trim(f));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    const auto where = [&] { return source + " line " + std::to_string(line_no); };
    if (fields.empty() || fields.size() > 2) {
      throw InvalidInput(where() + ": expected 1 or 2 comma-separated fields");
    }
    const std::string& value_text = fields.back();
    double value = 0.0;
    if (first_row && !detail::is_missing(value_text) && !detail::parse_number(value_text, value)) {
      first_row = false;  // header
      continue;
    }
    first_row = false;
    if (detail::is_missing(value_text)) throw InvalidInput(where() + ": missing value");
    if (!detail::parse_number(value_text, value) || !std::isfinite(value)) {
      throw InvalidInput(where() + ": cannot parse value '" + value_text + "'");
    }
    std::string label = fields.size() == 2 ? fields[0] : std::to_string(raw.size() + 1);
    if (label.empty()) throw InvalidInput(where() + ": missing period label");
    if (!raw.labels.empty() && !detail::label_less(raw.labels.back(), label)) {
      throw InvalidInput(where() + ": period label '" + label + "' does not follow '" +
                         raw.labels.back() + "'");
    }
    raw.labels.push_back(std::move(label));
    raw.values.push_back(value);
  }
  if (raw.values.empty()) throw InvalidInput(source + ": no observations");
  if (transformation == Transformation::log_diff_100) return log_diff_100(raw);
  return raw;
}

inline SeriesDataset ingest_series(const std::string& path, Transformation transformation) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open series file '" + path + "'");
  return parse_series(in, transformation, path);
}

}  // namespace msmc
