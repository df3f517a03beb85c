#include "mots/output.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "mots/errors.hpp"

namespace mots::out {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(fmt(v));
}

Json nums(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

void write_json(std::ostream& os, const Json& j) { os << j.dump(2) << '\n'; }

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw UsageError("csv row width does not match the header");
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt(r[i]);
    os << '\n';
  }
}

void write_columns(std::ostream& os, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
  if (columns.size() != header.size()) throw UsageError("csv column count does not match the header");
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  std::vector<std::vector<double>> rows(n, std::vector<double>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != n) throw UsageError("csv columns differ in length");
    for (std::size_t r = 0; r < n; ++r) rows[r][c] = columns[c][r];
  }
  write_csv(os, header, rows);
}

}  // namespace mots::out
