#pragma once

// Deterministic text output: every double goes through 12 significant digits.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mots/common.hpp"

namespace mots::out {

using Json = nlohmann::ordered_json;

/// "%.12g"; "nan", "inf", "-inf" for non-finite values.
std::string fmt(double v);

/// The double obtained by rounding v to 12 significant digits; null if not finite.
Json num(double v);
Json nums(const std::vector<double>& v);

/// Pretty-printed with a trailing newline.
void write_json(std::ostream& os, const Json& j);

/// Comma-separated, header row, LF line endings.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Column-major variant: every column has the same length.
void write_columns(std::ostream& os, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);

}  // namespace mots::out
