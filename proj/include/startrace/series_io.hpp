#pragma once

#include "startrace/series.hpp"

#include <json.hpp>

#include <string>

namespace startrace {

using json = nlohmann::ordered_json;

// Polynomial expressions over x1.., y1.., dx1.., h (or hbar), u and i,
// with + - * ^, parentheses, and division by nonzero constants.
GradedSeries parse_series(const std::string& text, int dim, Truncation t = {});

std::string format_series(const GradedSeries& s);

json truncation_to_json(const Truncation& t);
Truncation truncation_from_json(const json& j);

json series_to_json(const GradedSeries& s);
GradedSeries series_from_json(const json& j);

json rational_to_json(const Rational& q);
Rational rational_from_json(const json& j);

}  // namespace startrace
