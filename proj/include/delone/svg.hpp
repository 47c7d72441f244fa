#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "delone/geometry.hpp"

namespace delone {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

/// One square marker per point, y pointing up. An empty set gives an empty viewport.
std::string points_svg(const PointSet& set, double marker = 0.8);

/// One polyline per series over a shared frame.
std::string series_svg(const std::vector<Series>& series);

/// Reads CSV with a header row: first column x, every further column a series.
/// Throws ParseError on non-numeric cells or ragged rows.
std::vector<Series> read_series_csv(std::istream& in);

}  // namespace delone
