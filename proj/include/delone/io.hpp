#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "delone/construction.hpp"
#include "delone/density.hpp"
#include "delone/distortion.hpp"
#include "delone/geometry.hpp"
#include "delone/matching.hpp"
#include "delone/measures.hpp"

namespace delone {

using json = nlohmann::json;

// Point files: "# delone-v1 d=2 denom=<k>" then "x y" numerator lines, sorted.
void write_points(std::ostream& out, const PointSet& set);
/// Throws ParseError on malformed input and DuplicatePoint on repeats.
PointSet read_points(std::istream& in);

// Map files: "# map-v1 denom_src=<a> denom_tgt=<b>" then "x y u v" lines sorted by source.
void write_map(std::ostream& out, const BijectionTable& f);
BijectionTable read_map(std::istream& in);

PointSet read_points_file(const std::filesystem::path& path);
BijectionTable read_map_file(const std::filesystem::path& path);
/// Parses a JSON document; ParseError on syntax errors or a missing file.
json read_json_file(const std::filesystem::path& path);
/// Truncates and writes; ParseError when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Rationals are written as "p/q" strings; integers are accepted on input.
json to_json(const Rational& r);
Rational rational_from_json(const json& j);
json to_json(const ScaledPoint& p);

json to_json(const DensitySpec& rho);
DensitySpec density_from_json(const json& j);

json to_json(const ScaleSchedule& s);
/// Accepts {"levels":[{"l":32,"m":2,"anchor":[0,0]}, ...]} or the bare array.
ScaleSchedule schedule_from_json(const json& j);

json to_json(const Box& b);
/// {"center":[x,y],"radius":r,"closed":true}.
Box box_from_json(const json& j);
json to_json(const Rect& r);

struct BuildConfig {
  DensitySpec density;
  ScaleSchedule schedule;
  Box window;
  FillPolicy policy;
};

/// {"density":{...},"levels":[...],"window":{...},"fill":"row_major"|"seeded"}.
/// A seeded fill takes `seed` unless the document carries its own "seed".
BuildConfig build_config_from_json(const json& j, std::uint64_t seed = 0);
json to_json(const BuildConfig& c);

json to_json(const AuditReport& r);
json to_json(const DeloneConstants& c);

json to_json(const PointSet& s);
/// {"denom":k,"points":[[x,y],...]} with numerators.
PointSet point_set_from_json(const json& j);

/// {"source":{...},"target":{...},"mode":"lipschitz"|"bilipschitz","injection":false}.
MatchInstance match_instance_from_json(const json& j);
json to_json(const MatchInstance& m);
json to_json(const MatchResult& r);

json to_json(const DistortionReport& r, const BijectionTable& f);
json to_json(const CoUniformityModulus& m);
json to_json(const OrderGateResult& g);
json to_json(const RegularityEstimate& e);
json to_json(const EscapeDiagnostic& d);
json to_json(const MassLossReport& m);
json to_json(const SymdiffResult& s);

/// Shortest round-trip decimal of a high-precision real.
std::string to_decimal(const Real& x, int digits = 17);

}  // namespace delone
