#include "delone/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "delone/errors.hpp"

namespace delone {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    auto j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::int64_t parse_int(std::string_view s, std::size_t line_no) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": '" + std::string(s) + "' is not an integer");
  }
  return v;
}

// Value of "key=<int>" or ParseError.
std::int64_t header_field(std::string_view token, std::string_view key) {
  if (!token.starts_with(key) || token.size() <= key.size() || token[key.size()] != '=') {
    throw ParseError("header: expected " + std::string(key) + "=<int>, got '" + std::string(token) + "'");
  }
  auto v = parse_int(token.substr(key.size() + 1), 1);
  if (v <= 0) throw ParseError("header: " + std::string(key) + " must be positive");
  return v;
}

std::string read_header(std::istream& in, std::string_view magic) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file, expected a '# " + std::string(magic) + "' header");
  auto tok = split_ws(line);
  if (tok.size() < 2 || tok[0] != "#" || tok[1] != magic) {
    throw ParseError("missing '# " + std::string(magic) + "' header");
  }
  return line;
}

}  // namespace

// ---------------------------------------------------------------------------
// Text formats

void write_points(std::ostream& out, const PointSet& set) {
  out << "# delone-v1 d=2 denom=" << set.denom() << '\n';
  for (auto p : set.numerators()) out << p.x << ' ' << p.y << '\n';
}

PointSet read_points(std::istream& in) {
  const auto header_line = read_header(in, "delone-v1");
  auto header = split_ws(header_line);
  if (header.size() != 4 || header[2] != "d=2") throw ParseError("header: expected 'd=2 denom=<k>'");
  auto denom = header_field(header[3], "denom");
  std::vector<LatticePoint> pts;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError("line " + std::to_string(line_no) + ": expected 'x y'");
    pts.push_back({parse_int(tok[0], line_no), parse_int(tok[1], line_no)});
  }
  return PointSet(std::move(pts), denom);
}

void write_map(std::ostream& out, const BijectionTable& f) {
  out << "# map-v1 denom_src=" << f.source().denom() << " denom_tgt=" << f.target().denom() << '\n';
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto s = f.source()[i];
    auto t = f.target()[f.image_index(i)];
    out << s.x << ' ' << s.y << ' ' << t.x << ' ' << t.y << '\n';
  }
}

BijectionTable read_map(std::istream& in) {
  const auto header_line = read_header(in, "map-v1");
  auto header = split_ws(header_line);
  if (header.size() != 4) throw ParseError("header: expected 'denom_src=<a> denom_tgt=<b>'");
  auto ds = header_field(header[2], "denom_src");
  auto dt = header_field(header[3], "denom_tgt");
  std::vector<std::pair<LatticePoint, LatticePoint>> pairs;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 4) throw ParseError("line " + std::to_string(line_no) + ": expected 'x y u v'");
    pairs.push_back({{parse_int(tok[0], line_no), parse_int(tok[1], line_no)},
                     {parse_int(tok[2], line_no), parse_int(tok[3], line_no)}});
  }
  return BijectionTable::from_pairs(pairs, ds, dt);
}

PointSet read_points_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_points(in);
}

BijectionTable read_map_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_map(in);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path.string());
  out << text;
  if (!out) throw ParseError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// JSON

namespace {

// Re-throws nlohmann type errors as ParseError with some context.
template <class F>
auto guarded(const char* what, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  return j.at(key);
}

std::int64_t int_from_json(const json& j, const char* what) {
  if (!j.is_number_integer()) throw ParseError(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

LatticePoint pair_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw ParseError(std::string(what) + " must be a pair [x, y]");
  return {int_from_json(j[0], what), int_from_json(j[1], what)};
}

}  // namespace

json to_json(const Rational& r) { return to_string(r); }

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw ParseError("expected a rational as \"p/q\" or an integer, got " + j.dump());
}

json to_json(const ScaledPoint& p) { return json::array({to_string(p.x()), to_string(p.y())}); }

json to_json(const DensitySpec& rho) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ConstantDensity>) {
          return {{"variant", "constant"}, {"c", to_string(d.c)}};
        } else if constexpr (std::is_same_v<T, BilinearDensity>) {
          json c = json::array();
          for (const auto& v : d.corners) c.push_back(to_string(v));
          return {{"variant", "bilinear"}, {"corners", c}};
        } else if constexpr (std::is_same_v<T, TrigDensity>) {
          return {{"variant", "trig"}, {"k", d.k}, {"a", to_string(d.a)}};
        } else {
          json v = json::array();
          for (const auto& x : d.values) v.push_back(to_string(x));
          return {{"variant", "grid"}, {"m", d.m}, {"values", v}};
        }
      },
      rho);
}

DensitySpec density_from_json(const json& j) {
  auto variant = require(j, "variant");
  if (!variant.is_string()) throw ParseError("density variant must be a string");
  auto name = variant.get<std::string>();
  if (name == "constant") return ConstantDensity{rational_from_json(require(j, "c"))};
  if (name == "trig") {
    auto k = j.contains("k") ? int_from_json(j.at("k"), "k") : 1;
    return TrigDensity{k, rational_from_json(require(j, "a"))};
  }
  if (name == "bilinear") {
    const auto& c = require(j, "corners");
    if (!c.is_array() || c.size() != 4) throw ParseError("bilinear density needs 4 corner values");
    BilinearDensity d;
    for (std::size_t i = 0; i < 4; ++i) d.corners[i] = rational_from_json(c[i]);
    return d;
  }
  if (name == "grid") {
    GridDensity g;
    g.m = int_from_json(require(j, "m"), "m");
    const auto& v = require(j, "values");
    if (g.m < 2) throw ParseError("grid density needs m >= 2");
    if (!v.is_array() || v.size() != static_cast<std::size_t>(g.m * g.m)) {
      throw ParseError("grid density needs m*m = " + std::to_string(g.m * g.m) + " values");
    }
    for (const auto& x : v) g.values.push_back(rational_from_json(x));
    return g;
  }
  throw ParseError("unknown density variant '" + name + "'");
}

json to_json(const ScaleSchedule& s) {
  json levels = json::array();
  for (const auto& L : s.levels) {
    levels.push_back({{"l", L.side}, {"m", L.subdivisions}, {"anchor", {L.anchor.x, L.anchor.y}}});
  }
  return {{"levels", levels}};
}

ScaleSchedule schedule_from_json(const json& j) {
  const json& levels = j.is_array() ? j : require(j, "levels");
  if (!levels.is_array()) throw ParseError("levels must be an array");
  ScaleSchedule s;
  for (const auto& e : levels) {
    Level L;
    L.side = int_from_json(require(e, "l"), "l");
    L.subdivisions = int_from_json(require(e, "m"), "m");
    L.anchor = pair_from_json(require(e, "anchor"), "anchor");
    s.levels.push_back(L);
  }
  return s;
}

json to_json(const Box& b) {
  return {{"center", json::array({to_string(b.cx), to_string(b.cy)})}, {"radius", to_string(b.radius)}, {"closed", b.closed}};
}

Box box_from_json(const json& j) {
  const auto& c = require(j, "center");
  if (!c.is_array() || c.size() != 2) throw ParseError("center must be a pair");
  Box b{rational_from_json(c[0]), rational_from_json(c[1]), rational_from_json(require(j, "radius")), true};
  if (b.radius < 0) throw ParseError("radius must be nonnegative");
  if (j.contains("closed")) {
    if (!j.at("closed").is_boolean()) throw ParseError("closed must be a boolean");
    b.closed = j.at("closed").get<bool>();
  }
  return b;
}

json to_json(const Rect& r) {
  return {{"x0", to_string(r.x0)}, {"y0", to_string(r.y0)},     {"x1", to_string(r.x1)},
          {"y1", to_string(r.y1)}, {"half_open", r.half_open}};
}

BuildConfig build_config_from_json(const json& j, std::uint64_t seed) {
  return guarded("build config", [&] {
    BuildConfig c{density_from_json(require(j, "density")), schedule_from_json(j), box_from_json(require(j, "window")),
                  FillPolicy::row_major()};
    if (j.contains("fill")) {
      const auto& f = j.at("fill");
      if (!f.is_string()) throw ParseError("fill must be \"row_major\" or \"seeded\"");
      auto name = f.get<std::string>();
      if (name == "seeded") {
        auto s = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : seed;
        c.policy = FillPolicy::seeded(s);
      } else if (name != "row_major") {
        throw ParseError("unknown fill policy '" + name + "'");
      }
    }
    return c;
  });
}

json to_json(const BuildConfig& c) {
  json j = to_json(c.schedule);
  j["density"] = to_json(c.density);
  j["window"] = to_json(c.window);
  if (c.policy.kind == FillPolicy::Kind::seeded) {
    j["fill"] = "seeded";
    j["seed"] = c.policy.seed;
  } else {
    j["fill"] = "row_major";
  }
  return j;
}

json to_json(const DeloneConstants& c) {
  json j{{"covering_radius", to_string(c.covering_radius)}, {"covering_witness", to_json(c.covering_witness)}};
  j["separation"] = c.separation ? json(to_string(*c.separation)) : json(nullptr);
  if (c.separation_witness) {
    j["separation_witness"] = json::array({to_json(c.separation_witness->first), to_json(c.separation_witness->second)});
  }
  return j;
}

json to_json(const AuditReport& r) {
  json v = json::array();
  for (const auto& a : r.violations) {
    json e{{"kind", a.kind}, {"witness", to_json(a.witness)}, {"detail", a.detail}};
    e["level"] = a.level ? json(*a.level) : json(nullptr);
    e["cell"] = a.cell ? json(*a.cell) : json(nullptr);
    v.push_back(e);
  }
  json j{{"clean", r.clean()}, {"violations", v}, {"cells_checked", r.cells_checked}, {"points", r.points}};
  j["constants"] = r.constants ? to_json(*r.constants) : json(nullptr);
  return j;
}

json to_json(const PointSet& s) {
  json pts = json::array();
  for (auto p : s.numerators()) pts.push_back({p.x, p.y});
  return {{"denom", s.denom()}, {"points", pts}};
}

PointSet point_set_from_json(const json& j) {
  auto denom = j.contains("denom") ? int_from_json(j.at("denom"), "denom") : 1;
  if (denom <= 0) throw ParseError("denom must be positive");
  const auto& pts = require(j, "points");
  if (!pts.is_array()) throw ParseError("points must be an array");
  std::vector<LatticePoint> v;
  for (const auto& p : pts) v.push_back(pair_from_json(p, "point"));
  return PointSet(std::move(v), denom);
}

MatchInstance match_instance_from_json(const json& j) {
  MatchInstance m{point_set_from_json(require(j, "source")), point_set_from_json(require(j, "target"))};
  if (j.contains("mode")) {
    auto mode = j.at("mode").is_string() ? j.at("mode").get<std::string>() : "";
    if (mode == "bilipschitz") m.mode = MatchMode::bilipschitz;
    else if (mode != "lipschitz") throw ParseError("mode must be \"lipschitz\" or \"bilipschitz\"");
  }
  if (j.contains("injection")) {
    if (!j.at("injection").is_boolean()) throw ParseError("injection must be a boolean");
    m.injection = j.at("injection").get<bool>();
  }
  return m;
}

json to_json(const MatchInstance& m) {
  return {{"source", to_json(m.source)},
          {"target", to_json(m.target)},
          {"mode", m.mode == MatchMode::lipschitz ? "lipschitz" : "bilipschitz"},
          {"injection", m.injection}};
}

json to_json(const MatchResult& r) {
  json assignment = json::array();
  const auto& f = r.assignment;
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto s = f.source()[i];
    auto t = f.target()[f.image_index(i)];
    assignment.push_back({{s.x, s.y}, {t.x, t.y}});
  }
  return {{"assignment", assignment},
          {"image", r.image},
          {"L_star", to_string(r.L_star)},
          {"optimal", r.optimal},
          {"stats",
           {{"nodes", r.stats.nodes}, {"feasibility_calls", r.stats.feasibility_calls}, {"seconds", r.stats.seconds}}}};
}

json to_json(const DistortionReport& r, const BijectionTable& f) {
  auto pair = [&](std::pair<std::size_t, std::size_t> w) {
    return json::array({to_json(f.source().at(w.first)), to_json(f.source().at(w.second))});
  };
  return {{"L", to_string(r.upper)},
          {"b", to_string(r.lower)},
          {"upper_witness", pair(r.upper_witness)},
          {"lower_witness", pair(r.lower_witness)}};
}

json to_json(const CoUniformityModulus& m) {
  json s = json::array();
  for (const auto& x : m.samples) s.push_back({{"r", to_string(x.radius)}, {"omega", to_string(x.omega)}});
  json j{{"samples", s}};
  j["fitted_exponent"] = std::isfinite(m.fitted_exponent) ? json(m.fitted_exponent) : json(nullptr);
  return j;
}

json to_json(const OrderGateResult& g) {
  json j{{"pass", g.pass}, {"tail_ratio_nonincreasing", g.tail_ratio_nonincreasing}};
  j["exponent"] = std::isfinite(g.exponent) ? json(g.exponent) : json(nullptr);
  return j;
}

json to_json(const RegularityEstimate& e) {
  json certs = json::array();
  for (const auto& c : e.certificates) {
    certs.push_back({{"ball", to_json(c.ball)},
                     {"preimage_size", c.preimage_size},
                     {"separated_size", c.separated_size},
                     {"exact", c.exact}});
  }
  return {{"C_hat", e.constant}, {"approximate", e.approximate}, {"certificates", certs}};
}

json to_json(const EscapeDiagnostic& d) {
  json levels = json::array();
  for (const auto& L : d.levels) {
    json e{{"j", L.j}, {"radius", to_string(L.radius)}, {"skipped", L.skipped}};
    if (!L.skipped) {
      e["x_star_index"] = L.x_star;
      e["x_star_norm"] = to_string(L.x_star_norm);
      e["boundary_distance"] = to_string(L.boundary_distance);
      e["within_bound"] = L.within_bound;
      e["annulus_containment"] = L.annulus_containment;
      e["annulus_containment_q0"] = L.annulus_containment_q0;
    }
    levels.push_back(e);
  }
  return {{"threshold", to_string(d.threshold)},
          {"levels", levels},
          {"boundary_violations", d.boundary_violations},
          {"annulus_violations", d.annulus_violations},
          {"annulus_q0_violations", d.annulus_q0_violations}};
}

json to_json(const MassLossReport& m) {
  json missing = json::array();
  for (std::size_t i = 0; i < m.missing.size(); ++i) missing.push_back(to_json(m.missing.at(i)));
  return {{"missing_count", m.missing.size()},
          {"normalized_mass", to_string(m.normalized_mass)},
          {"band_width", to_string(m.band_width)},
          {"missing", missing}};
}

json to_json(const SymdiffResult& s) {
  json j{{"pass", s.pass},
         {"shift", to_string(s.shift)},
         {"symmetric_difference", s.symmetric_difference},
         {"worst_distance", to_string(s.worst_distance)}};
  j["witness"] = s.witness ? to_json(*s.witness) : json(nullptr);
  return j;
}

std::string to_decimal(const Real& x, int digits) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

}  // namespace delone
