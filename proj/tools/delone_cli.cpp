// delone: build, audit, match, analyze, measures, plot, report.
//
// Exit codes: 0 success, 1 an audit or diagnostic found violations, 2 bad input.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "delone/construction.hpp"
#include "delone/distortion.hpp"
#include "delone/errors.hpp"
#include "delone/io.hpp"
#include "delone/matching.hpp"
#include "delone/measures.hpp"
#include "delone/svg.hpp"

namespace fs = std::filesystem;
using namespace delone;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kBadInput = 2;

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

struct Options {
  // build / audit / measures / report
  std::string input;
  std::string audit_out;
  // match
  std::string source, target, mode = "lipschitz", method = "exact";
  bool injection = false;
  bool oracle = false;
  std::uint64_t iterations = 2000, restarts = 10;
  // analyze
  std::string map;
  std::vector<std::string> stats{"lipschitz", "co_uniformity", "order_gate", "regularity"};
  std::vector<std::string> radii;
  std::string escape;
  // measures
  std::string family = "dyadic:4";
  std::string query;
};

// Output goes to --out when given, stdout otherwise.
void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(g.out, text);
  }
}

fs::path sibling(const std::string& out, const std::string& suffix) { return fs::path(out + suffix); }

void write_manifest(const Globals& g, const std::string& command, json config) {
  if (g.out.empty()) return;
  json m{{"command", command}, {"seed", g.seed}, {"format", g.format}, {"out", g.out}, {"config", std::move(config)}};
  if (!g.config.empty()) m["config_path"] = g.config;
  write_text_file(sibling(g.out, ".manifest.json"), m.dump(2) + "\n");
}

json load_config(const Globals& g) {
  if (g.config.empty()) throw ParseError("--config is required for this command");
  return read_json_file(g.config);
}

std::vector<Rational> parse_radii(const std::vector<std::string>& text, std::vector<Rational> fallback) {
  if (text.empty()) return fallback;
  std::vector<Rational> out;
  for (const auto& t : text) out.push_back(parse_rational(t));
  return out;
}

// A build replayed from the config; with --in the loaded points replace the materialized ones.
DeloneSet load_set(const Globals& g, const Options& o, json* echo) {
  auto cfg_json = load_config(g);
  auto cfg = build_config_from_json(cfg_json, g.seed);
  if (echo) *echo = to_json(cfg);
  auto d = build(cfg.density, cfg.schedule, cfg.window, cfg.policy);
  if (!o.input.empty()) d.points = read_points_file(o.input);
  return d;
}

int cmd_build(const Globals& g, const Options& o) {
  if (g.out.empty()) throw ParseError("build needs --out for the point file");
  auto cfg = build_config_from_json(load_config(g), g.seed);
  auto d = build(cfg.density, cfg.schedule, cfg.window, cfg.policy);
  std::ostringstream pts;
  write_points(pts, d.points);
  write_text_file(g.out, pts.str());
  auto rep = audit(d);
  auto audit_path = o.audit_out.empty() ? sibling(g.out, ".audit.json") : fs::path(o.audit_out);
  write_text_file(audit_path, to_json(rep).dump(2) + "\n");
  write_manifest(g, "build", to_json(cfg));
  std::cerr << "build: " << d.points.size() << " points, " << rep.violations.size() << " audit violations\n";
  return rep.clean() ? kOk : kViolation;
}

int cmd_audit(const Globals& g, const Options& o) {
  json echo;
  auto d = load_set(g, o, &echo);
  auto rep = audit(d);
  emit(g, to_json(rep).dump(2) + "\n");
  write_manifest(g, "audit", echo);
  return rep.clean() ? kOk : kViolation;
}

int cmd_match(const Globals& g, const Options& o) {
  MatchInstance inst;
  json echo;
  if (!g.config.empty()) {
    auto j = load_config(g);
    inst = match_instance_from_json(j);
    echo = j;
  } else {
    if (o.source.empty() || o.target.empty()) throw ParseError("match needs --config or both --source and --target");
    inst.source = read_points_file(o.source);
    inst.target = read_points_file(o.target);
    if (o.mode == "bilipschitz") inst.mode = MatchMode::bilipschitz;
    else if (o.mode != "lipschitz") throw ParseError("--mode must be lipschitz or bilipschitz");
    inst.injection = o.injection;
    echo = to_json(inst);
  }
  check_shape(inst);

  MatchResult res;
  if (o.method == "exact") {
    res = min_lipschitz(inst, ExactMethod{});
  } else if (o.method == "heuristic") {
    res = min_lipschitz(inst, HeuristicMethod{g.seed, o.iterations, o.restarts});
  } else if (o.method == "brute") {
    res = brute_force_min(inst);
  } else {
    throw ParseError("--method must be exact, heuristic or brute");
  }
  auto out = to_json(res);
  out["method"] = o.method;
  int code = kOk;
  if (o.oracle) {
    if (injection_count(inst.source.size(), inst.target.size(), kBruteForceCap) <= kBruteForceCap) {
      auto bf = brute_force_min(inst);
      bool agree = res.optimal ? bf.L_star == res.L_star : bf.L_star <= res.L_star;
      out["oracle"] = {{"L_star", to_string(bf.L_star)}, {"agree", agree}};
      if (!agree) code = kViolation;
    } else {
      out["oracle"] = {{"skipped", "instance above the brute-force cap"}};
    }
  }
  emit(g, out.dump(2) + "\n");
  write_manifest(g, "match", echo);
  return code;
}

std::vector<Box> regularity_balls(const BijectionTable& f, const std::vector<Rational>& radii) {
  std::vector<Box> balls;
  for (const auto& r : radii) {
    for (std::size_t t = 0; t < f.target().size(); ++t) {
      auto c = f.target().at(t);
      balls.push_back(Box{c.x(), c.y(), r, true});
    }
  }
  return balls;
}

int cmd_analyze(const Globals& g, const Options& o) {
  if (o.map.empty()) throw ParseError("analyze needs --map");
  auto f = read_map_file(o.map);
  const Rational step(1, f.target().denom());
  json out = json::object();
  json echo{{"map", o.map}, {"stats", o.stats}, {"radii", o.radii}};
  int code = kOk;

  if (!o.escape.empty()) {
    auto spec = read_json_file(o.escape);
    echo["escape"] = spec;
    auto center_j = spec.value("center", json::array({"0", "0"}));
    if (!center_j.is_array() || center_j.size() != 2) throw ParseError("escape center must be a pair");
    auto cx = rational_from_json(center_j[0]), cy = rational_from_json(center_j[1]);
    auto L = rational_from_json(spec.value("L", json("1")));
    std::vector<Rational> radii;
    if (spec.contains("radii")) {
      for (const auto& r : spec.at("radii")) radii.push_back(rational_from_json(r));
    } else {
      radii = nested_radii(rational_from_json(spec.at("r0")), L, f.source().denom());
    }
    // Centre as an exact point over a common denominator.
    auto den = cx.denominator() * cy.denominator();
    ScaledPoint center(cx.numerator() * cy.denominator(), cy.numerator() * cx.denominator(), den);
    auto window = unit_square();
    if (spec.contains("window")) {
      const auto& w = spec.at("window");
      window = Rect{rational_from_json(w.at("x0")), rational_from_json(w.at("y0")), rational_from_json(w.at("x1")),
                    rational_from_json(w.at("y1")), false};
    }
    auto diag = escape_check(f, center, radii, L, window);
    out["escape"] = to_json(diag);
    if (diag.boundary_violations || diag.annulus_violations) code = kViolation;
  }

  for (const auto& s : o.stats) {
    if (s == "lipschitz") {
      out["lipschitz"] = to_json(lipschitz_constants(f, PairScan::pruned), f);
    } else if (s == "co_uniformity" || s == "order_gate") {
      if (out.contains("co_uniformity")) continue;
      std::vector<Rational> def;
      for (int k = 0; k <= 4; ++k) def.push_back(step * (1 << k));
      auto m = co_uniformity(f, parse_radii(o.radii, def));
      out["co_uniformity"] = to_json(m);
      try {
        out["order_gate"] = to_json(order_gate(m, 2));
      } catch (const InsufficientData& e) {
        out["order_gate"] = {{"error", e.what()}};
      }
    } else if (s == "regularity") {
      auto radii = parse_radii(o.radii, {step, step * 2, step * 4});
      out["regularity"] = to_json(regularity_constant(f, regularity_balls(f, radii)));
    } else {
      throw ParseError("unknown statistic '" + s + "'");
    }
  }
  emit(g, out.dump(2) + "\n");
  write_manifest(g, "analyze", echo);
  return code;
}

int cmd_measures(const Globals& g, const Options& o) {
  json echo;
  auto d = load_set(g, o, &echo);
  echo["family"] = o.family;

  std::ostringstream csv;
  csv << "level,rect_id,mu,nu,integral,abs_error\n";
  json rows = json::array(), levels = json::array();
  std::optional<Real> previous;
  bool nonincreasing = true;
  for (std::size_t n = 0; n < d.schedule.levels.size(); ++n) {
    if (!d.level_materialized(n)) continue;
    auto patch = normalize_patch(d, n);
    CountingMeasure mu{patch.points, patch.square.side};
    auto fam = parse_family(o.family, patch.square.subdivisions);
    auto disc = discrepancy(mu, d.density, fam);
    for (const auto& r : disc.rows) {
      csv << n << ',' << r.rect_id << ',' << to_string(r.mu) << ',' << to_string(r.nu) << ','
          << to_decimal(r.integral) << ',' << to_decimal(r.abs_error) << '\n';
      rows.push_back({{"level", n},
                      {"rect_id", r.rect_id},
                      {"mu", to_string(r.mu)},
                      {"nu", to_string(r.nu)},
                      {"integral", to_decimal(r.integral)},
                      {"abs_error", to_decimal(r.abs_error)}});
    }
    if (previous && disc.sup > *previous) nonincreasing = false;
    previous = disc.sup;
    json lv{{"level", n}, {"l", patch.square.side}, {"m", patch.square.subdivisions}, {"points", patch.points.size()},
            {"sup_discrepancy", to_decimal(disc.sup)}};
    if (disc.argmax) lv["witness"] = to_json(disc.rows[*disc.argmax].rect);
    levels.push_back(lv);
  }

  json summary{{"family", o.family}, {"levels", levels}, {"sup_nonincreasing", nonincreasing}};

  // Mass loss: a supplied normalized map, or the identity on the finest materialized patch.
  json mass = json::object();
  if (!o.query.empty()) {
    auto q = read_json_file(o.query);
    echo["query"] = q;
    auto ball = box_from_json(q.at("ball"));
    auto coarse = q.value("coarse_denom", std::int64_t{1});
    if (!o.map.empty()) {
      auto f = read_map_file(o.map);
      auto tdenom = q.value("target_denom", f.target().denom());
      mass = to_json(mass_loss(f, ball, tdenom, coarse));
    } else {
      throw ParseError("--query needs --map");
    }
  } else {
    std::optional<std::size_t> finest;
    for (std::size_t n = 0; n < d.schedule.levels.size(); ++n)
      if (d.level_materialized(n)) finest = n;
    if (finest) {
      auto patch = normalize_patch(d, *finest);
      std::vector<std::pair<LatticePoint, LatticePoint>> id;
      for (auto p : patch.points.numerators()) id.emplace_back(p, p);
      auto f = BijectionTable::from_pairs(id, patch.square.side, patch.square.side);
      auto rep = mass_loss(f, Box{0, 0, Rational(1, 4), true}, patch.square.side, 1);
      mass = to_json(rep);
      mass.erase("missing");
      mass["map"] = "identity";
      mass["level"] = *finest;
      mass["ball"] = to_json(Box{0, 0, Rational(1, 4), true});
    }
  }
  summary["mass_loss"] = mass;

  if (g.format == "csv") {
    emit(g, csv.str());
    if (!g.out.empty()) write_text_file(sibling(g.out, ".summary.json"), summary.dump(2) + "\n");
    else std::cerr << summary.dump(2) << "\n";
  } else {
    summary["rows"] = rows;
    emit(g, summary.dump(2) + "\n");
  }
  write_manifest(g, "measures", echo);
  return kOk;
}

int cmd_plot(const Globals& g, const Options& o) {
  if (o.input.empty()) throw ParseError("plot needs --in");
  std::ifstream in(o.input);
  if (!in) throw ParseError("cannot open " + o.input);
  std::string svg;
  if (fs::path(o.input).extension() == ".csv") {
    svg = series_svg(read_series_csv(in));
  } else {
    svg = points_svg(read_points(in));
  }
  emit(g, svg);
  write_manifest(g, "plot", json{{"in", o.input}});
  return kOk;
}

int cmd_report(const Globals& g, const Options& o) {
  json echo;
  auto d = load_set(g, o, &echo);
  auto rep = audit(d);
  json levels = json::array();
  for (std::size_t n = 0; n < d.schedule.levels.size(); ++n) {
    const auto& L = d.schedule.levels[n];
    json lv{{"level", n}, {"l", L.side}, {"m", L.subdivisions}, {"anchor", {L.anchor.x, L.anchor.y}},
            {"materialized", d.level_materialized(n)}};
    if (d.level_materialized(n)) {
      auto patch = normalize_patch(d, n);
      CountingMeasure mu{patch.points, L.side};
      lv["points"] = patch.points.size();
      lv["cells_sup_discrepancy"] = to_decimal(discrepancy(mu, d.density, cell_family(L.subdivisions)).sup);
      lv["cells_bound"] = to_string(Rational(L.subdivisions * L.subdivisions, L.side * L.side));
      lv["dyadic4_sup_discrepancy"] = to_decimal(discrepancy(mu, d.density, dyadic_family(4)).sup);
    }
    levels.push_back(lv);
  }
  auto range = density_range(d.density);
  json out{{"density", to_json(d.density)},
           {"density_range", json::array({to_string(range.min), to_string(range.max)})},
           {"points", d.points.size()},
           {"audit_clean", rep.clean()},
           {"violations", rep.violations.size()},
           {"levels", levels},
           {"notes", "mass-loss sets use an explicit query ball in place of the limit-dependent image set"}};
  if (rep.constants) out["delone_constants"] = to_json(*rep.constants);
  emit(g, out.dump(2) + "\n");
  write_manifest(g, "report", echo);
  return rep.clean() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density-driven Delone sets and distortion diagnostics"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  Options o;
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--seed", g.seed, "Seed for seeded fills and heuristics");
  app.add_option("--out", g.out, "Output file (stdout when omitted)");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* build_cmd = app.add_subcommand("build", "Build a Delone set window and audit it");
  build_cmd->add_option("--audit", o.audit_out, "Audit report path (default <out>.audit.json)");

  auto* audit_cmd = app.add_subcommand("audit", "Audit a built or loaded set against its config");
  audit_cmd->add_option("--in", o.input, "delone-v1 file to audit instead of the rebuilt set");

  auto* match_cmd = app.add_subcommand("match", "Minimal-distortion assignment between two point sets");
  match_cmd->add_option("--source", o.source, "Source delone-v1 file");
  match_cmd->add_option("--target", o.target, "Target delone-v1 file");
  match_cmd->add_option("--mode", o.mode, "lipschitz or bilipschitz");
  match_cmd->add_flag("--injection", o.injection, "Allow |source| < |target|");
  match_cmd->add_option("--method", o.method, "exact, heuristic or brute");
  match_cmd->add_option("--iterations", o.iterations, "Heuristic iterations per restart");
  match_cmd->add_option("--restarts", o.restarts, "Heuristic restarts");
  match_cmd->add_flag("--oracle", o.oracle, "Cross-check against brute force when under the cap");

  auto* analyze_cmd = app.add_subcommand("analyze", "Distortion statistics of a map-v1 file");
  analyze_cmd->add_option("--map", o.map, "map-v1 file");
  analyze_cmd->add_option("--stats", o.stats, "lipschitz, co_uniformity, order_gate, regularity")->delimiter(',');
  analyze_cmd->add_option("--radii", o.radii, "Radii as p/q, comma separated")->delimiter(',');
  analyze_cmd->add_option("--escape", o.escape, "Nested-ball spec JSON for the escape diagnostic");

  auto* measures_cmd = app.add_subcommand("measures", "Counting-measure discrepancy per level");
  measures_cmd->add_option("--in", o.input, "delone-v1 file replacing the rebuilt set");
  measures_cmd->add_option("--family", o.family, "dyadic:<depth> or cells");
  measures_cmd->add_option("--map", o.map, "Normalized map-v1 file for the mass-loss block");
  measures_cmd->add_option("--query", o.query, "Mass-loss query JSON {ball, coarse_denom, target_denom}");

  auto* plot_cmd = app.add_subcommand("plot", "SVG of a point set or CSV series");
  plot_cmd->add_option("--in", o.input, "delone-v1 or .csv file")->required();

  auto* report_cmd = app.add_subcommand("report", "Summary report of a build");
  report_cmd->add_option("--in", o.input, "delone-v1 file replacing the rebuilt set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (build_cmd->parsed()) return cmd_build(g, o);
    if (audit_cmd->parsed()) return cmd_audit(g, o);
    if (match_cmd->parsed()) return cmd_match(g, o);
    if (analyze_cmd->parsed()) return cmd_analyze(g, o);
    if (measures_cmd->parsed()) return cmd_measures(g, o);
    if (plot_cmd->parsed()) return cmd_plot(g, o);
    if (report_cmd->parsed()) return cmd_report(g, o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const json::exception& e) {
    std::cerr << "error: ParseError: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}
