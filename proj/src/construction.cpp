#include "delone/construction.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "delone/errors.hpp"
#include "delone/parallel.hpp"

namespace delone {

namespace {

bool even(std::int64_t v) { return v % 2 == 0; }

bool in_two_z2(LatticePoint p) { return even(p.x) || even(p.y); }

std::string fmt_point(LatticePoint p) { return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")"; }

bool squares_overlap(const Level& a, const Level& b) {
  return a.anchor.x <= b.anchor.x + b.side && b.anchor.x <= a.anchor.x + a.side &&
         a.anchor.y <= b.anchor.y + b.side && b.anchor.y <= a.anchor.y + a.side;
}

bool square_meets_window(const Level& level, const Box& w) {
  auto sq = level.square();
  return sq.x0 <= w.xmax() && w.xmin() <= sq.x1 && sq.y0 <= w.ymax() && w.ymin() <= sq.y1;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Index of the first fill of `level` (fills are sorted by level then index).
std::size_t first_fill(const DeloneSet& d, std::size_t level) {
  auto it = std::lower_bound(d.fills.begin(), d.fills.end(), level,
                             [](const CellFill& f, std::size_t n) { return f.level < n; });
  if (it == d.fills.end() || it->level != level) {
    throw StateError("level " + std::to_string(level) + " has no cell fills (square outside the window)");
  }
  return static_cast<std::size_t>(it - d.fills.begin());
}

}  // namespace

Rect Level::square() const {
  return Rect{Rational(anchor.x), Rational(anchor.y), Rational(anchor.x + side), Rational(anchor.y + side), false};
}

bool Level::contains(LatticePoint p) const {
  return p.x >= anchor.x && p.x <= anchor.x + side && p.y >= anchor.y && p.y <= anchor.y + side;
}

Rect Cell::rect() const {
  return Rect{Rational(anchor.x), Rational(anchor.y), Rational(anchor.x + side), Rational(anchor.y + side), true};
}

std::vector<ScheduleViolation> validate_schedule(const ScaleSchedule& schedule) {
  std::vector<ScheduleViolation> out;
  auto add = [&](std::size_t n, std::string msg) { out.push_back({n, std::move(msg)}); };
  const auto& lv = schedule.levels;
  for (std::size_t n = 0; n < lv.size(); ++n) {
    const auto& L = lv[n];
    auto l = L.side, m = L.subdivisions;
    if (l <= 0 || !even(l)) add(n, "l=" + std::to_string(l) + " is not an even positive integer");
    if (m <= 0 || !even(m)) add(n, "m=" + std::to_string(m) + " is not an even positive integer");
    if (!even(L.anchor.x) || !even(L.anchor.y)) add(n, "anchor " + fmt_point(L.anchor) + " has an odd coordinate");
    if (m > 0 && l % m != 0) {
      add(n, std::to_string(m) + " ∤ " + std::to_string(l) + " (m must divide l)");
    } else if (m > 0 && l > 0) {
      auto s = l / m;
      if (!even(s)) add(n, "s=" + std::to_string(s) + " is odd");
      if (s < kMinCellSide) add(n, "s=" + std::to_string(s) + " < " + std::to_string(kMinCellSide));
    }
    if (n > 0) {
      const auto& P = lv[n - 1];
      if (P.side > 0 && l % P.side != 0) add(n, std::to_string(P.side) + " ∤ " + std::to_string(l));
      if (l < P.side) add(n, "l decreases: " + std::to_string(P.side) + " > " + std::to_string(l));
      if (m < P.subdivisions) add(n, "m decreases: " + std::to_string(P.subdivisions) + " > " + std::to_string(m));
      if (m > 0 && P.subdivisions > 0 && l / m < P.side / P.subdivisions) {
        add(n, "s decreases: " + std::to_string(P.side / P.subdivisions) + " > " + std::to_string(l / m));
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (squares_overlap(lv[k], L)) add(n, "square S_" + std::to_string(n) + " meets S_" + std::to_string(k));
    }
  }
  return out;
}

Cell level_cell(const Level& level, std::size_t index) {
  auto s = level.cell_side();
  auto m = static_cast<std::size_t>(level.subdivisions);
  auto row = static_cast<std::int64_t>(index / m), col = static_cast<std::int64_t>(index % m);
  return Cell{{level.anchor.x + col * s, level.anchor.y + row * s}, s};
}

PointSet required_points(const Cell& cell) {
  if (!even(cell.side) || cell.side <= 0 || !even(cell.anchor.x) || !even(cell.anchor.y)) {
    throw AlignmentError("cell at " + fmt_point(cell.anchor) + " with side " + std::to_string(cell.side) +
                         " is not even-aligned");
  }
  std::vector<LatticePoint> pts;
  pts.reserve(static_cast<std::size_t>(cell.side * cell.side * 3 / 4));
  for (auto x = cell.anchor.x; x < cell.anchor.x + cell.side; ++x) {
    for (auto y = cell.anchor.y; y < cell.anchor.y + cell.side; ++y) {
      if (in_two_z2({x, y})) pts.push_back({x, y});
    }
  }
  return PointSet(std::move(pts));
}

CellFill fill_cell(const Cell& cell, std::int64_t quota, const FillPolicy& policy) {
  auto required = required_points(cell);
  auto need = static_cast<std::int64_t>(required.size());
  auto total = cell.side * cell.side;
  if (quota < need || quota > total) {
    throw InfeasibleQuota("cell at " + fmt_point(cell.anchor) + ": quota " + std::to_string(quota) +
                          " outside [" + std::to_string(need) + ", " + std::to_string(total) + "]");
  }
  // Odd-odd points in row-major order: rows bottom to top, left to right.
  std::vector<LatticePoint> odd;
  for (auto y = cell.anchor.y + 1; y < cell.anchor.y + cell.side; y += 2) {
    for (auto x = cell.anchor.x + 1; x < cell.anchor.x + cell.side; x += 2) odd.push_back({x, y});
  }
  if (policy.kind == FillPolicy::Kind::seeded) {
    // Own Fisher-Yates: std::shuffle's output is implementation-defined.
    auto mix = splitmix64(policy.seed ^ splitmix64(static_cast<std::uint64_t>(cell.anchor.x) * 0x100000001b3ULL ^
                                                   static_cast<std::uint64_t>(cell.anchor.y)));
    std::mt19937_64 rng(mix);
    for (std::size_t i = odd.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(rng() % i);
      std::swap(odd[i - 1], odd[j]);
    }
  }
  odd.resize(static_cast<std::size_t>(quota - need));
  return CellFill{0, 0, cell, std::move(required), PointSet(std::move(odd)), quota};
}

bool DeloneSet::level_materialized(std::size_t n) const {
  auto sq = schedule.levels.at(n).square();
  auto inside = [&](const Rational& lo, const Rational& hi, const Rational& wlo, const Rational& whi) {
    return window.closed ? (wlo <= lo && hi <= whi) : (wlo < lo && hi < whi);
  };
  return inside(sq.x0, sq.x1, window.xmin(), window.xmax()) && inside(sq.y0, sq.y1, window.ymin(), window.ymax());
}

bool in_delone_set(const DeloneSet& d, LatticePoint p) {
  for (std::size_t n = 0; n < d.schedule.levels.size(); ++n) {
    const auto& L = d.schedule.levels[n];
    if (!L.contains(p)) continue;
    if (in_two_z2(p)) return true;
    // Odd-odd points never sit on the (even) top or right edge of S_n.
    auto s = L.cell_side();
    auto col = (p.x - L.anchor.x) / s, row = (p.y - L.anchor.y) / s;
    auto idx = static_cast<std::size_t>(row * L.subdivisions + col);
    const auto& fill = d.fills[first_fill(d, n) + idx];
    return fill.extras.contains(p);
  }
  return true;
}

DeloneSet build(const DensitySpec& rho, const ScaleSchedule& schedule, const Box& window, const FillPolicy& policy) {
  auto violations = validate_schedule(schedule);
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + ("level " + std::to_string(v.level) + ": " + v.message);
    throw ScheduleError(msg);
  }
  certify_range(rho);

  DeloneSet d{schedule, rho, window, policy, {}, {}};
  struct Job {
    std::size_t level, index;
  };
  std::vector<Job> jobs;
  for (std::size_t n = 0; n < schedule.levels.size(); ++n) {
    const auto& L = schedule.levels[n];
    if (!square_meets_window(L, window)) continue;
    auto cells = static_cast<std::size_t>(L.subdivisions * L.subdivisions);
    for (std::size_t i = 0; i < cells; ++i) jobs.push_back({n, i});
  }
  d.fills.resize(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto& L = schedule.levels[jobs[j].level];
    auto cell = level_cell(L, jobs[j].index);
    auto quota = cell_quota(rho, L.homothety(), cell.rect());
    auto fill = fill_cell(cell, quota, policy);
    fill.level = jobs[j].level;
    fill.index = jobs[j].index;
    d.fills[j] = std::move(fill);
  });

  auto xr = numerator_range(window.xmin(), window.closed, window.xmax(), window.closed, 1);
  auto yr = numerator_range(window.ymin(), window.closed, window.ymax(), window.closed, 1);
  std::vector<LatticePoint> pts;
  for (auto x = xr.lo; x <= xr.hi; ++x) {
    for (auto y = yr.lo; y <= yr.hi; ++y) {
      if (in_delone_set(d, {x, y})) pts.push_back({x, y});
    }
  }
  d.points = PointSet(std::move(pts));
  return d;
}

AuditReport audit(const DeloneSet& d) {
  AuditReport rep;
  rep.points = d.points.size();
  auto add = [&](std::string kind, std::optional<std::size_t> level, std::optional<std::size_t> cell,
                 ScaledPoint w, std::string detail) {
    rep.violations.push_back({std::move(kind), level, cell, w, std::move(detail)});
  };
  auto level_of = [&](LatticePoint p) -> std::optional<std::size_t> {
    for (std::size_t n = 0; n < d.schedule.levels.size(); ++n) {
      if (d.schedule.levels[n].contains(p)) return n;
    }
    return std::nullopt;
  };

  if (d.points.denom() != 1) add("stray", {}, {}, {}, "point set is not integral (denom != 1)");
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    if (!d.window.contains(d.points.at(i))) add("stray", {}, {}, d.points.at(i), "point outside the window");
  }

  // Lattice sweep: the 2Z^2-property, background lattice, and unexpected odd-odd points.
  auto xr = numerator_range(d.window.xmin(), d.window.closed, d.window.xmax(), d.window.closed, 1);
  auto yr = numerator_range(d.window.ymin(), d.window.closed, d.window.ymax(), d.window.closed, 1);
  for (auto x = xr.lo; x <= xr.hi; ++x) {
    for (auto y = yr.lo; y <= yr.hi; ++y) {
      LatticePoint p{x, y};
      bool present = d.points.contains(p);
      auto lvl = level_of(p);
      if (in_two_z2(p)) {
        if (!present) add("two_z2", lvl, {}, p, "required point of (2Z x Z) u (Z x 2Z) missing");
      } else if (!lvl) {
        if (!present) add("background", {}, {}, p, "lattice point outside every S_n missing");
      } else if (present && !in_delone_set(d, p)) {
        add("stray", lvl, {}, p, "odd-odd point not among the cell's extras");
      }
    }
  }

  for (const auto& fill : d.fills) {
    if (!d.level_materialized(fill.level)) continue;
    const auto& L = d.schedule.levels[fill.level];
    ++rep.cells_checked;
    auto expected = cell_quota(d.density, L.homothety(), fill.cell.rect());
    auto count = static_cast<std::int64_t>(d.points.query(fill.cell.rect()).size());
    if (count != expected || fill.quota != expected) {
      add("cell_count", fill.level, fill.index, fill.cell.anchor,
          "count " + std::to_string(count) + ", recorded quota " + std::to_string(fill.quota) + ", expected " +
              std::to_string(expected));
    }
    const auto& c = fill.cell;
    std::set<LatticePoint> ring;
    for (std::int64_t t = 0; t <= c.side; ++t) {
      ring.insert({{c.anchor.x + t, c.anchor.y}, {c.anchor.x + t, c.anchor.y + c.side}, {c.anchor.x, c.anchor.y + t},
                   {c.anchor.x + c.side, c.anchor.y + t}});
    }
    for (auto p : ring) {
      if (!d.points.contains(p)) add("boundary", fill.level, fill.index, p, "cell boundary lattice point missing");
    }
  }

  if (!d.points.empty() && !d.points.query(d.window).empty()) {
    auto dc = delone_constants(d.points, d.window);
    if (dc.separation && *dc.separation != 1) {
      add("separation", {}, {}, dc.separation_witness->first, "separation " + to_string(*dc.separation) + " != 1");
    }
    if (dc.covering_radius > 1) {
      add("covering", {}, {}, dc.covering_witness, "covering radius " + to_string(dc.covering_radius) + " > 1");
    }
    rep.constants = dc;
  }
  return rep;
}

}  // namespace delone
