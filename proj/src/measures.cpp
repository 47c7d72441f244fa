#include "delone/measures.hpp"

#include <algorithm>
#include <charconv>

#include "delone/errors.hpp"
#include "delone/parallel.hpp"

namespace delone {

LatticePoint normalize_point(const Level& level, LatticePoint p) {
  const auto half = level.side / 2;
  return {p.x - level.anchor.x - half, p.y - level.anchor.y - half};
}

std::optional<LatticePoint> denormalize_point(const Level& level, const ScaledPoint& x) {
  const auto half = level.side / 2;
  auto gx = x.x() * level.side, gy = x.y() * level.side;
  if (!is_integral(gx) || !is_integral(gy)) return std::nullopt;
  return LatticePoint{gx.numerator() + level.anchor.x + half, gy.numerator() + level.anchor.y + half};
}

NormalizedPatch normalize_patch(const DeloneSet& d, std::size_t n) {
  if (n >= d.schedule.levels.size()) throw StateError("level " + std::to_string(n) + " is not in the schedule");
  if (!d.level_materialized(n)) throw StateError("level " + std::to_string(n) + " is not materialized");
  const auto& level = d.schedule.levels[n];
  std::vector<LatticePoint> pts;
  for (auto i : d.points.query(level.square())) pts.push_back(normalize_point(level, d.points[i]));
  return {PointSet(std::move(pts), level.side), n, level};
}

BijectionTable normalize_map(const BijectionTable& f, const Level& level, const ScaledPoint& base) {
  if (f.source().denom() != 1) throw DomainError("normalize_map expects a map defined on lattice points");
  auto b = denormalize_point(level, base);
  if (!b || !level.contains(*b)) throw DomainError("base point is not a lattice point of the square");
  auto bi = f.source().index_of(*b);
  if (!bi) throw DomainError("base point is not in the map's domain");

  const auto td = f.target().denom();
  const auto origin = f.target()[f.image_index(*bi)];
  std::vector<std::pair<LatticePoint, LatticePoint>> pairs;
  for (auto i : f.source().query(level.square())) {
    auto img = f.target()[f.image_index(i)];
    pairs.emplace_back(normalize_point(level, f.source()[i]), LatticePoint{img.x - origin.x, img.y - origin.y});
  }
  return BijectionTable::from_pairs(pairs, level.side, td * level.side);
}

namespace {

std::vector<std::size_t> region_query(const PointSet& s, const Region& region) {
  return std::visit([&](const auto& r) { return s.query(r); }, region);
}

std::pair<NumeratorRange, NumeratorRange> region_ranges(const Region& region, std::int64_t denom) {
  if (const auto* r = std::get_if<Rect>(&region)) {
    return {numerator_range(r->x0, true, r->x1, !r->half_open, denom),
            numerator_range(r->y0, true, r->y1, !r->half_open, denom)};
  }
  const auto& b = std::get<Box>(region);
  return {numerator_range(b.xmin(), b.closed, b.xmax(), b.closed, denom),
          numerator_range(b.ymin(), b.closed, b.ymax(), b.closed, denom)};
}

}  // namespace

Rational measure(const CountingMeasure& m, const Region& region) {
  auto count = static_cast<std::int64_t>(region_query(m.carrier, region).size());
  return Rational(count, m.normalizer());
}

Rational grid_measure(std::int64_t scale, const Region& region) {
  auto [xr, yr] = region_ranges(region, scale);
  if (xr.empty() || yr.empty()) return Rational(0);
  return Rational((xr.hi - xr.lo + 1) * (yr.hi - yr.lo + 1), scale * scale);
}

Rational pushforward(const BijectionTable& f, const CountingMeasure& m, const Region& region) {
  if (!(m.carrier == f.source())) throw ShapeError("measure carrier differs from the map's source");
  // Preimage count equals image count since f is a bijection onto its target.
  auto count = static_cast<std::int64_t>(region_query(f.target(), region).size());
  return Rational(count, m.normalizer());
}

RectFamily dyadic_family(int depth) {
  if (depth < 0 || depth > 12) throw DomainError("dyadic depth must lie in [0, 12]");
  const std::int64_t k = std::int64_t{1} << depth;
  RectFamily fam{"dyadic:" + std::to_string(depth), {}};
  for (std::int64_t j = 0; j < k; ++j) {
    for (std::int64_t i = 0; i < k; ++i) {
      fam.rects.push_back(Rect{Rational(2 * i - k, 2 * k), Rational(2 * j - k, 2 * k), Rational(2 * i + 2 - k, 2 * k),
                               Rational(2 * j + 2 - k, 2 * k), true});
    }
  }
  return fam;
}

RectFamily cell_family(std::int64_t subdivisions) {
  if (subdivisions <= 0) throw DomainError("cell family needs a positive subdivision count");
  const auto m = subdivisions;
  RectFamily fam{"cells", {}};
  for (std::int64_t j = 0; j < m; ++j) {
    for (std::int64_t i = 0; i < m; ++i) {
      fam.rects.push_back(Rect{Rational(2 * i - m, 2 * m), Rational(2 * j - m, 2 * m), Rational(2 * i + 2 - m, 2 * m),
                               Rational(2 * j + 2 - m, 2 * m), true});
    }
  }
  return fam;
}

RectFamily parse_family(const std::string& spec, std::int64_t subdivisions) {
  if (spec == "cells") return cell_family(subdivisions);
  if (spec.starts_with("dyadic:")) {
    int depth = -1;
    const char* first = spec.data() + 7;
    const char* last = spec.data() + spec.size();
    auto [ptr, ec] = std::from_chars(first, last, depth);
    if (ec == std::errc{} && ptr == last && first != last) return dyadic_family(depth);
  }
  throw ParseError("unknown rectangle family '" + spec + "' (expected cells or dyadic:<depth>)");
}

Discrepancy discrepancy(const CountingMeasure& m, const DensitySpec& rho, const RectFamily& family) {
  Discrepancy out;
  out.rows.resize(family.rects.size());
  parallel_for(family.rects.size(), [&](std::size_t i) {
    const auto& r = family.rects[i];
    auto& row = out.rows[i];
    row.rect_id = i;
    row.rect = r;
    row.mu = measure(m, r);
    row.nu = grid_measure(m.scale, r);
    row.integral = integrate(rho, r).value;
    row.abs_error = abs(to_real(row.mu) - row.integral);
  });
  for (const auto& row : out.rows) {
    if (!out.argmax || row.abs_error > out.sup) {
      out.sup = row.abs_error;
      out.argmax = row.rect_id;
    }
  }
  return out;
}

MassLossReport mass_loss(const BijectionTable& f, const Box& q, std::int64_t target_denom, std::int64_t coarse_denom) {
  if (target_denom <= 0 || coarse_denom <= 0) throw DomainError("denominators must be positive");
  if (!is_integral(q.cx * coarse_denom) || !is_integral(q.cy * coarse_denom)) {
    throw AlignmentError("query centre (" + to_string(q.cx) + ", " + to_string(q.cy) + ") is not on the grid of step 1/" +
                         std::to_string(coarse_denom));
  }
  auto [xr, yr] = region_ranges(q, target_denom);
  std::vector<LatticePoint> missing;
  Rational band(0);
  for (auto y = yr.lo; y <= yr.hi; ++y) {
    for (auto x = xr.lo; x <= xr.hi; ++x) {
      ScaledPoint p(x, y, target_denom);
      if (f.target().index_of(p)) continue;
      missing.push_back({x, y});
      band = std::max(band, q.radius - std::max(abs(p.x() - q.cx), abs(p.y() - q.cy)));
    }
  }
  auto n = static_cast<std::int64_t>(missing.size());
  return {PointSet(std::move(missing), target_denom), Rational(n, target_denom * target_denom), band};
}

namespace {

// Sup-distance from grid numerator p to the nearest grid point outside `image`.
std::int64_t ring_to_complement(const PointSet& image, LatticePoint p) {
  for (std::int64_t k = 1;; ++k) {
    for (std::int64_t t = -k; t <= k; ++t) {
      for (LatticePoint c : {LatticePoint{p.x + t, p.y - k}, LatticePoint{p.x + t, p.y + k},
                             LatticePoint{p.x - k, p.y + t}, LatticePoint{p.x + k, p.y + t}}) {
        if (!image.contains(c)) return k;
      }
    }
  }
}

}  // namespace

SymdiffResult symdiff_band(const BijectionTable& g, const BijectionTable& h) {
  if (!(g.source() == h.source())) throw ShapeError("symdiff_band needs maps on the same source");
  if (g.target().denom() != h.target().denom()) throw ShapeError("symdiff_band needs a common target denominator");
  const auto D = g.target().denom();
  SymdiffResult out;
  for (std::size_t i = 0; i < g.size(); ++i) out.shift = std::max(out.shift, sup_dist(g.image(i), h.image(i)));

  const Rational half_cell(1, 2 * D);
  auto consider = [&](const ScaledPoint& p, const Rational& dist) {
    ++out.symmetric_difference;
    if (!out.witness || dist > out.worst_distance) {
      out.worst_distance = dist;
      out.witness = p;
    }
  };
  // Points only in h's image sit outside g's region: distance to its nearest cell.
  for (std::size_t t = 0; t < h.target().size(); ++t) {
    if (g.target().contains(h.target()[t])) continue;
    auto p = h.target().at(t);
    consider(p, nearest(g.target(), p).first - half_cell);
  }
  // Points only in g's image sit inside: distance to the nearest cell not in the region.
  for (std::size_t t = 0; t < g.target().size(); ++t) {
    if (h.target().contains(g.target()[t])) continue;
    auto k = ring_to_complement(g.target(), g.target()[t]);
    consider(g.target().at(t), Rational(k, D) - half_cell);
  }
  out.pass = !out.witness || out.worst_distance <= out.shift;
  return out;
}

}  // namespace delone
