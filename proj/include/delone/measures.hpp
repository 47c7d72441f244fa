#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "delone/construction.hpp"
#include "delone/density.hpp"
#include "delone/distortion.hpp"
#include "delone/geometry.hpp"

namespace delone {

/// D_rho inside S_n mapped onto I^2; points carry denominator l_n.
struct NormalizedPatch {
  PointSet points;
  std::size_t level = 0;
  Level square;
};

/// Numerators of phi_n(p) over the denominator l_n (l_n is even).
LatticePoint normalize_point(const Level& level, LatticePoint p);
/// Inverse of normalize_point; nullopt when the point is not phi_n of a lattice point.
std::optional<LatticePoint> denormalize_point(const Level& level, const ScaledPoint& x);

/// Throws StateError unless the level is materialized.
NormalizedPatch normalize_patch(const DeloneSet& d, std::size_t n);

/// f_n(x) = (f(phi^-1 x) - f(phi^-1 base)) / l_n over the source points of f
/// inside S_n. `base` is given in normalized coordinates. Throws DomainError
/// when base is not a source point inside S_n.
BijectionTable normalize_map(const BijectionTable& f, const Level& level, const ScaledPoint& base);

/// |carrier n region| / scale^2.
struct CountingMeasure {
  PointSet carrier;
  std::int64_t scale = 1;

  std::int64_t normalizer() const { return scale * scale; }
};

using Region = std::variant<Rect, Box>;

Rational measure(const CountingMeasure& m, const Region& region);

/// Lattice (1/scale)Z^2 counted inside the region and normalized the same way.
Rational grid_measure(std::int64_t scale, const Region& region);

/// Measure of f^-1(region). Throws ShapeError when the carrier differs from f's source.
Rational pushforward(const BijectionTable& f, const CountingMeasure& m, const Region& region);

struct RectFamily {
  std::string name;
  std::vector<Rect> rects;
};

/// 4^depth half-open squares of side 2^-depth tiling I^2, row-major from the bottom-left.
RectFamily dyadic_family(int depth);
/// subdivisions^2 half-open cells tiling I^2.
RectFamily cell_family(std::int64_t subdivisions);
/// "dyadic:<depth>" or "cells" (which needs the level's subdivision count). Throws ParseError.
RectFamily parse_family(const std::string& spec, std::int64_t subdivisions);

struct DiscrepancyRow {
  std::size_t rect_id = 0;
  Rect rect;
  Rational mu;
  Rational nu;
  Real integral;
  Real abs_error;
};

struct Discrepancy {
  Real sup = 0;
  std::optional<std::size_t> argmax;  // empty family has no witness
  std::vector<DiscrepancyRow> rows;
};

/// sup over the family of |m(A) - integral of rho over A|.
Discrepancy discrepancy(const CountingMeasure& m, const DensitySpec& rho, const RectFamily& family);

struct MassLossReport {
  PointSet missing;  // denominator target_denom
  Rational normalized_mass;
  Rational band_width;  // largest distance from a missing point to the boundary of q
};

/// Grid points of q at denominator target_denom that are not images of f.
/// q's centre must lie on (1/coarse_denom)Z^2, otherwise AlignmentError.
MassLossReport mass_loss(const BijectionTable& f, const Box& q, std::int64_t target_denom,
                         std::int64_t coarse_denom);

struct SymdiffResult {
  bool pass = true;
  Rational shift;  // sup over the source of ||g(x) - h(x)||
  std::size_t symmetric_difference = 0;
  Rational worst_distance;  // largest distance to the boundary of g's image region
  std::optional<ScaledPoint> witness;
};

/// Image regions are unions of closed cells of side 1/D around image points
/// (D the target denominator). Every point of image(g) xor image(h) must lie
/// within `shift` of the boundary of g's region. Throws ShapeError when the
/// sources or target denominators differ.
SymdiffResult symdiff_band(const BijectionTable& g, const BijectionTable& h);

}  // namespace delone
