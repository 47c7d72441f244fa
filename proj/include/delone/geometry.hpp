#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "delone/rational.hpp"

namespace delone {

/// A point of Z^2. Also used for the integer numerators of a ScaledPoint.
struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

/// The point (num_x / denom, num_y / denom). Equality compares the exact
/// rational values, so (2, 4)/2 == (1, 2)/1.
struct ScaledPoint {
  std::int64_t num_x = 0;
  std::int64_t num_y = 0;
  std::int64_t denom = 1;

  ScaledPoint() = default;
  ScaledPoint(std::int64_t nx, std::int64_t ny, std::int64_t d = 1) : num_x(nx), num_y(ny), denom(d) {}
  ScaledPoint(LatticePoint p) : num_x(p.x), num_y(p.y), denom(1) {}

  Rational x() const { return Rational(num_x, denom); }
  Rational y() const { return Rational(num_y, denom); }

  friend bool operator==(const ScaledPoint& a, const ScaledPoint& b) {
    return a.x() == b.x() && a.y() == b.y();
  }
};

std::int64_t sup_dist(LatticePoint p, LatticePoint q);
Rational sup_dist(const ScaledPoint& p, const ScaledPoint& q);
Rational sup_norm(const ScaledPoint& p);

/// Sup-norm ball centred at (cx, cy). Closed unless `closed` is false.
struct Box {
  Rational cx, cy, radius;
  bool closed = true;

  bool contains(const ScaledPoint& p) const;
  Rational xmin() const { return cx - radius; }
  Rational xmax() const { return cx + radius; }
  Rational ymin() const { return cy - radius; }
  Rational ymax() const { return cy + radius; }
};

/// Axis-aligned rectangle [x0,x1] x [y0,y1], or [x0,x1) x [y0,y1) when half_open.
struct Rect {
  Rational x0, y0, x1, y1;
  bool half_open = false;

  bool contains(const ScaledPoint& p) const;
  Rational area() const { return (x1 - x0) * (y1 - y0); }
};

/// {y : inner < ||y - c|| <= outer}.
struct Annulus {
  Rational cx, cy, inner, outer;

  bool contains(const ScaledPoint& p) const;
};

/// Integer numerators n with n/denom inside an interval; empty when lo > hi.
struct NumeratorRange {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  bool empty() const { return lo > hi; }
};

NumeratorRange numerator_range(const Rational& a, bool a_closed, const Rational& b, bool b_closed,
                               std::int64_t denom);

/// Finite point set with a common denominator. Points are kept sorted
/// lexicographically and indexed by a coarse grid of buckets.
class PointSet {
 public:
  PointSet() = default;

  /// Throws DuplicatePoint when a numerator pair repeats.
  explicit PointSet(std::vector<LatticePoint> numerators, std::int64_t denom = 1, std::int64_t cell = 0);

  std::int64_t denom() const { return denom_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  std::span<const LatticePoint> numerators() const { return points_; }
  const LatticePoint& operator[](std::size_t i) const { return points_[i]; }
  ScaledPoint at(std::size_t i) const { return {points_[i].x, points_[i].y, denom_}; }

  std::optional<std::size_t> index_of(LatticePoint numer) const;
  /// Exact lookup of a point that may carry a different denominator.
  std::optional<std::size_t> index_of(const ScaledPoint& p) const;
  bool contains(LatticePoint numer) const { return index_of(numer).has_value(); }

  std::vector<std::size_t> query(const Box& b) const;
  std::vector<std::size_t> query(const Rect& r) const;
  /// Indices with numerators in [xr.lo, xr.hi] x [yr.lo, yr.hi].
  std::vector<std::size_t> query(NumeratorRange xr, NumeratorRange yr) const;

  /// Sub-set with the given indices (same denominator).
  PointSet subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.denom_ == b.denom_ && a.points_ == b.points_;
  }

 private:
  static std::uint64_t key(std::int64_t bx, std::int64_t by);
  std::int64_t bucket_of(std::int64_t v) const;

  std::vector<LatticePoint> points_;
  std::int64_t denom_ = 1;
  std::int64_t cell_ = 1;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

/// Members of `set` inside `b`.
PointSet ball_query(const PointSet& set, const Box& b);

/// Nearest member under the sup-norm: (distance, index). Throws EmptyInput.
std::pair<Rational, std::size_t> nearest(const PointSet& set, const ScaledPoint& q);

enum class SeparationMode { exact, greedy };

/// Largest exact search accepted by max_separated_subset.
inline constexpr std::size_t kExactSeparationCap = 30;

struct SeparatedSet {
  PointSet points;
  Rational gap;
  SeparationMode mode = SeparationMode::greedy;
};

/// Subset with all pairwise sup-distances >= gap. Greedy scans in
/// lexicographic order and is maximal; exact is maximum (|set| <= 30).
SeparatedSet max_separated_subset(const PointSet& set, const Rational& gap, SeparationMode mode);

/// Same search restricted to `candidates` (indices into `set`); returns indices.
std::vector<std::size_t> max_separated_indices(const PointSet& set, std::span<const std::size_t> candidates,
                                               const Rational& gap, SeparationMode mode);

struct DeloneConstants {
  /// Minimum pairwise distance; empty when fewer than two points lie in the window.
  std::optional<Rational> separation;
  Rational covering_radius;
  std::optional<std::pair<ScaledPoint, ScaledPoint>> separation_witness;
  ScaledPoint covering_witness;
};

/// Separation over points inside `window`; covering radius as the maximum
/// distance-to-set over the half-step grid of the window.
DeloneConstants delone_constants(const PointSet& set, const Box& window);

}  // namespace delone
