#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delone/density.hpp"
#include "delone/geometry.hpp"

namespace delone {

/// One square S_n = anchor + [0, side]^2, subdivided into subdivisions^2 cells.
struct Level {
  std::int64_t side = 0;          // l_n
  std::int64_t subdivisions = 0;  // m_n
  LatticePoint anchor;

  std::int64_t cell_side() const { return side / subdivisions; }
  Homothety homothety() const { return Homothety{anchor, side}; }
  /// Closed square S_n.
  Rect square() const;
  bool contains(LatticePoint p) const;
};

struct ScaleSchedule {
  std::vector<Level> levels;
};

/// Smallest admissible cell side; (8/9)s^2 - 1 >= (3/4)s^2 + 2s holds from here on.
inline constexpr std::int64_t kMinCellSide = 16;

struct ScheduleViolation {
  std::size_t level = 0;
  std::string message;
};

/// Every broken invariant, each tagged with the failing level index.
std::vector<ScheduleViolation> validate_schedule(const ScaleSchedule& schedule);

/// Half-open cell [anchor, anchor + side)^2.
struct Cell {
  LatticePoint anchor;
  std::int64_t side = 0;

  Rect rect() const;
};

/// Cell i of level n, indexed row-major from the bottom-left.
Cell level_cell(const Level& level, std::size_t index);

/// Points of the half-open cell lying in (2Z x Z) u (Z x 2Z). Throws AlignmentError
/// for odd anchors or sides.
PointSet required_points(const Cell& cell);

struct FillPolicy {
  enum class Kind { row_major, seeded };
  Kind kind = Kind::row_major;
  std::uint64_t seed = 0;

  static FillPolicy row_major() { return {}; }
  static FillPolicy seeded(std::uint64_t s) { return {Kind::seeded, s}; }
};

struct CellFill {
  std::size_t level = 0;
  std::size_t index = 0;
  Cell cell;
  PointSet required;
  PointSet extras;  // odd-odd points only
  std::int64_t quota = 0;
};

/// required u (quota - |required|) odd-odd points. Throws InfeasibleQuota.
CellFill fill_cell(const Cell& cell, std::int64_t quota, const FillPolicy& policy);

/// A materialized window of D_rho.
struct DeloneSet {
  ScaleSchedule schedule;
  DensitySpec density;
  Box window;
  FillPolicy policy;
  PointSet points;
  /// Fills for every level whose square meets the window, in (level, index) order.
  std::vector<CellFill> fills;

  /// True when S_n lies entirely inside the window.
  bool level_materialized(std::size_t n) const;
};

/// Builds D_rho inside `window`. Throws ScheduleError, RangeError,
/// AmbiguousFloor or InfeasibleQuota.
DeloneSet build(const DensitySpec& rho, const ScaleSchedule& schedule, const Box& window,
                const FillPolicy& policy = {});

/// Membership of a lattice point in D_rho as defined by the schedule and fills.
bool in_delone_set(const DeloneSet& d, LatticePoint p);

struct AuditViolation {
  std::string kind;  // cell_count | two_z2 | boundary | background | stray | separation | covering
  std::optional<std::size_t> level;
  std::optional<std::size_t> cell;
  ScaledPoint witness;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditViolation> violations;
  std::size_t cells_checked = 0;
  std::size_t points = 0;
  std::optional<DeloneConstants> constants;

  bool clean() const { return violations.empty(); }
};

AuditReport audit(const DeloneSet& d);

}  // namespace delone
