#include <gtest/gtest.h>

#include <cmath>

#include "delone/construction.hpp"
#include "delone/errors.hpp"

using namespace delone;

namespace {

const DensitySpec kTrig = TrigDensity{1, Rational(1, 9)};

ScaleSchedule schedule(std::initializer_list<std::tuple<std::int64_t, std::int64_t, std::int64_t>> levels) {
  ScaleSchedule s;
  for (auto [l, m, ax] : levels) s.levels.push_back(Level{l, m, {ax, 0}});
  return s;
}

bool mentions(const std::vector<ScheduleViolation>& v, const std::string& text) {
  for (const auto& x : v)
    if (x.message.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(ValidateSchedule, AcceptsNestedScales) {
  EXPECT_TRUE(validate_schedule(schedule({{32, 2, 0}, {64, 4, 64}})).empty());
}

TEST(ValidateSchedule, ReportsDivisibility) {
  auto v = validate_schedule(schedule({{32, 2, 0}, {48, 2, 64}}));
  ASSERT_FALSE(v.empty());
  EXPECT_TRUE(mentions(v, "32 ∤ 48"));
  EXPECT_EQ(v.front().level, 1u);
}

TEST(ValidateSchedule, ReportsSmallCells) {
  auto v = validate_schedule(schedule({{8, 2, 0}, {16, 2, 64}}));
  EXPECT_TRUE(mentions(v, "s=4 < 16"));
}

TEST(ValidateSchedule, ReportsOverlap) {
  auto v = validate_schedule(schedule({{32, 2, 0}, {64, 4, 16}}));
  EXPECT_TRUE(mentions(v, "meets"));
}

TEST(RequiredPoints, Counts) {
  EXPECT_EQ(required_points(Cell{{0, 0}, 16}).size(), 192u);
  auto tiny = required_points(Cell{{0, 0}, 2});
  EXPECT_EQ(tiny, PointSet({{0, 0}, {1, 0}, {0, 1}}));
  EXPECT_THROW(required_points(Cell{{1, 0}, 16}), AlignmentError);
}

TEST(FillCell, QuotasAndDeterminism) {
  Cell c{{0, 0}, 16};
  EXPECT_EQ(fill_cell(c, 256, FillPolicy::row_major()).extras.size(), 64u);
  EXPECT_EQ(fill_cell(c, 192, FillPolicy::row_major()).extras.size(), 0u);
  auto a = fill_cell(c, 227, FillPolicy::seeded(42));
  auto b = fill_cell(c, 227, FillPolicy::seeded(42));
  EXPECT_EQ(a.extras.size(), 35u);
  EXPECT_EQ(a.extras, b.extras);
  for (auto p : a.extras.numerators()) EXPECT_TRUE(p.x % 2 != 0 && p.y % 2 != 0);
  auto other = fill_cell(c, 227, FillPolicy::seeded(43));
  EXPECT_FALSE(other.extras == a.extras);
}

TEST(FillCell, InfeasibleQuotaNamesBothNumbers) {
  Cell c{{0, 0}, 16};
  try {
    fill_cell(c, 191, {});
    FAIL();
  } catch (const InfeasibleQuota& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("191"), std::string::npos);
    EXPECT_NE(msg.find("192"), std::string::npos);
  }
  EXPECT_THROW(fill_cell(c, 257, {}), InfeasibleQuota);
}

TEST(Build, TrigLevelTotalAndAudit) {
  auto d = build(kTrig, schedule({{32, 2, 0}}), Box{16, 16, 24, true});
  std::int64_t total = 0;
  for (const auto& f : d.fills) {
    EXPECT_EQ(static_cast<std::int64_t>(d.points.query(f.cell.rect()).size()), f.quota);
    total += f.quota;
  }
  EXPECT_GE(total, static_cast<std::int64_t>(std::ceil(8.0 / 9.0 * 1024)) - 4);
  EXPECT_LE(total, 1024);
  auto rep = audit(d);
  EXPECT_TRUE(rep.clean()) << rep.violations.front().detail;
  ASSERT_TRUE(rep.constants.has_value());
  EXPECT_EQ(*rep.constants->separation, 1);
  EXPECT_LE(rep.constants->covering_radius, 1);
}

TEST(Build, ConstantOneIsTheLattice) {
  Box w{16, 16, 24, true};
  auto d = build(ConstantDensity{1}, schedule({{32, 2, 0}}), w);
  std::vector<LatticePoint> lattice;
  for (std::int64_t x = -8; x <= 40; ++x)
    for (std::int64_t y = -8; y <= 40; ++y) lattice.push_back({x, y});
  EXPECT_EQ(d.points, PointSet(lattice));
}

TEST(Build, RejectsBadInput) {
  EXPECT_THROW(build(kTrig, schedule({{32, 2, 0}, {48, 2, 64}}), Box{0, 0, 10, true}), ScheduleError);
  EXPECT_THROW(build(ConstantDensity{Rational(1, 2)}, schedule({{32, 2, 0}}), Box{0, 0, 10, true}), RangeError);
}

TEST(Audit, DeletedRequiredPointIsReportedOnce) {
  auto d = build(kTrig, schedule({{32, 2, 0}}), Box{16, 16, 24, true});
  LatticePoint victim{6, 7};  // interior, even x
  std::vector<LatticePoint> kept;
  for (auto p : d.points.numerators())
    if (p != victim) kept.push_back(p);
  d.points = PointSet(kept);
  auto rep = audit(d);
  std::size_t two_z2 = 0;
  for (const auto& v : rep.violations) {
    if (v.kind != "two_z2") continue;
    ++two_z2;
    EXPECT_EQ(v.witness, ScaledPoint(victim));
  }
  EXPECT_EQ(two_z2, 1u);
}

TEST(Audit, StrayOddPointIsReported) {
  auto d = build(kTrig, schedule({{32, 2, 0}}), Box{16, 16, 24, true});
  std::vector<LatticePoint> pts(d.points.numerators().begin(), d.points.numerators().end());
  // Find an odd-odd lattice point missing from the set and add it.
  for (std::int64_t y = 31; y > 0; y -= 2) {
    for (std::int64_t x = 31; x > 0; x -= 2) {
      if (!d.points.contains({x, y})) {
        pts.push_back({x, y});
        d.points = PointSet(pts);
        auto rep = audit(d);
        bool found = false;
        for (const auto& v : rep.violations) found = found || v.kind == "stray" || v.kind == "cell_count";
        EXPECT_TRUE(found);
        return;
      }
    }
  }
  FAIL() << "every odd-odd point was filled";
}

TEST(Membership, AgreesWithMaterializedPoints) {
  auto d = build(kTrig, schedule({{32, 2, 0}, {64, 4, 64}}), Box{64, 32, 70, true});
  for (std::int64_t x = -6; x <= 134; ++x)
    for (std::int64_t y = -38; y <= 102; ++y) EXPECT_EQ(in_delone_set(d, {x, y}), d.points.contains({x, y}));
}
