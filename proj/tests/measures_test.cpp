#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "delone/errors.hpp"
#include "delone/measures.hpp"

using namespace delone;

namespace {

using Pairs = std::vector<std::pair<LatticePoint, LatticePoint>>;

Pairs grid_pairs(std::int64_t lo, std::int64_t hi, LatticePoint shift = {0, 0}) {
  Pairs p;
  for (auto x = lo; x <= hi; ++x)
    for (auto y = lo; y <= hi; ++y) p.push_back({{x, y}, {x + shift.x, y + shift.y}});
  return p;
}

ScaleSchedule one_level(std::int64_t l, std::int64_t m) {
  ScaleSchedule s;
  s.levels.push_back(Level{l, m, {0, 0}});
  return s;
}

Rect random_rect(std::mt19937_64& rng, std::int64_t span, std::int64_t denom) {
  std::uniform_int_distribution<std::int64_t> u(-span, span);
  auto a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  if (a > b) std::swap(a, b);
  if (c > d) std::swap(c, d);
  return Rect{Rational(a, denom), Rational(c, denom), Rational(b + 1, denom), Rational(d + 1, denom), rng() % 2 == 0};
}

}  // namespace

TEST(Normalize, CornerAndCentre) {
  Level lev{64, 4, {64, 0}};
  auto corner = normalize_point(lev, {64, 0});
  EXPECT_EQ(ScaledPoint(corner.x, corner.y, 64), ScaledPoint(-1, -1, 2));
  auto centre = normalize_point(lev, {96, 32});
  EXPECT_EQ(ScaledPoint(centre.x, centre.y, 64), ScaledPoint(0, 0));
  EXPECT_EQ(*denormalize_point(lev, ScaledPoint(-1, -1, 2)), (LatticePoint{64, 0}));
  EXPECT_FALSE(denormalize_point(lev, ScaledPoint(1, 0, 128)).has_value());
}

TEST(Normalize, PatchNeedsAMaterializedLevel) {
  auto d = build(ConstantDensity{1}, one_level(32, 2), Box{16, 16, 20, true});
  auto patch = normalize_patch(d, 0);
  EXPECT_EQ(patch.points.size(), 33u * 33u);
  EXPECT_EQ(patch.points.denom(), 32);
  auto small = build(ConstantDensity{1}, one_level(32, 2), Box{16, 16, 8, true});
  EXPECT_THROW(normalize_patch(small, 0), StateError);
  EXPECT_THROW(normalize_patch(d, 1), StateError);
}

TEST(Normalize, IdentityMapBecomesTheIdentityOnThePatch) {
  Level lev{16, 1, {0, 0}};
  auto f = BijectionTable::from_pairs(grid_pairs(-4, 20));
  auto fn = normalize_map(f, lev, ScaledPoint(0, 0));
  Pairs want;
  for (std::int64_t x = -8; x <= 8; ++x)
    for (std::int64_t y = -8; y <= 8; ++y) want.push_back({{x, y}, {x, y}});
  EXPECT_EQ(fn, BijectionTable::from_pairs(want, 16, 16));
  EXPECT_THROW(normalize_map(f, lev, ScaledPoint(1, 0)), DomainError);
}

TEST(Measure, GridOnTheClosedSquare) {
  for (std::int64_t l : {4, 32, 100}) EXPECT_EQ(grid_measure(l, unit_square()), Rational((l + 1) * (l + 1), l * l));
  Rect half_open{Rational(-1, 2), Rational(-1, 2), Rational(1, 2), Rational(1, 2), true};
  EXPECT_EQ(grid_measure(32, half_open), 1);
}

TEST(Measure, CountsTheCarrier) {
  CountingMeasure m{PointSet({{0, 0}, {1, 0}, {5, 5}}, 4), 4};
  EXPECT_EQ(measure(m, Box{0, 0, Rational(1, 4), true}), Rational(2, 16));
  EXPECT_EQ(measure(m, Box{0, 0, Rational(1, 4), false}), Rational(1, 16));
}

TEST(Pushforward, IdentityAndTranslation) {
  auto id = BijectionTable::from_pairs(grid_pairs(-6, 6));
  CountingMeasure m{id.source(), 1};
  Rect r{-2, -2, 3, 1, true};
  EXPECT_EQ(pushforward(id, m, r), measure(m, r));

  auto shift = BijectionTable::from_pairs(grid_pairs(-6, 6, {2, -1}));
  Rect moved{0, -3, 5, 0, true};
  EXPECT_EQ(pushforward(shift, m, moved), measure(m, r));
  EXPECT_EQ(pushforward(shift, m, Rect{-100, -100, 100, 100, false}), measure(m, Rect{-100, -100, 100, 100, false}));

  CountingMeasure other{PointSet({{0, 0}}), 1};
  EXPECT_THROW(pushforward(id, other, r), ShapeError);
}

TEST(Pushforward, RandomBijectionCountsPreimages) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::int64_t> u(-30, 30);
  std::vector<LatticePoint> src, tgt;
  auto fill = [&](std::vector<LatticePoint>& v) {
    while (v.size() < 100) {
      LatticePoint p{u(rng), u(rng)};
      if (std::find(v.begin(), v.end(), p) == v.end()) v.push_back(p);
    }
  };
  fill(src);
  fill(tgt);
  std::shuffle(tgt.begin(), tgt.end(), rng);
  Pairs pairs;
  for (std::size_t i = 0; i < 100; ++i) pairs.push_back({src[i], tgt[i]});
  auto f = BijectionTable::from_pairs(pairs, 2, 2);
  CountingMeasure m{f.source(), 2};
  for (int k = 0; k < 20; ++k) {
    auto region = random_rect(rng, 30, 2);
    std::int64_t count = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (region.contains(f.image(i))) ++count;
    EXPECT_EQ(pushforward(f, m, region), Rational(count, 4));
  }
}

TEST(Families, DyadicAndCells) {
  auto d = dyadic_family(2);
  ASSERT_EQ(d.rects.size(), 16u);
  EXPECT_EQ(d.rects[0].x0, Rational(-1, 2));
  EXPECT_EQ(d.rects[1].x0, Rational(-1, 4));
  EXPECT_EQ(d.rects[4].y0, Rational(-1, 4));
  EXPECT_TRUE(d.rects[0].half_open);
  EXPECT_EQ(parse_family("cells", 3).rects.size(), 9u);
  EXPECT_EQ(parse_family("dyadic:3", 3).rects.size(), 64u);
  EXPECT_THROW(parse_family("dyadic:", 3), ParseError);
  EXPECT_THROW(parse_family("triangles", 3), ParseError);
  EXPECT_THROW(dyadic_family(13), DomainError);
}

TEST(Discrepancy, ConstantDensityOnHalfOpenCellsIsZero) {
  auto d = build(ConstantDensity{1}, one_level(64, 4), Box{32, 32, 40, true});
  auto patch = normalize_patch(d, 0);
  CountingMeasure m{patch.points, 64};
  auto disc = discrepancy(m, ConstantDensity{1}, cell_family(4));
  EXPECT_EQ(disc.sup, 0);
  ASSERT_EQ(disc.rows.size(), 16u);
  for (const auto& row : disc.rows) EXPECT_EQ(row.mu, Rational(1, 16));
}

TEST(Discrepancy, EmptyFamily) {
  CountingMeasure m{PointSet({{0, 0}}), 4};
  auto disc = discrepancy(m, ConstantDensity{1}, RectFamily{"none", {}});
  EXPECT_EQ(disc.sup, 0);
  EXPECT_FALSE(disc.argmax.has_value());
}

TEST(Discrepancy, TrigCellsStayBelowTheCellBound) {
  auto d = build(TrigDensity{1, Rational(1, 9)}, one_level(64, 4), Box{32, 32, 40, true});
  auto patch = normalize_patch(d, 0);
  auto disc = discrepancy(CountingMeasure{patch.points, 64}, TrigDensity{1, Rational(1, 9)}, cell_family(4));
  EXPECT_LE(static_cast<double>(disc.sup), 16.0 / 4096.0 + 1e-6);
  ASSERT_TRUE(disc.argmax.has_value());
  EXPECT_EQ(disc.rows[*disc.argmax].abs_error, disc.sup);
}

TEST(MassLoss, IdentityOnTheFullGridLosesNothing) {
  auto f = BijectionTable::from_pairs(grid_pairs(-8, 8), 8, 8);
  auto rep = mass_loss(f, Box{0, 0, Rational(1, 2), true}, 8, 2);
  EXPECT_EQ(rep.missing.size(), 0u);
  EXPECT_EQ(rep.normalized_mass, 0);
  EXPECT_THROW(mass_loss(f, Box{Rational(1, 8), 0, Rational(1, 4), true}, 8, 2), AlignmentError);
}

TEST(MassLoss, TeleportedCentreSitsDeepInside) {
  auto pairs = grid_pairs(-5, 5);
  for (auto& [s, t] : pairs)
    if (s == LatticePoint{0, 0}) t = {100, 0};
  auto rep = mass_loss(BijectionTable::from_pairs(pairs), Box{0, 0, 5, true}, 1, 1);
  ASSERT_EQ(rep.missing.size(), 1u);
  EXPECT_EQ(rep.normalized_mass, 1);
  EXPECT_EQ(rep.band_width, 5);
}

TEST(Symdiff, EqualMapsAndTranslations) {
  auto g = BijectionTable::from_pairs(grid_pairs(0, 10));
  auto same = symdiff_band(g, g);
  EXPECT_TRUE(same.pass);
  EXPECT_EQ(same.symmetric_difference, 0u);

  auto h = BijectionTable::from_pairs(grid_pairs(0, 10, {1, 0}));
  auto moved = symdiff_band(g, h);
  EXPECT_TRUE(moved.pass);
  EXPECT_EQ(moved.shift, 1);
  EXPECT_EQ(moved.symmetric_difference, 22u);
}

// Pushing half a row outward by one step vacates a point deep inside g's region.
TEST(Symdiff, ChainShiftFails) {
  auto g = BijectionTable::from_pairs(grid_pairs(0, 10));
  auto pairs = grid_pairs(0, 10);
  for (auto& [s, t] : pairs)
    if (s.y == 5 && s.x >= 5) t = {s.x + 1, s.y};
  auto res = symdiff_band(g, BijectionTable::from_pairs(pairs));
  EXPECT_FALSE(res.pass);
  EXPECT_EQ(res.shift, 1);
  EXPECT_EQ(res.symmetric_difference, 2u);
  EXPECT_EQ(*res.witness, ScaledPoint(5, 5));
  EXPECT_EQ(res.worst_distance, Rational(11, 2));
}

TEST(Symdiff, ShapeErrors) {
  auto g = BijectionTable::from_pairs(grid_pairs(0, 3));
  EXPECT_THROW(symdiff_band(g, BijectionTable::from_pairs(grid_pairs(0, 4))), ShapeError);
  EXPECT_THROW(symdiff_band(g, BijectionTable::from_pairs(grid_pairs(0, 3), 1, 2)), ShapeError);
}
