#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "delone/errors.hpp"
#include "delone/matching.hpp"

using namespace delone;

namespace {

PointSet random_set(std::mt19937_64& rng, std::size_t n, std::int64_t span) {
  std::uniform_int_distribution<std::int64_t> u(0, span);
  std::vector<LatticePoint> pts;
  while (pts.size() < n) {
    LatticePoint p{u(rng), u(rng)};
    if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
  }
  return PointSet(std::move(pts));
}

// Objective by the definition, independent of assignment_cost.
Rational objective(const MatchInstance& m, const std::vector<std::size_t>& image) {
  Rational hi(0), lo(0);
  bool first = true;
  for (std::size_t i = 0; i < image.size(); ++i)
    for (std::size_t j = i + 1; j < image.size(); ++j) {
      auto r = sup_dist(m.target.at(image[i]), m.target.at(image[j])) / sup_dist(m.source.at(i), m.source.at(j));
      hi = first ? r : std::max(hi, r);
      lo = first ? r : std::min(lo, r);
      first = false;
    }
  if (first) return 1;
  if (m.mode == MatchMode::lipschitz) return hi;
  return std::max(hi, 1 / lo);
}

const PointSet kSquare({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
const PointSet kRow({{0, 0}, {1, 0}, {2, 0}, {3, 0}});

}  // namespace

TEST(Matching, IdentityIsOptimalAtOne) {
  auto r = min_lipschitz({kSquare, kSquare});
  EXPECT_EQ(r.L_star, 1);
  EXPECT_TRUE(r.optimal);
}

TEST(Matching, SquareOntoRowNeedsThree) {
  MatchInstance m{kSquare, kRow};
  auto r = min_lipschitz(m);
  EXPECT_EQ(r.L_star, 3);
  EXPECT_EQ(assignment_cost(m, r.image), 3);
  EXPECT_EQ(brute_force_min(m).L_star, 3);
}

TEST(Feasible, Examples) {
  EXPECT_FALSE(feasible({kSquare, kRow}, 2).has_value());
  auto f = feasible({kRow, kSquare}, 1);
  ASSERT_TRUE(f.has_value());
  EXPECT_LE(objective({kRow, kSquare}, *f), 1);
}

TEST(Feasible, RespectsLowerBound) {
  MatchInstance m{kRow, kRow};
  auto f = feasible(m, 1, Rational(1));
  ASSERT_TRUE(f.has_value());
  EXPECT_EQ(objective({kRow, kRow, MatchMode::bilipschitz}, *f), 1);
  EXPECT_TRUE(feasible({kSquare, kRow}, 3, Rational(1)).has_value());
  EXPECT_FALSE(feasible({kRow, kSquare}, 1, Rational(1)).has_value());
}

TEST(Matching, SinglePoint) {
  auto r = min_lipschitz({PointSet({{0, 0}}), PointSet({{5, 5}, {6, 6}}), MatchMode::lipschitz, true});
  EXPECT_EQ(r.L_star, 1);
  EXPECT_TRUE(r.optimal);
}

TEST(Matching, ShapeErrors) {
  EXPECT_THROW(check_shape({PointSet{}, PointSet{}}), ShapeError);
  EXPECT_THROW(check_shape({kSquare, PointSet({{0, 0}})}), ShapeError);
  EXPECT_THROW(check_shape({kSquare, PointSet({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}})}), ShapeError);
  EXPECT_NO_THROW(check_shape({kSquare, PointSet({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}}), MatchMode::lipschitz, true}));
  EXPECT_THROW(check_shape({kRow, PointSet({{0, 0}}), MatchMode::lipschitz, true}), ShapeError);
}

TEST(Matching, ExactAgreesWithBruteForce) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 2 + trial % 5;
    bool inj = trial % 2 == 1;
    MatchInstance m{random_set(rng, n, 5), random_set(rng, inj ? n + 1 + trial % 2 : n, 5),
                    trial % 4 < 2 ? MatchMode::lipschitz : MatchMode::bilipschitz, inj};
    auto exact = min_lipschitz(m);
    auto brute = brute_force_min(m);
    EXPECT_EQ(exact.L_star, brute.L_star) << "trial " << trial;
    EXPECT_EQ(objective(m, exact.image), exact.L_star);
    EXPECT_EQ(objective(m, brute.image), brute.L_star);
    EXPECT_TRUE(exact.optimal);
  }
}

TEST(Matching, HeuristicIsAnUpperBound) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    MatchInstance m{random_set(rng, 6, 6), random_set(rng, 6, 6)};
    auto exact = min_lipschitz(m);
    auto heur = min_lipschitz(m, HeuristicMethod{static_cast<std::uint64_t>(trial), 500, 4});
    EXPECT_GE(heur.L_star, exact.L_star);
    EXPECT_EQ(objective(m, heur.image), heur.L_star);
    EXPECT_FALSE(heur.optimal);
  }
}

TEST(Matching, HeuristicIsDeterministicPerSeed) {
  std::mt19937_64 rng(31);
  MatchInstance m{random_set(rng, 9, 6), random_set(rng, 9, 6)};
  auto a = min_lipschitz(m, HeuristicMethod{7, 300, 3});
  auto b = min_lipschitz(m, HeuristicMethod{7, 300, 3});
  EXPECT_EQ(a.image, b.image);
}

TEST(BruteForce, RefusesLargeInstances) {
  std::mt19937_64 rng(37);
  MatchInstance m{random_set(rng, 11, 8), random_set(rng, 11, 8)};
  EXPECT_THROW(brute_force_min(m), CapacityError);
  EXPECT_THROW(brute_force_min({kSquare, kRow}, 10), CapacityError);
}

TEST(InjectionCount, FallingFactorial) {
  EXPECT_EQ(injection_count(3, 5, 1000), 60u);
  EXPECT_EQ(injection_count(4, 4, 1000), 24u);
  EXPECT_EQ(injection_count(10, 10, 1000), 1001u);
  EXPECT_EQ(injection_count(20, 30, kBruteForceCap), kBruteForceCap + 1);
}

TEST(Matching, RowIntoTwoByThreeBlock) {
  MatchInstance m{PointSet({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}}),
                  PointSet({{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}}), MatchMode::lipschitz, true};
  EXPECT_EQ(injection_count(5, 6, kBruteForceCap), 720u);
  auto brute = brute_force_min(m);
  EXPECT_EQ(min_lipschitz(m).L_star, brute.L_star);
  EXPECT_EQ(objective(m, brute.image), brute.L_star);
}

TEST(Matching, ScalingBothSidesKeepsTheOptimum) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 8; ++trial) {
    auto s = random_set(rng, 5, 5), t = random_set(rng, 5, 5);
    auto scaled = [](const PointSet& p, std::int64_t k, std::int64_t denom) {
      std::vector<LatticePoint> v;
      for (auto q : p.numerators()) v.push_back({q.x * k, q.y * k});
      return PointSet(std::move(v), denom);
    };
    MatchInstance m{s, t, trial % 2 ? MatchMode::bilipschitz : MatchMode::lipschitz};
    MatchInstance big{scaled(s, 3, 2), scaled(t, 3, 2), m.mode};
    EXPECT_EQ(min_lipschitz(m).L_star, min_lipschitz(big).L_star);
  }
}

TEST(CountingBound, BelowBruteForceOptimum) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_set(rng, 3 + trial % 5, 4);
    MatchInstance m{s, random_set(rng, s.size() + trial % 2, 4), MatchMode::lipschitz, trial % 2 == 1};
    EXPECT_LE(counting_lower_bound(s, 1, {1, 2}), brute_force_min(m).L_star);
  }
}
