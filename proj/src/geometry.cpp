#include "delone/geometry.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <limits>

#include "delone/errors.hpp"

namespace delone {

std::int64_t sup_dist(LatticePoint p, LatticePoint q) {
  auto dx = p.x > q.x ? p.x - q.x : q.x - p.x;
  auto dy = p.y > q.y ? p.y - q.y : q.y - p.y;
  return std::max(dx, dy);
}

Rational sup_dist(const ScaledPoint& p, const ScaledPoint& q) {
  if (p.denom == q.denom) {
    return Rational(sup_dist(LatticePoint{p.num_x, p.num_y}, LatticePoint{q.num_x, q.num_y}), p.denom);
  }
  auto dx = abs(p.x() - q.x());
  auto dy = abs(p.y() - q.y());
  return std::max(dx, dy);
}

Rational sup_norm(const ScaledPoint& p) {
  return Rational(std::max(p.num_x < 0 ? -p.num_x : p.num_x, p.num_y < 0 ? -p.num_y : p.num_y), p.denom);
}

bool Box::contains(const ScaledPoint& p) const {
  auto d = std::max(abs(p.x() - cx), abs(p.y() - cy));
  return closed ? d <= radius : d < radius;
}

bool Rect::contains(const ScaledPoint& p) const {
  auto x = p.x();
  auto y = p.y();
  if (x < x0 || y < y0) return false;
  return half_open ? (x < x1 && y < y1) : (x <= x1 && y <= y1);
}

bool Annulus::contains(const ScaledPoint& p) const {
  auto d = std::max(abs(p.x() - cx), abs(p.y() - cy));
  return inner < d && d <= outer;
}

NumeratorRange numerator_range(const Rational& a, bool a_closed, const Rational& b, bool b_closed,
                               std::int64_t denom) {
  auto sa = a * denom;
  auto sb = b * denom;
  NumeratorRange r;
  r.lo = a_closed ? ceil(sa) : floor(sa) + 1;
  r.hi = b_closed ? floor(sb) : ceil(sb) - 1;
  return r;
}

// ---------------------------------------------------------------------------
// PointSet

PointSet::PointSet(std::vector<LatticePoint> numerators, std::int64_t denom, std::int64_t cell)
    : points_(std::move(numerators)), denom_(denom) {
  if (denom_ <= 0) throw DomainError("point set denominator must be positive");
  std::sort(points_.begin(), points_.end());
  auto dup = std::adjacent_find(points_.begin(), points_.end());
  if (dup != points_.end()) {
    throw DuplicatePoint("(" + std::to_string(dup->x) + ", " + std::to_string(dup->y) + ") over denom " +
                         std::to_string(denom_));
  }
  // Unit spacing is the expected separation for every set this library builds.
  cell_ = cell > 0 ? cell : std::max<std::int64_t>(1, denom_);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    buckets_[key(bucket_of(points_[i].x), bucket_of(points_[i].y))].push_back(static_cast<std::uint32_t>(i));
  }
}

std::uint64_t PointSet::key(std::int64_t bx, std::int64_t by) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(bx)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(by));
}

std::int64_t PointSet::bucket_of(std::int64_t v) const {
  auto q = v / cell_;
  if (v % cell_ != 0 && v < 0) --q;
  return q;
}

std::optional<std::size_t> PointSet::index_of(LatticePoint numer) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), numer);
  if (it == points_.end() || *it != numer) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin());
}

std::optional<std::size_t> PointSet::index_of(const ScaledPoint& p) const {
  auto x = p.x() * denom_;
  auto y = p.y() * denom_;
  if (!is_integral(x) || !is_integral(y)) return std::nullopt;
  return index_of(LatticePoint{x.numerator(), y.numerator()});
}

std::vector<std::size_t> PointSet::query(NumeratorRange xr, NumeratorRange yr) const {
  std::vector<std::size_t> out;
  if (xr.empty() || yr.empty() || points_.empty()) return out;
  auto inside = [&](const LatticePoint& p) {
    return p.x >= xr.lo && p.x <= xr.hi && p.y >= yr.lo && p.y <= yr.hi;
  };
  auto bx0 = bucket_of(xr.lo), bx1 = bucket_of(xr.hi);
  auto by0 = bucket_of(yr.lo), by1 = bucket_of(yr.hi);
  // Wide queries over sparse sets: a linear scan is cheaper than walking buckets.
  auto nb = static_cast<double>(bx1 - bx0 + 1) * static_cast<double>(by1 - by0 + 1);
  if (nb > static_cast<double>(points_.size())) {
    // Points are sorted by x, so binary search the x-range first.
    auto first = std::lower_bound(points_.begin(), points_.end(), LatticePoint{xr.lo, std::numeric_limits<std::int64_t>::min()});
    for (auto it = first; it != points_.end() && it->x <= xr.hi; ++it) {
      if (inside(*it)) out.push_back(static_cast<std::size_t>(it - points_.begin()));
    }
    return out;
  }
  for (auto bx = bx0; bx <= bx1; ++bx) {
    for (auto by = by0; by <= by1; ++by) {
      auto it = buckets_.find(key(bx, by));
      if (it == buckets_.end()) continue;
      for (auto idx : it->second) {
        if (inside(points_[idx])) out.push_back(idx);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> PointSet::query(const Box& b) const {
  if (b.radius < 0) return {};
  auto xr = numerator_range(b.xmin(), b.closed, b.xmax(), b.closed, denom_);
  auto yr = numerator_range(b.ymin(), b.closed, b.ymax(), b.closed, denom_);
  return query(xr, yr);
}

std::vector<std::size_t> PointSet::query(const Rect& r) const {
  auto xr = numerator_range(r.x0, true, r.x1, !r.half_open, denom_);
  auto yr = numerator_range(r.y0, true, r.y1, !r.half_open, denom_);
  return query(xr, yr);
}

PointSet PointSet::subset(std::span<const std::size_t> indices) const {
  std::vector<LatticePoint> pts;
  pts.reserve(indices.size());
  for (auto i : indices) pts.push_back(points_.at(i));
  return PointSet(std::move(pts), denom_, cell_);
}

PointSet ball_query(const PointSet& set, const Box& b) {
  auto idx = set.query(b);
  return set.subset(idx);
}

std::pair<Rational, std::size_t> nearest(const PointSet& set, const ScaledPoint& q) {
  if (set.empty()) throw EmptyInput("nearest() on an empty point set");
  Rational r(1);
  for (;;) {
    auto hits = set.query(Box{q.x(), q.y(), r, true});
    if (!hits.empty()) {
      std::pair<Rational, std::size_t> best{sup_dist(set.at(hits.front()), q), hits.front()};
      for (auto i : hits) {
        auto d = sup_dist(set.at(i), q);
        if (d < best.first) best = {d, i};
      }
      return best;
    }
    r *= 2;
  }
}

// ---------------------------------------------------------------------------
// Separated subsets

namespace {

std::vector<std::size_t> greedy_separated(const PointSet& set, std::span<const std::size_t> candidates,
                                          const Rational& gap) {
  std::vector<std::size_t> chosen;
  for (auto c : candidates) {
    bool ok = std::all_of(chosen.begin(), chosen.end(),
                          [&](std::size_t k) { return sup_dist(set.at(c), set.at(k)) >= gap; });
    if (ok) chosen.push_back(c);
  }
  return chosen;
}

// Maximum independent set of the "closer than gap" graph, branch and bound on bitmasks.
std::vector<std::size_t> exact_separated(const PointSet& set, std::span<const std::size_t> candidates,
                                         const Rational& gap) {
  const auto n = candidates.size();
  std::vector<std::uint64_t> conflict(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sup_dist(set.at(candidates[i]), set.at(candidates[j])) < gap) {
        conflict[i] |= std::uint64_t{1} << j;
        conflict[j] |= std::uint64_t{1} << i;
      }
    }
  }
  int best = -1;
  std::uint64_t best_mask = 0;
  std::function<void(std::uint64_t, std::uint64_t, int)> search = [&](std::uint64_t cand, std::uint64_t chosen,
                                                                      int count) {
    if (count + std::popcount(cand) <= best) return;
    if (cand == 0) {
      best = count;
      best_mask = chosen;
      return;
    }
    auto v = std::countr_zero(cand);
    auto bit = std::uint64_t{1} << v;
    search(cand & ~conflict[v] & ~bit, chosen | bit, count + 1);
    search(cand & ~bit, chosen, count);
  };
  auto all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  search(all, 0, 0);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (best_mask & (std::uint64_t{1} << i)) out.push_back(candidates[i]);
  }
  return out;
}

}  // namespace

std::vector<std::size_t> max_separated_indices(const PointSet& set, std::span<const std::size_t> candidates,
                                               const Rational& gap, SeparationMode mode) {
  if (mode == SeparationMode::greedy) return greedy_separated(set, candidates, gap);
  if (candidates.size() > kExactSeparationCap) {
    throw CapacityError("exact separated-subset search supports at most " + std::to_string(kExactSeparationCap) +
                        " points, got " + std::to_string(candidates.size()));
  }
  return exact_separated(set, candidates, gap);
}

SeparatedSet max_separated_subset(const PointSet& set, const Rational& gap, SeparationMode mode) {
  std::vector<std::size_t> all(set.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto idx = max_separated_indices(set, all, gap, mode);
  return SeparatedSet{set.subset(idx), gap, mode};
}

// ---------------------------------------------------------------------------
// Delone constants

DeloneConstants delone_constants(const PointSet& set, const Box& window) {
  auto inside = set.query(window);
  if (inside.empty()) throw EmptyInput("no points inside the window");

  DeloneConstants out;

  if (inside.size() >= 2) {
    // Consecutive points in sorted order give an upper bound; refine with ball queries.
    std::size_t wi = inside[0], wj = inside[1];
    Rational best = sup_dist(set.at(wi), set.at(wj));
    for (std::size_t k = 1; k + 1 < inside.size(); ++k) {
      auto d = sup_dist(set.at(inside[k]), set.at(inside[k + 1]));
      if (d < best) best = d, wi = inside[k], wj = inside[k + 1];
    }
    for (auto i : inside) {
      auto p = set.at(i);
      for (auto j : set.query(Box{p.x(), p.y(), best, true})) {
        if (j <= i || !window.contains(set.at(j))) continue;
        auto d = sup_dist(p, set.at(j));
        if (d < best || (d == best && std::pair(i, j) < std::pair(wi, wj))) best = d, wi = i, wj = j;
      }
    }
    out.separation = best;
    out.separation_witness = std::pair(set.at(wi), set.at(wj));
  }

  const auto half = 2 * set.denom();
  auto xr = numerator_range(window.xmin(), window.closed, window.xmax(), window.closed, half);
  auto yr = numerator_range(window.ymin(), window.closed, window.ymax(), window.closed, half);
  bool first = true;
  for (auto tx = xr.lo; tx <= xr.hi; ++tx) {
    for (auto ty = yr.lo; ty <= yr.hi; ++ty) {
      Rational d(0);
      if (tx % 2 == 0 && ty % 2 == 0 && set.contains({tx / 2, ty / 2})) {
        d = 0;
      } else {
        d = nearest(set, ScaledPoint(tx, ty, half)).first;
      }
      if (first || d > out.covering_radius) {
        out.covering_radius = d;
        out.covering_witness = ScaledPoint(tx, ty, half);
        first = false;
      }
    }
  }
  return out;
}

}  // namespace delone
