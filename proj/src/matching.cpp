#include "delone/matching.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "delone/errors.hpp"

namespace delone {

namespace {

using i128 = __int128;

struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  friend bool operator<(const Ratio& a, const Ratio& b) { return i128(a.num) * b.den < i128(b.num) * a.den; }
  friend bool operator==(const Ratio& a, const Ratio& b) { return i128(a.num) * b.den == i128(b.num) * a.den; }
  Ratio inverse() const { return {den, num}; }
  Rational value() const { return Rational(num, den); }
};

// Pairwise sup-distances in numerator units of each set.
struct Distances {
  std::size_t n = 0, m = 0;
  std::int64_t ds_scale = 1, dt_scale = 1;  // source / target denominators
  std::vector<std::int64_t> ds, dt;

  explicit Distances(const MatchInstance& inst)
      : n(inst.source.size()), m(inst.target.size()), ds_scale(inst.source.denom()), dt_scale(inst.target.denom()) {
    ds.resize(n * n);
    dt.resize(m * m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ds[i * n + j] = sup_dist(inst.source[i], inst.source[j]);
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t v = 0; v < m; ++v) dt[u * m + v] = sup_dist(inst.target[u], inst.target[v]);
  }

  std::int64_t s(std::size_t i, std::size_t j) const { return ds[i * n + j]; }
  std::int64_t t(std::size_t u, std::size_t v) const { return dt[u * m + v]; }

  // d_T(u, v) / d_S(i, j) for i != j.
  Ratio ratio(std::size_t i, std::size_t j, std::size_t u, std::size_t v) const {
    return {t(u, v) * ds_scale, s(i, j) * dt_scale};
  }
};

// Lipschitz objective: max ratio. Bi-Lipschitz objective: max(max ratio, 1 / min ratio).
Ratio cost_of(const Distances& d, const std::vector<std::size_t>& image, MatchMode mode) {
  if (image.size() < 2) return {1, 1};
  Ratio hi{0, 1}, lo{1, 0};
  bool first = true;
  for (std::size_t i = 0; i < image.size(); ++i) {
    for (std::size_t j = i + 1; j < image.size(); ++j) {
      auto r = d.ratio(i, j, image[i], image[j]);
      if (first || hi < r) hi = r;
      if (first || r < lo) lo = r;
      first = false;
    }
  }
  if (mode == MatchMode::lipschitz) return hi;
  auto inv = lo.inverse();
  return hi < inv ? inv : hi;
}

std::vector<Ratio> candidate_thresholds(const Distances& d, MatchMode mode) {
  std::vector<std::int64_t> sd, td;
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t j = i + 1; j < d.n; ++j) sd.push_back(d.s(i, j));
  for (std::size_t u = 0; u < d.m; ++u)
    for (std::size_t v = u + 1; v < d.m; ++v) td.push_back(d.t(u, v));
  for (auto* v : {&sd, &td}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  std::vector<Ratio> out;
  for (auto a : td) {
    for (auto b : sd) {
      Ratio r{a * d.ds_scale, b * d.dt_scale};
      if (mode == MatchMode::bilipschitz && r < Ratio{1, 1}) r = r.inverse();
      out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Backtracking with forward checking over target domains.
class Search {
 public:
  Search(const MatchInstance& inst, const Distances& d, Ratio upper, std::optional<Ratio> lower)
      : inst_(inst), d_(d), upper_(upper), lower_(lower) {
    build_orders();
  }

  std::optional<std::vector<std::size_t>> run() {
    const auto n = d_.n, m = d_.m;
    std::vector<std::vector<char>> domains(n, std::vector<char>(m, 1));
    std::vector<std::size_t> image(n, m);
    if (solve(domains, image, 0)) return image;
    return std::nullopt;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  bool compatible(std::size_t i, std::size_t u, std::size_t k, std::size_t w) const {
    auto lhs = i128(d_.t(u, w)) * d_.ds_scale;
    auto rhs = i128(d_.s(i, k)) * d_.dt_scale;
    if (lhs * upper_.den > rhs * upper_.num) return false;
    if (lower_ && lhs * lower_->den < rhs * lower_->num) return false;
    return true;
  }

  void build_orders() {
    const auto n = d_.n, m = d_.m;
    // Static degree: neighbours within twice the closest-pair distance, the tightest constraints.
    std::int64_t dmin = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (dmin == 0 || d_.s(i, j) < dmin) dmin = d_.s(i, j);
    std::vector<std::size_t> degree(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && d_.s(i, j) <= 2 * dmin) ++degree[i];
    rank_.resize(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return degree[a] > degree[b]; });
    for (std::size_t r = 0; r < n; ++r) rank_[order[r]] = r;

    // Value order: distance to the source point's image under the centroid-matching similarity.
    auto centroid = [](const PointSet& s) {
      double cx = 0, cy = 0;
      for (auto p : s.numerators()) cx += static_cast<double>(p.x), cy += static_cast<double>(p.y);
      auto k = static_cast<double>(std::max<std::size_t>(1, s.size())) * static_cast<double>(s.denom());
      return std::pair(cx / k, cy / k);
    };
    auto spread = [](const PointSet& s, std::pair<double, double> c) {
      double r = 0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        auto p = s.at(i);
        r = std::max({r, std::abs(to_double(p.x()) - c.first), std::abs(to_double(p.y()) - c.second)});
      }
      return r;
    };
    auto cs = centroid(inst_.source), ct = centroid(inst_.target);
    auto ss = spread(inst_.source, cs), st = spread(inst_.target, ct);
    double scale = ss > 0 ? st / ss : 1.0;
    values_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
      auto p = inst_.source.at(i);
      double px = ct.first + (to_double(p.x()) - cs.first) * scale;
      double py = ct.second + (to_double(p.y()) - cs.second) * scale;
      std::vector<std::pair<double, std::size_t>> keyed;
      for (std::size_t u = 0; u < m; ++u) {
        auto q = inst_.target.at(u);
        keyed.emplace_back(std::max(std::abs(to_double(q.x()) - px), std::abs(to_double(q.y()) - py)), u);
      }
      std::sort(keyed.begin(), keyed.end());
      for (auto& [dist, u] : keyed) values_[i].push_back(u);
    }
  }

  bool solve(std::vector<std::vector<char>>& domains, std::vector<std::size_t>& image, std::size_t assigned) {
    const auto n = d_.n, m = d_.m;
    if (assigned == n) return true;
    // Smallest remaining domain first; ties broken by static degree rank.
    std::size_t var = n, best_size = m + 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (image[i] != m) continue;
      auto size = static_cast<std::size_t>(std::count(domains[i].begin(), domains[i].end(), 1));
      if (size < best_size || (size == best_size && rank_[i] < rank_[var])) var = i, best_size = size;
    }
    for (auto u : values_[var]) {
      if (!domains[var][u]) continue;
      ++nodes_;
      auto saved = domains;
      image[var] = u;
      bool wiped = false;
      for (std::size_t k = 0; k < n && !wiped; ++k) {
        if (image[k] != m) continue;
        auto& dom = domains[k];
        bool any = false;
        for (std::size_t w = 0; w < m; ++w) {
          if (!dom[w]) continue;
          if (w == u || !compatible(var, u, k, w)) dom[w] = 0;
          else any = true;
        }
        wiped = !any;
      }
      if (!wiped && solve(domains, image, assigned + 1)) return true;
      image[var] = m;
      domains = std::move(saved);
    }
    return false;
  }

  const MatchInstance& inst_;
  const Distances& d_;
  Ratio upper_;
  std::optional<Ratio> lower_;
  std::vector<std::size_t> rank_;
  std::vector<std::vector<std::size_t>> values_;
  std::uint64_t nodes_ = 0;
};

Ratio to_ratio(const Rational& r) { return {r.numerator(), r.denominator()}; }

MatchResult make_result(const MatchInstance& inst, std::vector<std::size_t> image, Rational cost, bool optimal,
                        MatchStats stats) {
  std::vector<std::pair<LatticePoint, LatticePoint>> pairs;
  for (std::size_t i = 0; i < image.size(); ++i) pairs.emplace_back(inst.source[i], inst.target[image[i]]);
  auto table = BijectionTable::from_pairs(pairs, inst.source.denom(), inst.target.denom());
  return MatchResult{std::move(table), std::move(image), cost, optimal, stats};
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void check_shape(const MatchInstance& inst) {
  if (inst.source.empty() || inst.target.empty()) throw ShapeError("empty matching instance");
  if (inst.injection) {
    if (inst.source.size() > inst.target.size()) {
      throw ShapeError("injection needs |source| <= |target| (" + std::to_string(inst.source.size()) + " > " +
                       std::to_string(inst.target.size()) + ")");
    }
  } else if (inst.source.size() != inst.target.size()) {
    throw ShapeError("bijection needs |source| == |target| (" + std::to_string(inst.source.size()) + " vs " +
                     std::to_string(inst.target.size()) + ")");
  }
}

Rational assignment_cost(const MatchInstance& inst, const std::vector<std::size_t>& image) {
  if (image.size() < 2) return Rational(1);
  std::optional<Rational> hi, lo;
  for (std::size_t i = 0; i < image.size(); ++i) {
    for (std::size_t j = i + 1; j < image.size(); ++j) {
      auto r = sup_dist(inst.target.at(image[i]), inst.target.at(image[j])) /
               sup_dist(inst.source.at(i), inst.source.at(j));
      if (!hi || r > *hi) hi = r;
      if (!lo || r < *lo) lo = r;
    }
  }
  if (inst.mode == MatchMode::lipschitz) return *hi;
  if (*lo == 0) throw ShapeError("assignment is not injective");
  return std::max(*hi, Rational(1) / *lo);
}

std::optional<std::vector<std::size_t>> feasible(const MatchInstance& inst, const Rational& upper,
                                                 std::optional<Rational> lower, MatchStats* stats) {
  check_shape(inst);
  if (upper <= 0) throw DomainError("feasibility threshold must be positive");
  if (lower && *lower > upper) throw DomainError("lower threshold exceeds upper threshold");
  Distances d(inst);
  std::optional<Ratio> lo;
  if (lower) lo = to_ratio(*lower);
  Search s(inst, d, to_ratio(upper), lo);
  auto out = s.run();
  if (stats) stats->nodes += s.nodes(), ++stats->feasibility_calls;
  return out;
}

MatchResult min_lipschitz(const MatchInstance& inst, const MatchMethod& method) {
  check_shape(inst);
  auto t0 = std::chrono::steady_clock::now();
  MatchStats stats;
  if (inst.source.size() == 1) {
    stats.seconds = elapsed(t0);
    return make_result(inst, {0}, Rational(1), true, stats);
  }

  if (const auto* h = std::get_if<HeuristicMethod>(&method)) {
    Distances d(inst);
    const auto n = d.n, m = d.m;
    std::mt19937_64 rng(h->seed);
    std::vector<std::size_t> best;
    Ratio best_cost{1, 0};
    for (std::uint64_t restart = 0; restart < std::max<std::uint64_t>(1, h->restarts); ++restart) {
      std::vector<std::size_t> perm(m);
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
      std::vector<std::size_t> image(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n));
      std::vector<std::size_t> spare(perm.begin() + static_cast<std::ptrdiff_t>(n), perm.end());
      auto cost = cost_of(d, image, inst.mode);
      std::uint64_t stall = 0;
      const auto stall_limit = static_cast<std::uint64_t>(n * n + spare.size() * n);
      for (std::uint64_t it = 0; it < h->iterations && stall < stall_limit; ++it) {
        ++stats.nodes;
        auto i = static_cast<std::size_t>(rng() % n);
        bool relocate = !spare.empty() && (rng() & 1);
        std::size_t j = 0;
        if (relocate) {
          j = static_cast<std::size_t>(rng() % spare.size());
          std::swap(image[i], spare[j]);
        } else {
          j = static_cast<std::size_t>(rng() % n);
          std::swap(image[i], image[j]);
        }
        auto c = cost_of(d, image, inst.mode);
        if (c < cost) {
          cost = c;
          stall = 0;
        } else {
          relocate ? std::swap(image[i], spare[j]) : std::swap(image[i], image[j]);
          ++stall;
        }
      }
      if (best.empty() || cost < best_cost) best = image, best_cost = cost;
    }
    stats.seconds = elapsed(t0);
    return make_result(inst, best, assignment_cost(inst, best), false, stats);
  }

  Distances d(inst);
  auto cand = candidate_thresholds(d, inst.mode);
  // Smallest candidate whose feasibility check succeeds; the largest always does.
  std::size_t lo = 0, hi = cand.size() - 1;
  std::optional<std::vector<std::size_t>> best;
  auto check = [&](const Ratio& t) {
    std::optional<Rational> lower;
    if (inst.mode == MatchMode::bilipschitz) lower = Rational(1) / t.value();
    return feasible(inst, t.value(), lower, &stats);
  };
  best = check(cand[hi]);
  if (!best) throw std::logic_error("largest candidate threshold infeasible");
  while (lo < hi) {
    auto mid = lo + (hi - lo) / 2;
    if (auto a = check(cand[mid])) {
      best = std::move(a);
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  stats.seconds = elapsed(t0);
  auto cost = assignment_cost(inst, *best);
  return make_result(inst, std::move(*best), cost, true, stats);
}

std::uint64_t injection_count(std::size_t source, std::size_t target, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < source; ++k) {
    auto f = static_cast<std::uint64_t>(target - k);
    if (f == 0) return 0;
    if (total > (cap + 1) / f + 1) return cap + 1;
    total *= f;
    if (total > cap) return cap + 1;
  }
  return total;
}

MatchResult brute_force_min(const MatchInstance& inst, std::uint64_t cap) {
  check_shape(inst);
  auto count = injection_count(inst.source.size(), inst.target.size(), cap);
  if (count > cap) {
    throw CapacityError("brute force over more than " + std::to_string(cap) + " injections (" +
                        std::to_string(inst.source.size()) + " into " + std::to_string(inst.target.size()) + ")");
  }
  auto t0 = std::chrono::steady_clock::now();
  MatchStats stats;
  Distances d(inst);
  const auto n = d.n, m = d.m;
  std::vector<std::size_t> image(n), best;
  std::vector<char> used(m, 0);
  Ratio best_cost{1, 0};
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) {
      ++stats.nodes;
      auto c = cost_of(d, image, inst.mode);
      if (best.empty() || c < best_cost) best = image, best_cost = c;
      return;
    }
    for (std::size_t u = 0; u < m; ++u) {
      if (used[u]) continue;
      used[u] = 1;
      image[i] = u;
      rec(i + 1);
      used[u] = 0;
    }
  };
  rec(0);
  stats.seconds = elapsed(t0);
  return make_result(inst, best, best_cost.value(), true, stats);
}

}  // namespace delone
