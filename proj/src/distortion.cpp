#include "delone/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "delone/errors.hpp"
#include "delone/parallel.hpp"

namespace delone {

namespace {

using i128 = __int128;

// A distance ratio held as an unreduced fraction num/den with den > 0.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  friend bool operator<(const Ratio& a, const Ratio& b) { return i128(a.num) * b.den < i128(b.num) * a.den; }
  friend bool operator==(const Ratio& a, const Ratio& b) { return i128(a.num) * b.den == i128(b.num) * a.den; }
  Rational value() const { return Rational(num, den); }
};

// Ratio of target distance to source distance for source indices i != j.
Ratio ratio_of(const PointSet& src, const PointSet& tgt, std::size_t si, std::size_t sj, std::size_t ti,
               std::size_t tj) {
  auto ds = sup_dist(src[si], src[sj]);
  auto dt = sup_dist(tgt[ti], tgt[tj]);
  return Ratio{dt * src.denom(), ds * tgt.denom()};
}

Rational sup_diameter(const PointSet& s) {
  if (s.size() < 2) return Rational(0);
  auto [xmin, xmax] = std::minmax_element(s.numerators().begin(), s.numerators().end(),
                                          [](auto& a, auto& b) { return a.x < b.x; });
  auto [ymin, ymax] = std::minmax_element(s.numerators().begin(), s.numerators().end(),
                                          [](auto& a, auto& b) { return a.y < b.y; });
  return Rational(std::max(xmax->x - xmin->x, ymax->y - ymin->y), s.denom());
}

struct Extreme {
  Ratio value;
  std::pair<std::size_t, std::size_t> witness{0, 0};
  bool set = false;
};

// Max over pairs (i < j) in lexicographic order; first attaining pair wins.
Extreme full_max(const PointSet& src, const PointSet& tgt, const std::vector<std::size_t>& img) {
  const auto n = src.size();
  std::vector<Extreme> rows(n);
  parallel_for(n, [&](std::size_t i) {
    auto& e = rows[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      auto r = ratio_of(src, tgt, i, j, img[i], img[j]);
      if (!e.set || e.value < r) e = {r, {i, j}, true};
    }
  });
  Extreme best;
  for (const auto& e : rows) {
    if (e.set && (!best.set || best.value < e.value)) best = e;
  }
  return best;
}

// Same result as full_max, scanning only pairs closer than diam(target) / L0.
Extreme pruned_max(const PointSet& src, const PointSet& tgt, const std::vector<std::size_t>& img) {
  const auto n = src.size();
  Extreme seed;
  auto probe = Rational(1, src.denom());  // one grid step
  for (std::size_t i = 0; i < n; ++i) {
    auto p = src.at(i);
    for (auto j : src.query(Box{p.x(), p.y(), probe, true})) {
      if (j <= i) continue;
      auto r = ratio_of(src, tgt, i, j, img[i], img[j]);
      if (!seed.set || seed.value < r) seed = {r, {i, j}, true};
    }
  }
  if (!seed.set) seed = {ratio_of(src, tgt, 0, 1, img[0], img[1]), {0, 1}, true};
  // Pairs farther apart than diam(T)/L0 have ratio strictly below L0.
  auto reach = sup_diameter(tgt) / seed.value.value();
  Extreme best;
  for (std::size_t i = 0; i < n; ++i) {
    auto p = src.at(i);
    for (auto j : src.query(Box{p.x(), p.y(), reach, true})) {
      if (j <= i) continue;
      auto r = ratio_of(src, tgt, i, j, img[i], img[j]);
      if (!best.set || best.value < r || (r == best.value && std::pair(i, j) < best.witness)) best = {r, {i, j}, true};
    }
  }
  return best;
}

std::int64_t ceil_sqrt(std::int64_t n) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r < n) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= n) --r;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// BijectionTable

BijectionTable::BijectionTable(PointSet source, PointSet target, std::vector<std::size_t> image)
    : source_(std::move(source)), target_(std::move(target)), image_(std::move(image)) {
  if (image_.size() != source_.size() || source_.size() != target_.size()) {
    throw ShapeError("bijection needs |source| == |target| == |image| (" + std::to_string(source_.size()) + ", " +
                     std::to_string(target_.size()) + ", " + std::to_string(image_.size()) + ")");
  }
  preimage_.assign(target_.size(), target_.size());
  for (std::size_t i = 0; i < image_.size(); ++i) {
    if (image_[i] >= target_.size() || preimage_[image_[i]] != target_.size()) {
      throw ShapeError("image is not a permutation of the target");
    }
    preimage_[image_[i]] = i;
  }
}

BijectionTable BijectionTable::from_pairs(const std::vector<std::pair<LatticePoint, LatticePoint>>& pairs,
                                          std::int64_t source_denom, std::int64_t target_denom) {
  std::vector<LatticePoint> src, tgt;
  src.reserve(pairs.size());
  tgt.reserve(pairs.size());
  for (const auto& [s, t] : pairs) src.push_back(s), tgt.push_back(t);
  PointSet S(src, source_denom), T(tgt, target_denom);
  std::vector<std::size_t> image(pairs.size());
  for (const auto& [s, t] : pairs) image[*S.index_of(s)] = *T.index_of(t);
  return BijectionTable(std::move(S), std::move(T), std::move(image));
}

std::optional<ScaledPoint> BijectionTable::apply(const ScaledPoint& p) const {
  auto i = source_.index_of(p);
  if (!i) return std::nullopt;
  return image(*i);
}

std::vector<std::size_t> BijectionTable::preimage(const Box& b) const {
  auto hits = target_.query(b);
  std::vector<std::size_t> out;
  out.reserve(hits.size());
  for (auto t : hits) out.push_back(preimage_[t]);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Lipschitz constants

Rational pair_ratio(const BijectionTable& f, std::size_t i, std::size_t j) {
  return sup_dist(f.image(i), f.image(j)) / sup_dist(f.source().at(i), f.source().at(j));
}

DistortionReport lipschitz_constants(const BijectionTable& f, PairScan scan) {
  if (f.size() < 2) throw DegenerateInput("Lipschitz constants need at least two source points");
  std::vector<std::size_t> img(f.size()), inv(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) img[i] = f.image_index(i);
  for (std::size_t t = 0; t < f.size(); ++t) inv[t] = f.preimage_index(t);

  auto upper = scan == PairScan::full ? full_max(f.source(), f.target(), img)
                                      : pruned_max(f.source(), f.target(), img);
  // b(f) = 1 / L(f^-1); witnesses are reported as the lexicographically first source pair.
  auto inverse = scan == PairScan::full ? full_max(f.target(), f.source(), inv)
                                        : pruned_max(f.target(), f.source(), inv);
  auto lower = Rational(1) / inverse.value.value();

  std::pair<std::size_t, std::size_t> lower_witness{f.size(), f.size()};
  const auto n = f.size();
  const Ratio target_ratio{inverse.value.den, inverse.value.num};
  for (std::size_t i = 0; i < n && lower_witness.first == n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ratio_of(f.source(), f.target(), i, j, img[i], img[j]) == target_ratio) {
        lower_witness = {i, j};
        break;
      }
    }
  }
  return DistortionReport{upper.value.value(), lower, upper.witness, lower_witness};
}

// ---------------------------------------------------------------------------
// Co-uniformity

double fit_exponent(const std::vector<ModulusSample>& samples) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : samples) {
    if (s.omega > 0 && s.radius > 0) pts.emplace_back(std::log(to_double(s.radius)), std::log(to_double(s.omega)));
  }
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (auto [x, y] : pts) mx += x, my += y;
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0, sxx = 0;
  for (auto [x, y] : pts) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
  if (sxx == 0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

CoUniformityModulus make_modulus(std::vector<ModulusSample> samples) {
  CoUniformityModulus m{std::move(samples), 0.0};
  m.fitted_exponent = fit_exponent(m.samples);
  return m;
}

CoUniformityModulus co_uniformity(const BijectionTable& f, const std::vector<Rational>& radii) {
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (radii[k] <= 0) throw DomainError("co-uniformity radii must be positive");
    if (k > 0 && radii[k] < radii[k - 1]) throw DomainError("co-uniformity radii must be sorted");
  }
  std::vector<ModulusSample> samples;
  for (const auto& r : radii) {
    const auto n = f.size();
    std::vector<ModulusSample> rows(n, ModulusSample{r, Rational(0), std::nullopt});
    parallel_for(n, [&](std::size_t i) {
      auto y = f.image(i);
      auto x = f.source().at(i);
      for (auto k : f.preimage(Box{y.x(), y.y(), r, true})) {
        auto d = sup_dist(x, f.source().at(k));
        if (d > rows[i].omega) rows[i].omega = d, rows[i].witness = std::pair(i, k);
      }
    });
    ModulusSample best{r, Rational(0), std::nullopt};
    for (const auto& row : rows) {
      if (row.omega > best.omega) best = row;
    }
    samples.push_back(best);
  }
  return make_modulus(std::move(samples));
}

OrderGateResult order_gate(const CoUniformityModulus& m, int d) {
  const auto& s = m.samples;
  if (s.size() < 4) throw InsufficientData("order gate needs at least 4 samples, got " + std::to_string(s.size()));
  auto rmin = s.front().radius, rmax = s.front().radius;
  for (const auto& x : s) rmin = std::min(rmin, x.radius), rmax = std::max(rmax, x.radius);
  if (rmax < rmin * 4) throw InsufficientData("order gate needs samples spanning at least two octaves of r");
  auto exponent = fit_exponent(s);
  if (std::isnan(exponent)) throw InsufficientData("order gate needs two samples with positive omega");

  auto pow_d = [d](const Rational& r) {
    Rational p(1);
    for (int k = 0; k < d; ++k) p *= r;
    return p;
  };
  std::vector<const ModulusSample*> tail;
  for (const auto& x : s) {
    if (x.radius * 2 >= rmax) tail.push_back(&x);
  }
  std::sort(tail.begin(), tail.end(), [](auto* a, auto* b) { return a->radius < b->radius; });
  bool monotone = true;
  for (std::size_t k = 1; k < tail.size(); ++k) {
    if (tail[k]->omega / pow_d(tail[k]->radius) > tail[k - 1]->omega / pow_d(tail[k - 1]->radius)) monotone = false;
  }
  OrderGateResult out;
  out.exponent = exponent;
  out.tail_ratio_nonincreasing = monotone;
  out.pass = exponent <= d - 0.1 && monotone;
  return out;
}

// ---------------------------------------------------------------------------
// Regularity

RegularityEstimate regularity_constant(const BijectionTable& f, const std::vector<Box>& balls,
                                       std::int64_t search_cap) {
  std::vector<std::vector<std::size_t>> pre(balls.size());
  std::vector<Rational> diam(balls.size());
  for (std::size_t b = 0; b < balls.size(); ++b) {
    if (balls[b].radius <= 0) throw DomainError("regularity balls need a positive radius");
    pre[b] = f.preimage(balls[b]);
    diam[b] = sup_diameter(f.source().subset(pre[b]));
  }

  for (std::int64_t c = 1; c <= search_cap; ++c) {
    RegularityEstimate est{c, false, {}};
    bool ok = true;
    for (std::size_t b = 0; b < balls.size() && ok; ++b) {
      const auto gap = balls[b].radius * c;
      BallCertificate cert{balls[b], pre[b].size(), 0, true};
      if (pre[b].size() <= 1 || diam[b] < gap) {
        cert.separated_size = std::min<std::size_t>(pre[b].size(), 1);
      } else {
        auto greedy = max_separated_indices(f.source(), pre[b], gap, SeparationMode::greedy).size();
        if (greedy > static_cast<std::size_t>(c) || pre[b].size() > kExactSeparationCap) {
          cert.separated_size = greedy;
          cert.exact = greedy > static_cast<std::size_t>(c);  // a witness of failure is exact
        } else {
          cert.separated_size = max_separated_indices(f.source(), pre[b], gap, SeparationMode::exact).size();
        }
      }
      if (cert.separated_size > static_cast<std::size_t>(c)) ok = false;
      est.approximate = est.approximate || !cert.exact;
      est.certificates.push_back(cert);
    }
    if (ok) return est;
  }
  throw CapExceeded("no regularity constant C <= " + std::to_string(search_cap) + " passes every sampled ball");
}

Rational counting_lower_bound(const PointSet& source, const Rational& target_spacing,
                              const std::vector<Rational>& radii) {
  if (source.empty()) throw EmptyInput("counting lower bound on an empty source");
  Rational best(0);
  for (const auto& r : radii) {
    if (r <= 0) continue;
    for (std::size_t i = 0; i < source.size(); ++i) {
      auto x = source.at(i);
      auto n = static_cast<std::int64_t>(source.query(Box{x.x(), x.y(), r, true}).size());
      // (2 floor(L r / t) + 1)^2 >= n forces floor(L r / t) >= ceil((ceil(sqrt n) - 1) / 2).
      auto half_width = ceil_sqrt(n) / 2;
      auto bound = Rational(half_width) * target_spacing / r;
      best = std::max(best, bound);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Escape diagnostic

std::vector<Rational> nested_radii(const Rational& r0, const Rational& lipschitz, std::int64_t scale) {
  std::vector<Rational> out;
  auto step = lipschitz / scale;
  if (step <= 0) throw DomainError("nested radii need a positive step");
  for (auto r = r0; r > 0; r -= step) out.push_back(r);
  return out;
}

EscapeDiagnostic escape_check(const BijectionTable& fn, const ScaledPoint& center, const std::vector<Rational>& radii,
                              const Rational& lipschitz, const Rect& window) {
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (radii[k] <= 0 || (k > 0 && radii[k] >= radii[k - 1])) {
      throw DomainError("escape radii must be positive and strictly decreasing");
    }
  }
  const auto l = fn.source().denom();
  EscapeDiagnostic diag;
  diag.threshold = lipschitz / l;

  auto open_q = [&](std::size_t j) { return Box{center.x(), center.y(), radii[j], false}; };
  std::vector<std::size_t> pre0, pre_prev;
  std::optional<Rational> prev_norm;

  for (std::size_t j = 0; j < radii.size(); ++j) {
    EscapeLevel lev;
    lev.j = j;
    lev.radius = radii[j];
    auto q = open_q(j);
    auto pre = fn.preimage(q);
    if (pre.empty()) {
      lev.skipped = true;
      diag.levels.push_back(lev);
      prev_norm.reset();
      pre_prev.clear();
      continue;
    }
    // argmax of the sup-norm; indices ascend in lexicographic order, so the first max wins ties.
    std::size_t star = pre.front();
    Rational star_norm = sup_norm(fn.source().at(star));
    for (auto i : pre) {
      auto nrm = sup_norm(fn.source().at(i));
      if (nrm > star_norm) star = i, star_norm = nrm;
    }
    auto xs = fn.source().at(star);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        ScaledPoint nb(xs.num_x + dx, xs.num_y + dy, l);
        if (!window.contains(nb)) {
          throw PreconditionError("level " + std::to_string(j) + ": argmax (" + to_string(xs.x()) + ", " +
                                  to_string(xs.y()) + ") has a lattice neighbour outside the materialized window");
        }
      }
    }
    lev.x_star = star;
    lev.x_star_norm = star_norm;
    auto fx = fn.image(star);
    lev.boundary_distance = radii[j] - std::max(abs(fx.x() - center.x()), abs(fx.y() - center.y()));
    lev.within_bound = lev.boundary_distance <= diag.threshold;
    if (!lev.within_bound) ++diag.boundary_violations;

    if (j == 0) pre0 = pre;
    if (prev_norm) {
      Annulus ann{0, 0, star_norm, *prev_norm};
      for (auto u : pre_prev) {
        if (ann.contains(fn.source().at(u)) && q.contains(fn.image(u))) {
          lev.annulus_containment = false;
          if (!lev.annulus_witness) lev.annulus_witness = u;
        }
      }
      auto prev_q = open_q(j - 1);
      for (auto u : pre0) {
        if (ann.contains(fn.source().at(u)) && (q.contains(fn.image(u)) || !prev_q.contains(fn.image(u)))) {
          lev.annulus_containment_q0 = false;
        }
      }
      if (!lev.annulus_containment) ++diag.annulus_violations;
      if (!lev.annulus_containment_q0) ++diag.annulus_q0_violations;
    }
    prev_norm = star_norm;
    pre_prev = std::move(pre);
    diag.levels.push_back(lev);
  }
  return diag;
}

}  // namespace delone
