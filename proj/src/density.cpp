#include "delone/density.hpp"

#include <algorithm>

#include <boost/math/constants/constants.hpp>

#include "delone/errors.hpp"

namespace delone {

namespace {

const Rational kHalf{1, 2};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_in_square(const Rational& x, const Rational& y) {
  if (x < -kHalf || x > kHalf || y < -kHalf || y > kHalf) {
    throw DomainError("point (" + to_string(x) + ", " + to_string(y) + ") outside I^2");
  }
}

void require_in_square(const Rect& r) {
  if (r.x0 > r.x1 || r.y0 > r.y1) throw DomainError("rectangle with negative extent");
  if (r.x0 < -kHalf || r.x1 > kHalf || r.y0 < -kHalf || r.y1 > kHalf) {
    throw DomainError("rectangle [" + to_string(r.x0) + ", " + to_string(r.x1) + "] x [" + to_string(r.y0) + ", " +
                      to_string(r.y1) + "] not inside I^2");
  }
}

// Integrals over [u0, u1] of the two linear interpolation weights (1 - u) and u.
Rational weight0(const Rational& u0, const Rational& u1) { return (u1 - u0) - (u1 * u1 - u0 * u0) / 2; }
Rational weight1(const Rational& u0, const Rational& u1) { return (u1 * u1 - u0 * u0) / 2; }

// Integral over [u0,u1] x [v0,v1] of the bilinear interpolant on the unit cell.
Rational bilinear_cell_integral(const std::array<Rational, 4>& c, const Rational& u0, const Rational& u1,
                                const Rational& v0, const Rational& v1) {
  auto a0 = weight0(u0, u1), a1 = weight1(u0, u1);
  auto b0 = weight0(v0, v1), b1 = weight1(v0, v1);
  return c[0] * a0 * b0 + c[1] * a1 * b0 + c[2] * a0 * b1 + c[3] * a1 * b1;
}

Rational bilinear_value(const std::array<Rational, 4>& c, const Rational& u, const Rational& v) {
  return c[0] * (1 - u) * (1 - v) + c[1] * u * (1 - v) + c[2] * (1 - u) * v + c[3] * u * v;
}

void validate_grid(const GridDensity& g) {
  if (g.m < 2) throw RangeError("grid density: m must be >= 2 (m)");
  if (g.values.size() != static_cast<std::size_t>(g.m * g.m)) {
    throw RangeError("grid density: expected " + std::to_string(g.m * g.m) + " values, got " +
                     std::to_string(g.values.size()) + " (values)");
  }
}

// Grid cell index containing coordinate t in [0, m-1], clamped so the last node belongs to the last cell.
std::int64_t grid_cell(const Rational& t, std::int64_t m) { return std::min<std::int64_t>(floor(t), m - 2); }

std::array<Rational, 4> grid_corners(const GridDensity& g, std::int64_t i, std::int64_t j) {
  return {g.at(i, j), g.at(i + 1, j), g.at(i, j + 1), g.at(i + 1, j + 1)};
}

Rational grid_integral(const GridDensity& g, const Rect& r) {
  const Rational h(1, g.m - 1);
  // Work in node units t = (x + 1/2) / h.
  auto tx0 = (r.x0 + kHalf) / h, tx1 = (r.x1 + kHalf) / h;
  auto ty0 = (r.y0 + kHalf) / h, ty1 = (r.y1 + kHalf) / h;
  Rational total(0);
  for (auto i = grid_cell(tx0, g.m); i <= grid_cell(tx1, g.m); ++i) {
    auto u0 = std::max(tx0, Rational(i)) - i, u1 = std::min(tx1, Rational(i + 1)) - i;
    if (u1 <= u0) continue;
    for (auto j = grid_cell(ty0, g.m); j <= grid_cell(ty1, g.m); ++j) {
      auto v0 = std::max(ty0, Rational(j)) - j, v1 = std::min(ty1, Rational(j + 1)) - j;
      if (v1 <= v0) continue;
      total += bilinear_cell_integral(grid_corners(g, i, j), u0, u1, v0, v1);
    }
  }
  return total * h * h;
}

// cos(2 pi k x0) == cos(2 pi k x1) holds exactly iff k(x1 - x0) or k(x1 + x0) is an integer.
bool cos_equal(std::int64_t k, const Rational& x0, const Rational& x1) {
  return is_integral((x1 - x0) * k) || is_integral((x1 + x0) * k);
}

const Real& two_pi() {
  static const Real v = 2 * boost::math::constants::pi<Real>();
  return v;
}

Real sin_integral(std::int64_t k, const Rational& x0, const Rational& x1) {
  using boost::multiprecision::cos;
  auto w = two_pi() * k;
  return (cos(w * to_real(x0)) - cos(w * to_real(x1))) / w;
}

}  // namespace

Rect unit_square() { return Rect{-kHalf, -kHalf, kHalf, kHalf, false}; }

Rect Homothety::apply(const Rect& r) const {
  auto map = [&](const Rational& v, std::int64_t a) { return (v - a) / side - kHalf; };
  return Rect{map(r.x0, anchor.x), map(r.y0, anchor.y), map(r.x1, anchor.x), map(r.y1, anchor.y), r.half_open};
}

std::string variant_name(const DensitySpec& rho) {
  return std::visit(overloaded{[](const ConstantDensity&) { return std::string("constant"); },
                               [](const BilinearDensity&) { return std::string("bilinear"); },
                               [](const TrigDensity&) { return std::string("trig"); },
                               [](const GridDensity&) { return std::string("grid"); }},
                    rho);
}

Real eval(const DensitySpec& rho, const Rational& x, const Rational& y) {
  require_in_square(x, y);
  return std::visit(
      overloaded{
          [&](const ConstantDensity& d) { return to_real(d.c); },
          [&](const BilinearDensity& d) { return to_real(bilinear_value(d.corners, x + kHalf, y + kHalf)); },
          [&](const TrigDensity& d) {
            using boost::multiprecision::sin;
            auto w = two_pi() * d.k;
            auto s = sin(w * to_real(x)) * sin(w * to_real(y));
            return Real(1) - to_real(d.a / 2) * (1 + s);
          },
          [&](const GridDensity& g) {
            validate_grid(g);
            const Rational h(1, g.m - 1);
            auto tx = (x + kHalf) / h, ty = (y + kHalf) / h;
            auto i = grid_cell(tx, g.m), j = grid_cell(ty, g.m);
            return to_real(bilinear_value(grid_corners(g, i, j), tx - i, ty - j));
          },
      },
      rho);
}

IntegralResult integrate(const DensitySpec& rho, const Rect& rect) {
  require_in_square(rect);
  auto exact_rational = [](const Rational& v) {
    return IntegralResult{to_real(v), Real(0), true, v};
  };
  return std::visit(
      overloaded{
          [&](const ConstantDensity& d) { return exact_rational(d.c * rect.area()); },
          [&](const BilinearDensity& d) {
            return exact_rational(
                bilinear_cell_integral(d.corners, rect.x0 + kHalf, rect.x1 + kHalf, rect.y0 + kHalf, rect.y1 + kHalf));
          },
          [&](const TrigDensity& d) {
            auto flat = (1 - d.a / 2) * rect.area();
            if (d.a == 0 || cos_equal(d.k, rect.x0, rect.x1) || cos_equal(d.k, rect.y0, rect.y1)) {
              return exact_rational(flat);
            }
            auto osc = to_real(d.a / 2) * sin_integral(d.k, rect.x0, rect.x1) * sin_integral(d.k, rect.y0, rect.y1);
            // A handful of 50-digit operations on O(1) magnitudes.
            return IntegralResult{to_real(flat) - osc, Real("1e-45"), true, std::nullopt};
          },
          [&](const GridDensity& g) {
            validate_grid(g);
            return exact_rational(grid_integral(g, rect));
          },
      },
      rho);
}

std::int64_t cell_quota(const DensitySpec& rho, const Homothety& phi, const Rect& cell) {
  auto result = integrate(rho, phi.apply(cell));
  const auto jac = phi.side * phi.side;
  if (result.rational_value) return floor(*result.rational_value * jac);
  Real scaled = result.value * jac;
  Real nearest_int = boost::multiprecision::round(scaled);
  Real gap = boost::multiprecision::abs(scaled - nearest_int);
  if (gap <= result.error_bound * jac + Real("1e-9")) {
    throw AmbiguousFloor("cell integral " + scaled.str(20) + " is within tolerance of an integer");
  }
  return boost::multiprecision::floor(scaled).convert_to<std::int64_t>();
}

RangeCertificate density_range(const DensitySpec& rho) {
  RangeCertificate out = std::visit(
      overloaded{
          [](const ConstantDensity& d) { return RangeCertificate{d.c, d.c, false, {}}; },
          [](const BilinearDensity& d) {
            auto [lo, hi] = std::minmax_element(d.corners.begin(), d.corners.end());
            return RangeCertificate{*lo, *hi, *lo < *hi, {}};
          },
          [](const TrigDensity& d) {
            if (d.k <= 0) throw RangeError("trig density: frequency must be positive (k)");
            if (d.a < 0) throw RangeError("trig density: amplitude must be nonnegative (a)");
            // sin(2 pi k x) reaches +-1 inside I^2 for every k >= 1, so the product spans [-1, 1].
            return RangeCertificate{1 - d.a, Rational(1), d.a > 0, {}};
          },
          [](const GridDensity& g) {
            validate_grid(g);
            // Bilinear interpolation attains its extrema at the nodes.
            auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
            return RangeCertificate{*lo, *hi, *lo < *hi, {}};
          },
      },
      rho);
  if (!out.strict) out.warnings.push_back("min == max: density is constant, strict inequality min < max fails");
  return out;
}

RangeCertificate certify_range(const DensitySpec& rho) {
  auto cert = density_range(rho);
  auto param = [&](const Rational& bad) -> std::string {
    return std::visit(overloaded{[](const ConstantDensity&) { return std::string("c"); },
                                 [&](const BilinearDensity& d) {
                                   auto it = std::find(d.corners.begin(), d.corners.end(), bad);
                                   return "corners[" + std::to_string(it - d.corners.begin()) + "]";
                                 },
                                 [](const TrigDensity&) { return std::string("a"); },
                                 [&](const GridDensity& g) {
                                   auto it = std::find(g.values.begin(), g.values.end(), bad);
                                   return "values[" + std::to_string(it - g.values.begin()) + "]";
                                 }},
                      rho);
  };
  if (cert.min < kMinDensity) {
    throw RangeError(variant_name(rho) + " density: minimum " + to_string(cert.min) + " < 8/9 (" + param(cert.min) +
                     ")");
  }
  if (cert.max > 1) {
    throw RangeError(variant_name(rho) + " density: maximum " + to_string(cert.max) + " > 1 (" + param(cert.max) +
                     ")");
  }
  return cert;
}

}  // namespace delone
