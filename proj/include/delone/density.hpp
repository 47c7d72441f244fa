#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "delone/geometry.hpp"
#include "delone/rational.hpp"

namespace delone {

// Densities live on I^2 = [-1/2, 1/2]^2.

struct ConstantDensity {
  Rational c;
};

/// Bilinear interpolation of corner values ordered
/// (-1/2,-1/2), (1/2,-1/2), (-1/2,1/2), (1/2,1/2).
struct BilinearDensity {
  std::array<Rational, 4> corners;
};

/// rho(x, y) = 1 - (a/2) (1 + sin(2 pi k x) sin(2 pi k y)).
struct TrigDensity {
  std::int64_t k = 1;
  Rational a;
};

/// m x m node values on a uniform grid over I^2 (row-major, y outer),
/// bilinearly interpolated. m >= 2.
struct GridDensity {
  std::int64_t m = 2;
  std::vector<Rational> values;

  const Rational& at(std::int64_t i, std::int64_t j) const { return values[static_cast<std::size_t>(j * m + i)]; }
};

using DensitySpec = std::variant<ConstantDensity, BilinearDensity, TrigDensity, GridDensity>;

/// Lower bound the construction needs: rho >= 8/9 keeps every cell quota
/// above the 2Z^2 requirement.
inline const Rational kMinDensity{8, 9};

Rect unit_square();

/// Value at (x, y) in I^2. Throws DomainError outside I^2.
Real eval(const DensitySpec& rho, const Rational& x, const Rational& y);

struct IntegralResult {
  Real value;
  Real error_bound;
  bool exact = false;
  /// Set when the integral is an exact rational (Constant, Bilinear, Grid,
  /// and Trig cells where the oscillating term vanishes identically).
  std::optional<Rational> rational_value;
};

/// Integral of rho over rect (closure irrelevant). Throws DomainError if rect is not inside I^2.
IntegralResult integrate(const DensitySpec& rho, const Rect& rect);

/// The affine map phi_n taking S_n = anchor + [0, side]^2 onto I^2.
struct Homothety {
  LatticePoint anchor;
  std::int64_t side = 1;

  ScaledPoint apply(LatticePoint p) const {
    return {2 * (p.x - anchor.x) - side, 2 * (p.y - anchor.y) - side, 2 * side};
  }
  Rect apply(const Rect& r) const;
};

/// floor of the integral of rho o phi over `cell` (S_n coordinates).
/// Throws AmbiguousFloor when a non-exact integral sits within its error
/// bound plus 1e-9 of an integer.
std::int64_t cell_quota(const DensitySpec& rho, const Homothety& phi, const Rect& cell);

struct RangeCertificate {
  Rational min;
  Rational max;
  bool strict = false;
  std::vector<std::string> warnings;
};

/// Rigorous range of rho. Throws RangeError unless 8/9 <= min and max <= 1.
RangeCertificate certify_range(const DensitySpec& rho);

/// Range without the admissibility check.
RangeCertificate density_range(const DensitySpec& rho);

std::string variant_name(const DensitySpec& rho);

}  // namespace delone
