#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "delone/geometry.hpp"

namespace delone {

/// Finite bijection between two point sets: source index i maps to target
/// index image(i). The target holds exactly the image points.
class BijectionTable {
 public:
  BijectionTable() = default;
  /// Throws ShapeError unless `image` is a permutation of the target indices.
  BijectionTable(PointSet source, PointSet target, std::vector<std::size_t> image);

  /// Builds the table from (source numerator, target numerator) pairs.
  /// Throws DuplicatePoint on repeated sources or targets.
  static BijectionTable from_pairs(const std::vector<std::pair<LatticePoint, LatticePoint>>& pairs,
                                   std::int64_t source_denom = 1, std::int64_t target_denom = 1);

  const PointSet& source() const { return source_; }
  const PointSet& target() const { return target_; }
  std::size_t size() const { return source_.size(); }

  std::size_t image_index(std::size_t i) const { return image_[i]; }
  std::size_t preimage_index(std::size_t t) const { return preimage_[t]; }
  ScaledPoint image(std::size_t i) const { return target_.at(image_[i]); }

  /// Image of an arbitrary point given exactly; nullopt when not in the source.
  std::optional<ScaledPoint> apply(const ScaledPoint& p) const;

  /// Source indices whose images lie in the box.
  std::vector<std::size_t> preimage(const Box& b) const;

  friend bool operator==(const BijectionTable& a, const BijectionTable& b) {
    return a.source_ == b.source_ && a.target_ == b.target_ && a.image_ == b.image_;
  }

 private:
  PointSet source_;
  PointSet target_;
  std::vector<std::size_t> image_;
  std::vector<std::size_t> preimage_;
};

/// Extreme distance ratios d(f x, f y) / d(x, y) over source pairs.
struct DistortionReport {
  Rational upper;  // L
  Rational lower;  // b
  std::pair<std::size_t, std::size_t> upper_witness;
  std::pair<std::size_t, std::size_t> lower_witness;
};

enum class PairScan { full, pruned };

/// Throws DegenerateInput for fewer than two source points. The pruned scan
/// returns the same constants and witnesses as the full one.
DistortionReport lipschitz_constants(const BijectionTable& f, PairScan scan = PairScan::full);

/// Ratio of a source pair, recomputed from scratch.
Rational pair_ratio(const BijectionTable& f, std::size_t i, std::size_t j);

struct ModulusSample {
  Rational radius;
  Rational omega;
  /// Source pair (x, y) attaining omega, when omega > 0.
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

struct CoUniformityModulus {
  std::vector<ModulusSample> samples;
  /// Least-squares slope of log omega against log r over samples with omega > 0.
  double fitted_exponent = 0.0;
};

/// omega(r) = max over x of max{ ||y - x|| : ||f(y) - f(x)|| <= r }.
CoUniformityModulus co_uniformity(const BijectionTable& f, const std::vector<Rational>& radii);

/// Wraps precomputed (r, omega) samples and fits the exponent.
CoUniformityModulus make_modulus(std::vector<ModulusSample> samples);

double fit_exponent(const std::vector<ModulusSample>& samples);

struct OrderGateResult {
  bool pass = false;
  double exponent = 0.0;
  bool tail_ratio_nonincreasing = false;
};

/// Finite-sample proxy for omega(r) = o(r^d): slope <= d - 0.1 and
/// omega(r)/r^d nonincreasing over the top octave. Needs >= 4 samples
/// spanning >= 2 octaves, otherwise InsufficientData.
OrderGateResult order_gate(const CoUniformityModulus& m, int d);

struct BallCertificate {
  Box ball;
  std::size_t preimage_size = 0;
  /// Largest C*r-separated subset found in the preimage at the reported C.
  std::size_t separated_size = 0;
  bool exact = true;
};

struct RegularityEstimate {
  std::int64_t constant = 0;  // C_hat
  bool approximate = false;   // some ball fell back to the greedy search
  std::vector<BallCertificate> certificates;
};

/// Smallest C in [1, search_cap] such that no sampled ball B(y, r) has a
/// C r-separated preimage subset with more than C points. Throws CapExceeded.
RegularityEstimate regularity_constant(const BijectionTable& f, const std::vector<Box>& balls,
                                       std::int64_t search_cap = 64);

/// Certified lower bound on the Lipschitz constant of any injection of
/// `source` into a lattice of spacing `target_spacing`, from sup-norm ball counts.
Rational counting_lower_bound(const PointSet& source, const Rational& target_spacing,
                              const std::vector<Rational>& radii);

struct EscapeLevel {
  std::size_t j = 0;
  Rational radius;
  bool skipped = false;  // preimage of Q_j empty
  std::size_t x_star = 0;
  Rational x_star_norm;
  Rational boundary_distance;
  bool within_bound = true;  // boundary_distance <= L / l
  /// Preimage of Q_{j-1} inside Ann(0, ||x_j||, ||x_{j-1}||) avoids Q_j (j >= 1).
  bool annulus_containment = true;
  /// Same inclusion taken over the preimage of Q_0 (diagnostic only).
  bool annulus_containment_q0 = true;
  std::optional<std::size_t> annulus_witness;
};

struct EscapeDiagnostic {
  Rational threshold;  // L / l
  std::vector<EscapeLevel> levels;
  std::size_t boundary_violations = 0;
  std::size_t annulus_violations = 0;
  std::size_t annulus_q0_violations = 0;
};

/// Radii R_j = r0 - j L / scale for every j with R_j > 0.
std::vector<Rational> nested_radii(const Rational& r0, const Rational& lipschitz, std::int64_t scale);

/// Boundary-escape diagnostic for a normalized map with source denominator l.
/// Q_j is the open ball B(center, radii[j]); radii must be strictly decreasing.
/// `window` is the region where the source is materialized (I^2 for patches).
/// Throws PreconditionError when a level's argmax has a lattice neighbour outside the window.
EscapeDiagnostic escape_check(const BijectionTable& fn, const ScaledPoint& center, const std::vector<Rational>& radii,
                              const Rational& lipschitz, const Rect& window);

}  // namespace delone
