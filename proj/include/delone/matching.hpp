#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "delone/distortion.hpp"
#include "delone/geometry.hpp"

namespace delone {

enum class MatchMode { lipschitz, bilipschitz };

/// Find f: source -> target minimizing the Lipschitz constant (lipschitz
/// mode) or the bi-Lipschitz distortion K with d/K <= d' <= K d
/// (bilipschitz mode). With `injection`, |source| <= |target| and f need
/// not be onto.
struct MatchInstance {
  PointSet source;
  PointSet target;
  MatchMode mode = MatchMode::lipschitz;
  bool injection = false;
};

struct MatchStats {
  std::uint64_t nodes = 0;
  std::uint64_t feasibility_calls = 0;
  double seconds = 0.0;
};

struct MatchResult {
  BijectionTable assignment;   // source -> used targets
  std::vector<std::size_t> image;  // source index -> index into instance.target
  Rational L_star;
  bool optimal = false;
  MatchStats stats;
};

/// Throws ShapeError for empty instances or incompatible sizes.
void check_shape(const MatchInstance& instance);

/// Objective of an assignment (image[i] indexes instance.target); 1 for a single point.
Rational assignment_cost(const MatchInstance& instance, const std::vector<std::size_t>& image);

/// An assignment with every pair ratio <= upper (and >= lower when given),
/// or nullopt after exhausting the search.
std::optional<std::vector<std::size_t>> feasible(const MatchInstance& instance, const Rational& upper,
                                                 std::optional<Rational> lower = std::nullopt,
                                                 MatchStats* stats = nullptr);

struct ExactMethod {};
struct HeuristicMethod {
  std::uint64_t seed = 0;
  std::uint64_t iterations = 2000;
  std::uint64_t restarts = 10;
};
using MatchMethod = std::variant<ExactMethod, HeuristicMethod>;

MatchResult min_lipschitz(const MatchInstance& instance, const MatchMethod& method = ExactMethod{});

inline constexpr std::uint64_t kBruteForceCap = 10'000'000;

/// Full enumeration of injections. Throws CapacityError above `cap`.
MatchResult brute_force_min(const MatchInstance& instance, std::uint64_t cap = kBruteForceCap);

/// Number of injections of |source| points into |target| points, saturating at cap + 1.
std::uint64_t injection_count(std::size_t source, std::size_t target, std::uint64_t cap);

}  // namespace delone
