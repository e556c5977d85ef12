#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <vector>

#include "biconf/mobius.hpp"
#include "biconf/residuals.hpp"
#include "biconf/scalar.hpp"
#include "biconf/spaceform.hpp"

namespace biconf {

// splitmix64 finalizer; used to derive independent per-cell seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> salt);

// Deterministic across platforms: the standard distributions are
// implementation-defined, so bounded draws are done here by rejection.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t below(std::uint64_t n);          // uniform in [0, n)
    std::int64_t between(std::int64_t lo, std::int64_t hi);  // uniform in [lo, hi]

    // p/q with 1 <= q <= max_den and |p/q| <= bound.
    Rational rational(const Rational& bound, int max_den);
    // Same, but strictly positive.
    Rational positive_rational(const Rational& bound, int max_den);

private:
    std::mt19937_64 engine_;
};

struct SamplePlan {
    std::uint64_t seed = 1;
    int count = 20;
    Rational radius{2};             // sampling ball in the domain chart
    Rational exclusion{1, 4};       // keep |x - a| >= exclusion when epsilon = 2
    int max_den = 16;               // coordinate denominators
    std::vector<RationalVector> explicit_points;  // used instead of sampling when non-empty
};

// Rejection attempts per requested point before giving up.
inline constexpr int kAttemptsPerPoint = 1000;

// x is admissible when it lies in the domain chart, keeps the exclusion
// distance from a, maps into the target chart and has lambda(x) > 0.
bool admissible(const ConformalInstance& inst, std::span<const Rational> x, const Rational& exclusion);

// plan.count admissible points. Draws rational points in the ball of radius
// plan.radius (intersected with the unit ball for a hyperbolic domain); for
// hyperbolic targets every other failed draw is replaced by a pullback
// phi^-1(y) of a point y in the target ball. Throws SamplingError after
// kAttemptsPerPoint * count rejections.
std::vector<RationalVector> sample_points(const SamplePlan& plan, const ConformalInstance& inst);

struct RandomMapOptions {
    int max_den = 16;
    int skew_entries = 2;  // nonzero entries above the diagonal of the Cayley generator
};

// Random map of the family with small rational parameters: k > 0, A a signed
// permutation times a Cayley rotation. For hyperbolic targets |b| < 1/2 and
// k <= 1/8 so that images of typical sample points stay inside the ball.
MobiusMap random_map(Rng& rng, int dim, int epsilon, const SpaceFormModel& target,
                     const RandomMapOptions& opts = {});

// Random point with coordinates p/q, q <= max_den, inside the open ball of the
// given radius.
RationalVector random_point(Rng& rng, int dim, const Rational& radius, int max_den);

}  // namespace biconf
