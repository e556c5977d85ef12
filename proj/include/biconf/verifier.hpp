#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biconf/config.hpp"
#include "biconf/report.hpp"
#include "biconf/residuals.hpp"

namespace biconf {

struct RunOptions {
    Mode mode = Mode::exact;
    double tol = 1e-9;
};

// Verdict over n evaluated points. Any nonzero CL means the factor is not a
// conformal factor at all ("inconsistent"). SDL zero everywhere gives
// "harmonic" when grad_bar lambda vanishes at every point and
// "proper-biharmonic" otherwise. "not-biharmonic" needs SDL nonzero at
// ceil(0.95 n) points or more, and anything in between is "indeterminate".
std::string biharmonic_verdict(int evaluated, int cl_nonzero, int sdl_zero, int harmonic_points);

// zero_counts[j - 1] = points where Delta^j phi = 0, j = 1..k. All points
// zero at order k: "harmonic" if already zero at order 1, otherwise
// "proper-<j>-polyharmonic" for the least such j. "not-<k>-polyharmonic"
// when at least ceil(0.95 n) points are nonzero; "indeterminate" otherwise.
std::string polyharmonic_verdict(int evaluated, const std::vector<int>& zero_counts);

// Classification for Mobius maps between space forms, m >= 3: proper
// biharmonic exactly for a flat domain in dimension 4, with epsilon = 2 when
// the target is flat (an affine flat-to-flat map is a homothety, hence
// harmonic); harmonic for flat-to-flat with epsilon = 0; otherwise not
// biharmonic.
std::string expected_biharmonic_verdict(int m, int c1, int c2, int epsilon);

// Inversion-type maps on flat space: Delta^k phi = 0 iff m is even and
// m <= 2k; proper of order k iff m = 2k.
bool expected_polyharmonic_zero(int m, int k);
bool expected_polyharmonic_proper(int m, int k);

PointRecord evaluate_record(const ConformalInstance& inst, std::size_t index, std::span<const Rational> x,
                            const RunOptions& opts, Mutation mutation = Mutation::none);

InstanceReport run_instance(const InstanceConfig& cfg, const RunOptions& opts);
CheckReport run_check(const std::vector<InstanceConfig>& configs, const RunOptions& opts);

struct BiharmonicSweepOptions {
    int m_min = 3;
    int m_max = 8;
    std::vector<int> epsilons{0, 2};
    int trials = 3;
    int points = 20;
    std::uint64_t seed = 1;
};

BiharmonicSweep sweep_biharmonic(const BiharmonicSweepOptions& sweep, const RunOptions& opts);

struct PolySweepOptions {
    int k_min = 1;
    int k_max = 5;
    int m_min = 3;
    int m_max = 12;
    int points = 1;
    std::uint64_t seed = 1;
};

PolySweep sweep_polyharmonic(const PolySweepOptions& sweep, const RunOptions& opts);

SelftestReport selftest(const RunOptions& opts);

}  // namespace biconf
