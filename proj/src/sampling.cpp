#include "biconf/sampling.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace biconf {

std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> salt) {
    auto step = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = step(seed);
    for (auto s : salt) {
        h = step(h ^ step(s));
    }
    return h;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("Rng::below: empty range");
    }
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = engine_();
    while (v >= limit) {
        v = engine_();
    }
    return v % n;
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) {
        throw std::invalid_argument("Rng::between: empty range");
    }
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

Rational Rng::rational(const Rational& bound, int max_den) {
    const auto q = between(1, max_den);
    const Rational limit = bound * q;
    const mpz_class top = limit.get_num() / limit.get_den();  // floor, limit >= 0
    const std::int64_t p = between(-top.get_si(), top.get_si());
    Rational r(static_cast<long>(p), static_cast<unsigned long>(q));
    r.canonicalize();
    return r;
}

Rational Rng::positive_rational(const Rational& bound, int max_den) {
    for (;;) {
        const auto q = between(1, max_den);
        const Rational limit = bound * q;
        const mpz_class top = limit.get_num() / limit.get_den();
        if (top < 1) {
            continue;
        }
        Rational r(static_cast<long>(between(1, top.get_si())), static_cast<unsigned long>(q));
        r.canonicalize();
        return r;
    }
}

RationalVector random_point(Rng& rng, int dim, const Rational& radius, int max_den) {
    const Rational r2 = radius * radius;
    for (;;) {
        RationalVector x(static_cast<std::size_t>(dim));
        Rational n = 0;
        for (auto& v : x) {
            v = rng.rational(radius, max_den);
            n += v * v;
        }
        if (n < r2) {
            return x;
        }
    }
}

bool admissible(const ConformalInstance& inst, std::span<const Rational> x, const Rational& exclusion) {
    if (inst.map.epsilon == 2) {
        Rational d = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const Rational t = x[i] - inst.map.a[i];
            d += t * t;
        }
        if (d < exclusion * exclusion || sgn(d) == 0) {
            return false;
        }
    }
    if (!in_domain<Rational>(inst.domain, x)) {
        return false;
    }
    try {
        return sgn(conformal_factor_value(inst.domain, inst.target, inst.map, x)) > 0;
    } catch (const SingularityError&) {
        return false;
    } catch (const InadmissiblePointError&) {
        return false;
    }
}

std::vector<RationalVector> sample_points(const SamplePlan& plan, const ConformalInstance& inst) {
    if (!plan.explicit_points.empty()) {
        return plan.explicit_points;
    }
    if (plan.count < 1) {
        throw SamplingError("sample count must be >= 1");
    }
    Rng rng(plan.seed);
    const int m = inst.dim();
    Rational radius = plan.radius;
    if (inst.domain.chart() == Chart::hyperbolic && radius > 1) {
        radius = 1;
    }
    const bool pullback = inst.target.chart() == Chart::hyperbolic;
    const long budget = static_cast<long>(kAttemptsPerPoint) * plan.count;

    std::vector<RationalVector> points;
    long failures = 0;
    bool use_pullback = false;
    while (static_cast<int>(points.size()) < plan.count) {
        RationalVector x;
        if (use_pullback) {
            const RationalVector y = random_point(rng, m, Rational(1), plan.max_den);
            try {
                x = inverse_apply(inst.map, y);
            } catch (const SingularityError&) {
                ++failures;
                continue;
            }
        } else {
            x = random_point(rng, m, radius, plan.max_den);
        }
        if (admissible(inst, x, plan.exclusion) &&
            std::find(points.begin(), points.end(), x) == points.end()) {
            points.push_back(std::move(x));
        } else {
            ++failures;
            if (failures >= budget) {
                throw SamplingError("could not find " + std::to_string(plan.count) + " admissible points for " +
                                    inst.describe() + " after " + std::to_string(failures) + " rejections");
            }
            use_pullback = pullback && !use_pullback;
        }
    }
    return points;
}

namespace {

RationalMatrix random_rotation(Rng& rng, int dim, const RandomMapOptions& opts) {
    std::vector<int> perm(static_cast<std::size_t>(dim));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = dim - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    std::vector<int> signs(static_cast<std::size_t>(dim));
    for (auto& s : signs) {
        s = rng.below(2) == 0 ? 1 : -1;
    }
    RationalMatrix skew(dim);
    for (int e = 0; e < opts.skew_entries; ++e) {
        const auto i = static_cast<int>(rng.below(static_cast<std::uint64_t>(dim)));
        auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(dim - 1)));
        if (j >= i) {
            ++j;
        }
        const Rational v = rng.rational(Rational(2), 4);
        skew(i, j) = v;
        skew(j, i) = -v;
    }
    return signed_permutation(perm, signs) * cayley_orthogonal(skew);
}

}  // namespace

MobiusMap random_map(Rng& rng, int dim, int epsilon, const SpaceFormModel& target, const RandomMapOptions& opts) {
    MobiusMap map;
    map.epsilon = epsilon;
    map.a.resize(static_cast<std::size_t>(dim));
    for (auto& v : map.a) {
        v = rng.rational(Rational(1), opts.max_den);
    }
    // b = 0 with k = 1 would make some curved-target maps isometries, a
    // special case the sweeps are not after.
    do {
        if (target.chart() == Chart::hyperbolic) {
            map.b = random_point(rng, dim, Rational(1, 2), opts.max_den);
        } else {
            map.b.assign(static_cast<std::size_t>(dim), Rational(0));
            for (auto& v : map.b) {
                v = rng.rational(Rational(1), opts.max_den);
            }
        }
    } while (all_zero<Rational>(map.b));
    map.k = rng.positive_rational(target.chart() == Chart::hyperbolic ? Rational(1, 8) : Rational(2), opts.max_den);
    map.A = random_rotation(rng, dim, opts);
    return validate(map);
}

}  // namespace biconf
