#include "biconf/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biconf/parallel.hpp"
#include "biconf/sampling.hpp"

namespace biconf {

namespace {

int ceil_fraction(int n, int num, int den) {
    return (n * num + den - 1) / den;
}

// Points that must be nonzero before "not" verdicts are issued.
int nonzero_quorum(int evaluated) {
    return ceil_fraction(evaluated, 95, 100);
}

std::string lambda_string(const Rational& L) {
    return to_string(L);
}

std::string lambda_string(double L) {
    return format_double(L);
}

template <typename T>
ResidualEntry entry(const Residual<T>& r) {
    return ResidualEntry{r.norm, r.scale, r.exact_zero};
}

// lhs == factor * rhs: exactly for rationals, within tol times the combined
// scale for doubles.
template <typename T>
bool identity_holds(const Residual<T>& lhs, const Residual<T>& rhs, int factor, double tol) {
    if constexpr (std::is_same_v<T, Rational>) {
        (void)tol;
        return proportional(lhs.value, rhs.value, Rational(factor));
    } else {
        std::vector<double> diff(lhs.value.size());
        for (std::size_t i = 0; i < diff.size(); ++i) {
            diff[i] = lhs.value[i] - factor * rhs.value[i];
        }
        return euclidean_norm<double>(diff) <= tol * (lhs.scale + std::abs(factor) * rhs.scale);
    }
}

template <typename T>
PointRecord make_record(const ConformalInstance& inst, std::size_t index, std::span<const Rational> x,
                        const RunOptions& opts, Mutation mutation) {
    const auto r = evaluate_point<T>(inst, x, EvalOptions{opts.tol, mutation});
    PointRecord rec;
    rec.index = index;
    rec.x.assign(x.begin(), x.end());
    rec.lambda = lambda_string(r.d.L);
    rec.cl = entry(r.cl);
    rec.sdl = entry(r.sdl);
    rec.nd = entry(r.nd);
    rec.nd2 = entry(r.nd2);
    rec.harmonic = r.harmonic;
    rec.nd_equals_sdl = identity_holds(r.nd, r.sdl, 1, opts.tol);
    rec.nd2_equals_minus_sdl = identity_holds(r.nd2, r.sdl, -1, opts.tol);
    rec.nd_equals_twice_sdl = identity_holds(r.nd, r.sdl, 2, opts.tol);
    rec.nd2_equals_twice_sdl = identity_holds(r.nd2, r.sdl, 2, opts.tol);
    return rec;
}

template <typename T>
bool vector_zero(const std::vector<T>& v, double scale, double tol) {
    if constexpr (std::is_same_v<T, Rational>) {
        (void)scale;
        (void)tol;
        return all_zero<T>(v);
    } else {
        return euclidean_norm<T>(v) <= tol * scale;
    }
}

template <typename T>
bool matches_closed_form(const std::vector<T>& jet_value, const RationalVector& closed, double scale, double tol) {
    if constexpr (std::is_same_v<T, Rational>) {
        (void)scale;
        (void)tol;
        return jet_value == closed;
    } else {
        std::vector<double> diff(jet_value.size());
        for (std::size_t i = 0; i < diff.size(); ++i) {
            diff[i] = jet_value[i] - closed[i].get_d();
        }
        return euclidean_norm<double>(diff) <= tol * std::max(scale, euclidean_norm<double>(jet_value));
    }
}

template <typename T>
PolyPointRecord make_poly_record(const MobiusMap& map, int k, std::size_t index, std::span<const Rational> x,
                                 double tol) {
    const auto profile = polyharmonic_profile<T>(map, k, x);
    PolyPointRecord rec;
    rec.index = index;
    rec.x.assign(x.begin(), x.end());
    for (int j = 1; j <= k; ++j) {
        const auto& v = profile.values[static_cast<std::size_t>(j)];
        const double scale = profile.scale[static_cast<std::size_t>(j)];
        rec.orders.push_back(OrderRecord{j, euclidean_norm<T>(v), scale, vector_zero(v, scale, tol)});
    }
    rec.closed_form_match = matches_closed_form(profile.values[static_cast<std::size_t>(k)],
                                                polyharmonic_closed_form(map, k, x),
                                                profile.scale[static_cast<std::size_t>(k)], tol);
    return rec;
}

PolyPointRecord poly_record(const MobiusMap& map, int k, std::size_t index, std::span<const Rational> x,
                            const RunOptions& opts) {
    return opts.mode == Mode::exact ? make_poly_record<Rational>(map, k, index, x, opts.tol)
                                    : make_poly_record<double>(map, k, index, x, opts.tol);
}

// Per-order zero flags and closed-form agreement for j = 1..k_max.
struct ProfileSummary {
    std::vector<bool> zero;
    std::vector<bool> closed_form;
};

template <typename T>
ProfileSummary summarize_profile(const MobiusMap& map, int k_max, std::span<const Rational> x, double tol) {
    const auto profile = polyharmonic_profile<T>(map, k_max, x);
    ProfileSummary out;
    for (int j = 1; j <= k_max; ++j) {
        const auto& v = profile.values[static_cast<std::size_t>(j)];
        const double scale = profile.scale[static_cast<std::size_t>(j)];
        out.zero.push_back(vector_zero(v, scale, tol));
        out.closed_form.push_back(matches_closed_form(v, polyharmonic_closed_form(map, j, x), scale, tol));
    }
    return out;
}

ProfileSummary profile_summary(const MobiusMap& map, int k_max, std::span<const Rational> x, const RunOptions& opts) {
    return opts.mode == Mode::exact ? summarize_profile<Rational>(map, k_max, x, opts.tol)
                                    : summarize_profile<double>(map, k_max, x, opts.tol);
}

// Outcome of one sample point: a record or the reason it was skipped.
template <typename Record>
struct PointOutcome {
    std::optional<Record> record;
    std::optional<SkippedPoint> skipped;
};

template <typename Record, typename Eval>
void evaluate_points(const std::vector<RationalVector>& points, Eval&& eval, std::vector<Record>& records,
                     std::vector<SkippedPoint>& skipped) {
    std::vector<PointOutcome<Record>> out(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        try {
            out[i].record = eval(i, points[i]);
        } catch (const SingularityError& e) {
            out[i].skipped = SkippedPoint{i, points[i], e.what()};
        } catch (const InadmissiblePointError& e) {
            out[i].skipped = SkippedPoint{i, points[i], e.what()};
        }
    });
    for (auto& o : out) {
        if (o.record) {
            records.push_back(std::move(*o.record));
        } else {
            skipped.push_back(std::move(*o.skipped));
        }
    }
}

std::string biharmonic_verdict_of(const std::vector<PointRecord>& points) {
    int cl_nonzero = 0;
    int sdl_zero = 0;
    int harmonic = 0;
    for (const auto& p : points) {
        cl_nonzero += p.cl.zero ? 0 : 1;
        sdl_zero += p.sdl.zero ? 1 : 0;
        harmonic += p.harmonic ? 1 : 0;
    }
    return biharmonic_verdict(static_cast<int>(points.size()), cl_nonzero, sdl_zero, harmonic);
}

}  // namespace

std::string biharmonic_verdict(int evaluated, int cl_nonzero, int sdl_zero, int harmonic_points) {
    if (evaluated <= 0) {
        return "indeterminate";
    }
    if (cl_nonzero > 0) {
        return "inconsistent";
    }
    if (sdl_zero == evaluated) {
        return harmonic_points == evaluated ? "harmonic" : "proper-biharmonic";
    }
    if (evaluated - sdl_zero >= nonzero_quorum(evaluated)) {
        return "not-biharmonic";
    }
    return "indeterminate";
}

std::string polyharmonic_verdict(int evaluated, const std::vector<int>& zero_counts) {
    if (evaluated <= 0 || zero_counts.empty()) {
        return "indeterminate";
    }
    const int k = static_cast<int>(zero_counts.size());
    if (zero_counts.back() == evaluated) {
        for (int j = 1; j <= k; ++j) {
            if (zero_counts[static_cast<std::size_t>(j - 1)] == evaluated) {
                return j == 1 ? "harmonic" : "proper-" + std::to_string(j) + "-polyharmonic";
            }
        }
    }
    if (evaluated - zero_counts.back() >= nonzero_quorum(evaluated)) {
        return "not-" + std::to_string(k) + "-polyharmonic";
    }
    return "indeterminate";
}

std::string expected_biharmonic_verdict(int m, int c1, int c2, int epsilon) {
    if (c1 == 0 && c2 == 0 && epsilon == 0) {
        return "harmonic";
    }
    if (m == 4 && c1 == 0 && (c2 != 0 || epsilon == 2)) {
        return "proper-biharmonic";
    }
    return "not-biharmonic";
}

bool expected_polyharmonic_zero(int m, int k) {
    return m % 2 == 0 && m <= 2 * k;
}

bool expected_polyharmonic_proper(int m, int k) {
    return m == 2 * k;
}

PointRecord evaluate_record(const ConformalInstance& inst, std::size_t index, std::span<const Rational> x,
                            const RunOptions& opts, Mutation mutation) {
    return opts.mode == Mode::exact ? make_record<Rational>(inst, index, x, opts, mutation)
                                    : make_record<double>(inst, index, x, opts, mutation);
}

InstanceReport run_instance(const InstanceConfig& cfg, const RunOptions& opts) {
    InstanceReport rep;
    rep.name = cfg.name;
    rep.instance = cfg.instance;
    rep.check = cfg.check;
    rep.order = cfg.order;
    rep.plan = cfg.plan;
    rep.expected = cfg.expect;

    const auto points = sample_points(cfg.plan, cfg.instance);
    if (cfg.check == CheckKind::biharmonic) {
        evaluate_points(
            points, [&](std::size_t i, const RationalVector& x) { return evaluate_record(cfg.instance, i, x, opts); },
            rep.points, rep.skipped);
        rep.verdict = biharmonic_verdict_of(rep.points);
    } else {
        if (cfg.instance.domain.chart() != Chart::flat || cfg.instance.target.chart() != Chart::flat) {
            throw ModelError("polyharmonic checks need flat domain and target");
        }
        evaluate_points(
            points,
            [&](std::size_t i, const RationalVector& x) { return poly_record(cfg.instance.map, cfg.order, i, x, opts); },
            rep.poly_points, rep.skipped);
        std::vector<int> zero_counts(static_cast<std::size_t>(cfg.order), 0);
        for (const auto& p : rep.poly_points) {
            for (const auto& o : p.orders) {
                zero_counts[static_cast<std::size_t>(o.order - 1)] += o.zero ? 1 : 0;
            }
        }
        rep.verdict = polyharmonic_verdict(static_cast<int>(rep.poly_points.size()), zero_counts);
    }
    rep.match = !rep.expected || *rep.expected == rep.verdict;
    return rep;
}

CheckReport run_check(const std::vector<InstanceConfig>& configs, const RunOptions& opts) {
    CheckReport report;
    report.mode = opts.mode;
    report.tol = opts.tol;
    for (const auto& cfg : configs) {
        report.instances.push_back(run_instance(cfg, opts));
    }
    return report;
}

namespace {

constexpr int kMapRedraws = 10;

SpaceFormModel model_for(int curvature, int m) {
    return SpaceFormModel(curvature > 0 ? Chart::sphere : curvature < 0 ? Chart::hyperbolic : Chart::flat, m);
}

TrialRecord run_trial(int m, int c1, int c2, int epsilon, int trial, const BiharmonicSweepOptions& sweep,
                      const RunOptions& opts) {
    const SpaceFormModel domain = model_for(c1, m);
    const SpaceFormModel target = model_for(c2, m);
    const std::uint64_t trial_seed = mix_seed(
        sweep.seed, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(c1 + 1),
                     static_cast<std::uint64_t>(c2 + 1), static_cast<std::uint64_t>(epsilon),
                     static_cast<std::uint64_t>(trial)});
    Rng rng(trial_seed);

    TrialRecord rec;
    for (int attempt = 0; attempt < kMapRedraws; ++attempt) {
        rec.map = random_map(rng, m, epsilon, target);
        SamplePlan plan;
        plan.seed = mix_seed(trial_seed, {static_cast<std::uint64_t>(attempt)});
        plan.count = sweep.points;
        rec.sample_seed = plan.seed;
        std::vector<RationalVector> points;
        ConformalInstance inst;
        try {
            inst = make_instance(domain, target, rec.map);
            points = sample_points(plan, inst);
        } catch (const SamplingError&) {
            continue;
        } catch (const ValidationError&) {
            continue;
        }
        std::vector<PointRecord> records;
        std::vector<SkippedPoint> skipped;
        for (std::size_t i = 0; i < points.size(); ++i) {
            try {
                records.push_back(evaluate_record(inst, i, points[i], opts));
            } catch (const SingularityError& e) {
                skipped.push_back(SkippedPoint{i, points[i], e.what()});
            } catch (const InadmissiblePointError& e) {
                skipped.push_back(SkippedPoint{i, points[i], e.what()});
            }
        }
        rec.evaluated = static_cast<int>(records.size());
        rec.skipped = static_cast<int>(skipped.size());
        for (const auto& p : records) {
            rec.sdl_zero += p.sdl.zero ? 1 : 0;
            rec.harmonic_points += p.harmonic ? 1 : 0;
            rec.cl_nonzero += p.cl.zero ? 0 : 1;
        }
        rec.verdict = biharmonic_verdict(rec.evaluated, rec.cl_nonzero, rec.sdl_zero, rec.harmonic_points);
        return rec;
    }
    rec.verdict = "sampling-failed";
    return rec;
}

}  // namespace

BiharmonicSweep sweep_biharmonic(const BiharmonicSweepOptions& sweep, const RunOptions& opts) {
    if (sweep.m_min < 3 || sweep.m_max < sweep.m_min || sweep.trials < 1 || sweep.points < 1) {
        throw std::invalid_argument("sweep-biharmonic: need 3 <= m_min <= m_max, trials >= 1, points >= 1");
    }
    BiharmonicSweep out;
    out.mode = opts.mode;
    out.seed = sweep.seed;
    out.trials = sweep.trials;
    out.points = sweep.points;
    for (int m = sweep.m_min; m <= sweep.m_max; ++m) {
        for (int c1 = -1; c1 <= 1; ++c1) {
            for (int c2 = -1; c2 <= 1; ++c2) {
                for (int eps : sweep.epsilons) {
                    BiharmonicCell cell;
                    cell.m = m;
                    cell.c1 = c1;
                    cell.c2 = c2;
                    cell.epsilon = eps;
                    cell.expected = expected_biharmonic_verdict(m, c1, c2, eps);
                    cell.trials.resize(static_cast<std::size_t>(sweep.trials));
                    out.cells.push_back(std::move(cell));
                }
            }
        }
    }
    const std::size_t trials = static_cast<std::size_t>(sweep.trials);
    parallel_for(out.cells.size() * trials, [&](std::size_t job) {
        auto& cell = out.cells[job / trials];
        const int t = static_cast<int>(job % trials);
        cell.trials[static_cast<std::size_t>(t)] = run_trial(cell.m, cell.c1, cell.c2, cell.epsilon, t, sweep, opts);
    });
    for (auto& cell : out.cells) {
        cell.verdict = cell.trials.front().verdict;
        for (const auto& t : cell.trials) {
            if (t.verdict != cell.verdict) {
                cell.verdict = "mixed";
            }
        }
        cell.match = cell.verdict == cell.expected;
    }
    return out;
}

PolySweep sweep_polyharmonic(const PolySweepOptions& sweep, const RunOptions& opts) {
    if (sweep.k_min < 1 || sweep.k_max < sweep.k_min || sweep.m_min < 2 || sweep.m_max < sweep.m_min ||
        sweep.points < 1) {
        throw std::invalid_argument("sweep-polyharmonic: need 1 <= k_min <= k_max, 2 <= m_min <= m_max, points >= 1");
    }
    PolySweep out;
    out.mode = opts.mode;
    out.seed = sweep.seed;
    out.points = sweep.points;

    std::vector<int> dims;
    for (int m = sweep.m_min; m <= sweep.m_max; ++m) {
        dims.push_back(m);
    }
    std::vector<MobiusMap> maps;
    std::vector<std::vector<RationalVector>> points;
    for (int m : dims) {
        Rng rng(mix_seed(sweep.seed, {static_cast<std::uint64_t>(m)}));
        const SpaceFormModel flat(Chart::flat, m);
        maps.push_back(random_map(rng, m, 2, flat));
        SamplePlan plan;
        plan.seed = mix_seed(sweep.seed, {static_cast<std::uint64_t>(m), 1});
        plan.count = sweep.points;
        points.push_back(sample_points(plan, make_instance(flat, flat, maps.back())));
    }
    // One profile of order k_max per (m, point) serves every k.
    const auto per_dim = static_cast<std::size_t>(sweep.points);
    std::vector<ProfileSummary> summaries(dims.size() * per_dim);
    parallel_for(summaries.size(), [&](std::size_t job) {
        const std::size_t c = job / per_dim;
        summaries[job] = profile_summary(maps[c], sweep.k_max, points[c][job % per_dim], opts);
    });

    for (int k = sweep.k_min; k <= sweep.k_max; ++k) {
        for (std::size_t c = 0; c < dims.size(); ++c) {
            const int m = dims[c];
            PolyCell cell;
            cell.k = k;
            cell.m = m;
            cell.points = sweep.points;
            cell.zero = true;
            cell.lower_zero = true;
            cell.closed_form_match = true;
            for (std::size_t p = 0; p < per_dim; ++p) {
                const auto& s = summaries[c * per_dim + p];
                const auto j = static_cast<std::size_t>(k - 1);
                cell.zero = cell.zero && s.zero[j];
                cell.lower_zero = cell.lower_zero && (k >= 2 && s.zero[j - 1]);
                cell.closed_form_match = cell.closed_form_match && s.closed_form[j];
            }
            cell.proper = cell.zero && !cell.lower_zero;
            cell.expected_zero = expected_polyharmonic_zero(m, k);
            cell.expected_proper = expected_polyharmonic_proper(m, k);
            cell.match = cell.zero == cell.expected_zero && cell.proper == cell.expected_proper &&
                         cell.closed_form_match;
            out.cells.push_back(cell);
        }
    }
    return out;
}

namespace {

class Suite {
public:
    explicit Suite(std::string name) { result_.name = std::move(name); }

    void check(bool ok, const std::string& what) {
        ++result_.checks;
        if (!ok) {
            result_.failures.push_back(what);
        }
    }

    // Runs fn, turning an unexpected exception into a failure.
    template <typename F>
    void guard(const std::string& what, F&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            ++result_.checks;
            result_.failures.push_back(what + ": " + e.what());
        }
    }

    SuiteResult take() { return std::move(result_); }

private:
    SuiteResult result_;
};

struct SampledInstance {
    ConformalInstance inst;
    std::vector<RationalVector> points;
};

// Every chart pair and epsilon in dimensions 3..5, a few points each.
std::vector<SampledInstance> corpus(std::uint64_t seed, int points) {
    std::vector<SampledInstance> out;
    for (int m = 3; m <= 5; ++m) {
        for (int c1 = -1; c1 <= 1; ++c1) {
            for (int c2 = -1; c2 <= 1; ++c2) {
                for (int eps : {0, 2}) {
                    Rng rng(mix_seed(seed, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(c1 + 1),
                                            static_cast<std::uint64_t>(c2 + 1), static_cast<std::uint64_t>(eps)}));
                    const SpaceFormModel target = model_for(c2, m);
                    for (int attempt = 0; attempt < kMapRedraws; ++attempt) {
                        try {
                            auto inst = make_instance(model_for(c1, m), target, random_map(rng, m, eps, target));
                            SamplePlan plan;
                            plan.seed = rng.below(1u << 30);
                            plan.count = points;
                            auto pts = sample_points(plan, inst);
                            out.push_back(SampledInstance{std::move(inst), std::move(pts)});
                            break;
                        } catch (const SamplingError&) {
                        }
                    }
                }
            }
        }
    }
    return out;
}

std::string where(const ConformalInstance& inst, std::span<const Rational> x) {
    std::ostringstream out;
    out << inst.describe() << " at (";
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << (i > 0 ? ", " : "") << to_string(x[i]);
    }
    out << ")";
    return out.str();
}

SuiteResult jet_oracles() {
    Suite suite("jet-oracles");
    suite.guard("jet-oracles", [&] {
        // |x|^4 in m = 3 at (1, 0, 0): lap = (4m + 8)|x|^2 = 20, lap^2 = 8m(m + 2) = 120.
        const RationalVector p{Rational(1), Rational(0), Rational(0)};
        auto x = seed<Rational>(p, 4);
        const auto r2 = squared_norm<Rational>(x);
        const auto r4 = r2 * r2;
        suite.check(laplacian(r4).value() == 20, "lap |x|^4 at (1,0,0) != 20");
        suite.check(iterated_laplacian(r4, 2) == 120, "lap^2 |x|^4 in m=3 != 120");
        suite.check(iterated_laplacian(r4, 1) == laplacian(r4).value(), "iterated_laplacian(., 1) != lap");

        // 1/(1 - x) = 1 + x + x^2 at 0.
        const RationalVector zero{Rational(0)};
        auto t = seed<Rational>(zero, 2);
        const auto g = Rational(1) / (Rational(1) - t[0]);
        const auto c = g.coefficients();
        suite.check(c.size() == 3 && c[0] == 1 && c[1] == 1 && c[2] == 1, "1/(1-x) != 1 + x + x^2");

        // Round trip and lap = sum of second partials on a rational function.
        const RationalVector q{Rational(1, 3), Rational(-2, 5), Rational(3, 7)};
        auto y = seed<Rational>(q, 3);
        const auto a = Rational(2) + y[0] * y[1] - y[2] * y[2] * y[0];
        const auto b = Rational(3) + squared_norm<Rational>(y);
        const auto h = a / b;
        const auto back = h * b;
        suite.check(std::ranges::equal(back.coefficients(), a.coefficients()), "(a/b) b != a");
        auto sum = partial(partial(h, 0), 0);
        for (int i = 1; i < 3; ++i) {
            sum = sum + partial(partial(h, i), i);
        }
        suite.check(std::ranges::equal(laplacian(h).coefficients(), sum.coefficients()),
                    "lap != sum of second partials");
    });
    return suite.take();
}

SuiteResult conformality(const std::vector<SampledInstance>& cases) {
    Suite suite("conformality");
    for (const auto& c : cases) {
        for (const auto& x : c.points) {
            suite.guard(where(c.inst, x), [&] {
                suite.check(conformality_check(c.inst.domain, c.inst.target, c.inst.map, x),
                            "pullback metric is not lambda^2 g at " + where(c.inst, x));
            });
        }
    }
    return suite.take();
}

struct ResidualSuites {
    SuiteResult conservation;
    SuiteResult reduction;
    SuiteResult mutation;
};

// CL = 0, ND = SDL and ND2 = -SDL exactly at every point; with the sign of
// the gradient term in ND2 flipped, ND2 = -SDL must fail wherever the flip
// changes ND2 at all, and that must happen somewhere.
ResidualSuites residual_identities(const std::vector<SampledInstance>& cases) {
    Suite cl("conservation-law");
    Suite red("reduction-identity");
    Suite mut("mutation-control");
    int sensitive = 0;
    for (const auto& c : cases) {
        for (const auto& x : c.points) {
            cl.guard(where(c.inst, x), [&] {
                const auto r = evaluate_point<Rational>(c.inst, x);
                cl.check(r.cl.exact_zero, "CL != 0 at " + where(c.inst, x));
                red.check(proportional(r.nd.value, r.sdl.value, Rational(1)), "ND != SDL at " + where(c.inst, x));
                red.check(proportional(r.nd2.value, r.sdl.value, Rational(-1)),
                          "ND2 != -SDL at " + where(c.inst, x));
                const auto bad = evaluate_point<Rational>(c.inst, x, EvalOptions{0, Mutation::flip_nd2_gradient_sign});
                if (bad.nd2.value != r.nd2.value) {
                    ++sensitive;
                    mut.check(!proportional(bad.nd2.value, bad.sdl.value, Rational(-1)),
                              "flipped ND2 still equals -SDL at " + where(c.inst, x));
                }
            });
        }
    }
    mut.check(sensitive > 0, "the sign flip never changed ND2");
    return ResidualSuites{cl.take(), red.take(), mut.take()};
}

}  // namespace

namespace {

SuiteResult polyharmonic_closed_form_suite(std::uint64_t seed) {
    Suite suite("polyharmonic-closed-form");
    for (int m = 3; m <= 8; ++m) {
        const SpaceFormModel flat(Chart::flat, m);
        Rng rng(mix_seed(seed, {static_cast<std::uint64_t>(m), 7}));
        const MobiusMap map = random_map(rng, m, 2, flat);
        SamplePlan plan;
        plan.seed = rng.below(1u << 30);
        plan.count = 1;
        const auto x = sample_points(plan, make_instance(flat, flat, map)).front();
        suite.guard("m=" + std::to_string(m), [&] {
            const auto profile = polyharmonic_profile<Rational>(map, 3, x);
            for (int k = 1; k <= 3; ++k) {
                suite.check(profile.values[static_cast<std::size_t>(k)] == polyharmonic_closed_form(map, k, x),
                            "jet Delta^" + std::to_string(k) + " phi != closed form, m=" + std::to_string(m));
            }
        });
    }
    return suite.take();
}

// Cleared radial numerators of ND2 against their closed forms in c:
//   sphere->sphere      s^0: c^2 (c^2 - 1) [-2c^2 - (m-4)]
//                       s^1: (c^2 - 1) [(m-4)c^4 - 4(m-3)c^2 + m - 4]
//   sphere->hyperbolic  s^0: c^2 (c^2 + 1) [2c^2 - (m-4)]
//                       s^1: -(c^2 + 1) [(m-4)c^4 + 4(m-3)c^2 + m - 4]
//   hyperbolic->flat    -2 s^2 - (m-4) s  (epsilon = 2, a = 0)
SuiteResult radial_suite(std::uint64_t seed) {
    Suite suite("radial-coefficients");
    Rng rng(mix_seed(seed, {11}));
    for (int trial = 0; trial < 5; ++trial) {
        const Rational c = rng.positive_rational(Rational(2), 8);
        for (int m = 3; m <= 8; ++m) {
            const std::string tag = "c=" + to_string(c) + " m=" + std::to_string(m);
            suite.guard(tag, [&] {
                const Rational c2 = c * c;
                const Rational mm(m);
                RationalVector u(static_cast<std::size_t>(m));
                for (auto& v : u) {
                    v = rng.rational(Rational(1), 4);
                }
                u[0] = 1;
                RationalVector b(static_cast<std::size_t>(m));
                for (auto& v : b) {
                    v = rng.rational(Rational(1, 4), 8);
                }
                Rational b2 = 0;
                for (const auto& v : b) {
                    b2 += v * v;
                }

                // d = 0 needs a = c b (sphere) or a = -c b (ball), A = I.
                MobiusMap sphere_map = inversion(m);
                sphere_map.b = b;
                sphere_map.k = c * (1 + b2);
                MobiusMap ball_map = sphere_map;
                ball_map.k = c * (1 - b2);
                for (std::size_t i = 0; i < b.size(); ++i) {
                    sphere_map.a[i] = c * b[i];
                    ball_map.a[i] = -c * b[i];
                }
                const SpaceFormModel sphere(Chart::sphere, m);
                const SpaceFormModel ball(Chart::hyperbolic, m);
                const SpaceFormModel flat(Chart::flat, m);

                const auto ss = radial_coefficients(make_instance(sphere, sphere, sphere_map), u, 2);
                suite.check(ss[0] == c2 * (c2 - 1) * (-2 * c2 - (mm - 4)), "sphere->sphere s^0, " + tag);
                suite.check(ss[1] == (c2 - 1) * ((mm - 4) * c2 * c2 - 4 * (mm - 3) * c2 + mm - 4),
                            "sphere->sphere s^1, " + tag);
                const auto sh = radial_coefficients(make_instance(sphere, ball, ball_map), u, 2);
                suite.check(sh[0] == c2 * (c2 + 1) * (2 * c2 - (mm - 4)), "sphere->hyperbolic s^0, " + tag);
                suite.check(sh[1] == -(c2 + 1) * ((mm - 4) * c2 * c2 + 4 * (mm - 3) * c2 + mm - 4),
                            "sphere->hyperbolic s^1, " + tag);

                MobiusMap hr_map = inversion(m);
                hr_map.k = c;
                const auto hr = radial_coefficients(make_instance(ball, flat, hr_map), u, 2);
                suite.check(hr[0] == 0 && hr[1] == -(mm - 4) && hr[2] == -2, "hyperbolic->flat, " + tag);
            });
        }
    }
    return suite.take();
}

// Float residuals of exactly-zero cases must read zero at tol and those of
// exactly-nonzero cases nonzero. A tolerance within 10x of the observed
// roundoff floor is rejected as misuse, since it passes only by luck.
SuiteResult float_separation(const std::vector<SampledInstance>& cases, double tol) {
    Suite suite("float-separation");
    constexpr double kMargin = 10;
    double floor = 0;
    double weakest = 1;
    for (const auto& c : cases) {
        for (const auto& x : c.points) {
            suite.guard(where(c.inst, x), [&] {
                const auto exact = evaluate_point<Rational>(c.inst, x);
                const auto approx = evaluate_point<double>(c.inst, x, EvalOptions{tol, Mutation::none});
                auto ratio = [](const Residual<double>& r) { return r.scale > 0 ? r.norm / r.scale : 0.0; };
                const std::pair<const Residual<Rational>*, const Residual<double>*> pairs[] = {
                    {&exact.cl, &approx.cl}, {&exact.sdl, &approx.sdl}};
                for (const auto& [e, f] : pairs) {
                    const double r = ratio(*f);
                    if (e->exact_zero) {
                        floor = std::max(floor, r);
                        suite.check(f->exact_zero, "exact zero reads " + format_double(r) + " x scale in float at " +
                                                       where(c.inst, x));
                    } else {
                        weakest = std::min(weakest, r);
                        suite.check(!f->exact_zero, "exact nonzero reads zero (" + format_double(r) +
                                                        " x scale) in float at " + where(c.inst, x));
                    }
                }
            });
        }
    }
    suite.check(tol >= kMargin * floor, "tolerance misuse: tol " + format_double(tol) +
                                            " is within 10x of the observed float residual floor " +
                                            format_double(floor));
    suite.check(tol < weakest, "tolerance misuse: tol " + format_double(tol) +
                                   " does not separate zero from the weakest nonzero residual " +
                                   format_double(weakest));
    return suite.take();
}

}  // namespace

SelftestReport selftest(const RunOptions& opts) {
    constexpr std::uint64_t kSeed = 20240601;
    SelftestReport report;
    report.mode = opts.mode;
    report.tol = opts.tol;
    const auto cases = corpus(kSeed, 3);
    report.suites.push_back(jet_oracles());
    report.suites.push_back(conformality(cases));
    auto identities = residual_identities(cases);
    report.suites.push_back(std::move(identities.conservation));
    report.suites.push_back(std::move(identities.reduction));
    report.suites.push_back(std::move(identities.mutation));
    report.suites.push_back(polyharmonic_closed_form_suite(kSeed));
    report.suites.push_back(radial_suite(kSeed));
    report.suites.push_back(float_separation(cases, opts.mode == Mode::floating ? opts.tol : 1e-9));
    return report;
}

}  // namespace biconf
