#include "biconf/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace biconf {

std::string ConformalInstance::describe() const {
    return std::string(domain.name()) + "->" + std::string(target.name()) + " m=" + std::to_string(dim()) +
           " epsilon=" + std::to_string(map.epsilon);
}

ConformalInstance make_instance(const SpaceFormModel& domain, const SpaceFormModel& target, const MobiusMap& map) {
    MobiusMap checked = validate(map);
    // kA = (-k)(-A): keep k > 0 so that the factor is positive.
    if (sgn(checked.k) < 0) {
        checked.k = -checked.k;
        checked.A = RationalMatrix(checked.dim()) - checked.A;
    }
    if (domain.dim() != target.dim() || domain.dim() != checked.dim()) {
        throw ValidationError("domain, target and map dimensions differ");
    }
    ConformalInstance inst{domain, target, checked, std::nullopt};
    if (target.chart() != Chart::flat) {
        inst.reduced = reduced_parameters(checked, target);
    }
    return inst;
}

namespace {

enum class FactorRoute { mobius, closed_form };

template <typename T>
std::vector<T> values_of(const std::vector<Jet<T>>& jets) {
    std::vector<T> out;
    out.reserve(jets.size());
    for (const auto& j : jets) {
        out.push_back(j.value());
    }
    return out;
}

// The same jet with every coefficient replaced by its absolute value, on a
// shared double base point. Ring operations on such jets, with subtraction
// done as addition, produce at x0 the sum of the absolute values of all
// monomial summands of the expression.
template <typename T>
Jet<double> abs_jet(const Jet<T>& f, const Jet<double>::BasePoint& base) {
    std::vector<double> c;
    c.reserve(f.size());
    for (const auto& v : f.coefficients()) {
        c.push_back(std::fabs(to_double(v)));
    }
    return Jet<double>(f.layout(), base, std::move(c));
}

double abs_grad_norm(const Jet<double>& tau_sq, const Jet<double>& f) {
    double total = 0;
    for (int i = 0; i < f.dim(); ++i) {
        const double v = tau_sq.value() * partial(f, i).value();
        total += v * v;
    }
    return std::sqrt(total);
}

template <typename T>
FactorDerivatives<T> derivatives_at(const ConformalInstance& inst, std::span<const Rational> x, FactorRoute route) {
    if (static_cast<int>(x.size()) != inst.dim()) {
        throw ShapeError("sample point has wrong dimension");
    }
    const std::vector<T> x0 = convert_vector<T>(x);
    const auto xs = seed<T>(x0, 3);
    const std::span<const Jet<T>> xv(xs);
    const Jet<T> lam = route == FactorRoute::mobius ? conformal_factor<T>(inst.domain, inst.target, inst.map, xv)
                                                    : closed_form_factor<T>(inst.domain, inst.target, inst.map, xv);
    const ChartCalculus<T> calc(inst.domain, xv);
    const Jet<T> dl = calc.laplace_beltrami(lam);
    const Jet<T> n = calc.grad_norm_sq_bar(lam);

    FactorDerivatives<T> d;
    d.L = lam.value();
    d.DL = dl.value();
    d.N = n.value();
    d.GL = values_of(calc.grad_bar(lam));
    d.GDL = values_of(calc.grad_bar(dl));
    d.GN = values_of(calc.grad_bar(n));
    d.GLD = values_of(calc.grad_bar(lam * dl));

    // Magnitudes: the chart formulas re-run on absolute-value jets of
    // lambda and tau with every minus sign turned into a plus.
    std::vector<double> x_abs;
    for (const auto& v : x) {
        x_abs.push_back(v.get_d());
    }
    const auto base = std::make_shared<const std::vector<double>>(std::move(x_abs));
    const Jet<double> la = abs_jet(lam, base);
    const Jet<double> ta = abs_jet(calc.inv_sigma(), base);
    const Jet<double> ta2 = ta * ta;
    Jet<double> cross = ta.constant_like(0.0);
    Jet<double> grad_sq = ta.constant_like(0.0);
    for (int i = 0; i < inst.dim(); ++i) {
        const Jet<double> dl_i = partial(la, i);
        cross = cross + partial(ta, i) * dl_i;
        grad_sq = grad_sq + dl_i * dl_i;
    }
    const Jet<double> dla = ta2 * laplacian(la) + static_cast<double>(std::abs(inst.dim() - 2)) * (ta * cross);
    const Jet<double> na = ta2 * grad_sq;
    auto& g = d.mag;
    g.DL = dla.value();
    g.N = na.value();
    g.GL = abs_grad_norm(ta2, la);
    g.GDL = abs_grad_norm(ta2, dla);
    g.GN = abs_grad_norm(ta2, na);
    g.GLD = abs_grad_norm(ta2, la * dla);
    return d;
}

template <typename T>
double abs_double(const T& v) {
    return std::fabs(to_double(v));
}

// sum_t coeff_t * vec_t; the scale adds the product of the two magnitudes,
// each never below the actual norm.
template <typename T>
class VectorSum {
public:
    explicit VectorSum(std::size_t m) : value_(m, T(0)) {}

    void add(const T& coeff, const std::vector<T>& v, double coeff_magnitude, double magnitude) {
        for (std::size_t i = 0; i < value_.size(); ++i) {
            value_[i] += coeff * v[i];
        }
        scale_ += std::max(abs_double(coeff), coeff_magnitude) * std::max(euclidean_norm<T>(v), magnitude);
    }

    std::vector<T>& value() { return value_; }
    double scale() const { return scale_; }

private:
    std::vector<T> value_;
    double scale_ = 0;
};

template <typename T>
Residual<T> finish(std::span<const Rational> x, std::vector<T> value, double scale, const EvalOptions& opts) {
    Residual<T> r;
    r.point.assign(x.begin(), x.end());
    r.norm = euclidean_norm<T>(value);
    r.scale = scale;
    if constexpr (std::is_same_v<T, Rational>) {
        r.exact_zero = all_zero<T>(value);
    } else {
        r.exact_zero = r.norm <= opts.tol * scale;
    }
    r.value = std::move(value);
    return r;
}

template <typename T>
PointResiduals<T> combine(const ConformalInstance& inst, std::span<const Rational> x, FactorDerivatives<T> d,
                          const EvalOptions& opts) {
    const int m = inst.dim();
    const auto mm = static_cast<std::size_t>(m);
    const T mT(m);
    const T c1(inst.domain.curvature());
    const T c2(inst.target.curvature());
    const T& L = d.L;
    const T& DL = d.DL;

    PointResiduals<T> out;

    {
        // Scal = m(m-1)c, so Scal / (2(m-1)) = m c / 2.
        const T half(scalar_from<T>(Rational(1, 2)));
        const T t_domain = half * mT * c1 * L;
        const T t_target = half * mT * c2 * L * L * L;
        const T t_grad = checked_divide(T(T(m - 4) * d.N), T(T(2) * L));
        std::vector<T> v{DL - t_domain + t_target + t_grad};
        const double scale = std::max(abs_double(DL), d.mag.DL) + abs_double(t_domain) + abs_double(t_target) +
                             std::max(abs_double(t_grad), std::fabs((m - 4) * d.mag.N / (2 * to_double(L))));
        out.cl = finish<T>(x, std::move(v), scale, opts);
    }
    {
        VectorSum<T> s(mm);
        s.add(L, d.GDL, 0, d.mag.GDL);
        s.add(T(T(-3) * DL), d.GL, 3 * d.mag.DL, d.mag.GL);
        s.add(T(T(-(m - 4)) * scalar_from<T>(Rational(1, 2))), d.GN, 0, d.mag.GN);
        s.add(T(T(2) * L * T(m - 1) * c1), d.GL, 0, d.mag.GL);
        out.sdl = finish<T>(x, std::move(s.value()), s.scale(), opts);
    }
    {
        VectorSum<T> s(mm);
        s.add(T(2), d.GLD, 0, d.mag.GLD);
        s.add(T(T(-4) * DL), d.GL, 4 * d.mag.DL, d.mag.GL);
        s.add(T((T(2) * mT * c2 * L * L + T(m - 2) * c1) * L), d.GL, 0, d.mag.GL);
        out.nd = finish<T>(x, std::move(s.value()), s.scale(), opts);
    }
    {
        VectorSum<T> s(mm);
        s.add(T(m - 4), d.GN, 0, d.mag.GN);
        T bracket = T(4) * DL + T(2 - 3 * m) * c1 * L + T(2) * mT * c2 * L * L * L;
        if (opts.mutation == Mutation::flip_nd2_gradient_sign) {
            bracket = -bracket;
        }
        s.add(bracket, d.GL, 4 * d.mag.DL + std::fabs((2 - 3 * m) * to_double<T>(T(c1 * L))) + std::fabs(2 * m * to_double<T>(T(c2 * L * L * L))), d.mag.GL);
        out.nd2 = finish<T>(x, std::move(s.value()), s.scale(), opts);
    }

    if constexpr (std::is_same_v<T, Rational>) {
        out.harmonic = all_zero<T>(d.GL);
    } else {
        out.harmonic = euclidean_norm<T>(d.GL) <= opts.tol * std::fabs(d.L);
    }
    out.d = std::move(d);
    return out;
}

}  // namespace

template <typename T>
FactorDerivatives<T> factor_derivatives(const ConformalInstance& inst, std::span<const Rational> x) {
    return derivatives_at<T>(inst, x, FactorRoute::mobius);
}

template <typename T>
PointResiduals<T> evaluate_point(const ConformalInstance& inst, std::span<const Rational> x, const EvalOptions& opts) {
    return combine<T>(inst, x, derivatives_at<T>(inst, x, FactorRoute::mobius), opts);
}

template <typename T>
Residual<T> residual_CL(const ConformalInstance& inst, std::span<const Rational> x, const EvalOptions& opts) {
    return evaluate_point<T>(inst, x, opts).cl;
}

template <typename T>
Residual<T> residual_SDL(const ConformalInstance& inst, std::span<const Rational> x, const EvalOptions& opts) {
    return evaluate_point<T>(inst, x, opts).sdl;
}

template <typename T>
Residual<T> residual_ND(const ConformalInstance& inst, std::span<const Rational> x, const EvalOptions& opts) {
    return evaluate_point<T>(inst, x, opts).nd;
}

template <typename T>
Residual<T> residual_ND2(const ConformalInstance& inst, std::span<const Rational> x, const EvalOptions& opts) {
    return evaluate_point<T>(inst, x, opts).nd2;
}

template <typename T>
bool harmonicity_flag(const ConformalInstance& inst, std::span<const Rational> x, const EvalOptions& opts) {
    return evaluate_point<T>(inst, x, opts).harmonic;
}

bool proportional(std::span<const Rational> lhs, std::span<const Rational> rhs, const Rational& factor) {
    if (lhs.size() != rhs.size()) {
        throw ShapeError("proportional: length mismatch");
    }
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        if (lhs[i] != factor * rhs[i]) {
            return false;
        }
    }
    return true;
}

Rational closed_form_coefficient(int m, int k) {
    if (m < 2 || k < 0) {
        throw std::invalid_argument("closed_form_coefficient: need m >= 2 and k >= 0");
    }
    mpz_class c = 1;
    for (int j = 1; j <= k; ++j) {
        c *= 2 * j;
        c *= m - 2 * j;
    }
    if (k % 2 == 1) {
        c = -c;
    }
    return Rational(c);
}

// Sum of |terms| in Delta^k f (x0) = sum_{|gamma| = k} (k!/gamma!) (2 gamma)! c_{2 gamma}.
template <typename T>
double iterated_laplacian_mass(const Jet<T>& f, int k) {
    if (k == 0) {
        return std::fabs(to_double(f.value()));
    }
    const auto& layout = *f.layout();
    const auto c = f.coefficients();
    std::vector<double> factorial(static_cast<std::size_t>(2 * k) + 1, 1.0);
    for (std::size_t i = 1; i < factorial.size(); ++i) {
        factorial[i] = factorial[i - 1] * static_cast<double>(i);
    }
    std::vector<Exponent> doubled(static_cast<std::size_t>(f.dim()));
    double total = 0;
    for (std::size_t idx = layout.degree_begin(k); idx < layout.size_up_to(k); ++idx) {
        const auto gamma = layout.exponents(idx);
        double w = factorial[static_cast<std::size_t>(k)];
        for (std::size_t t = 0; t < doubled.size(); ++t) {
            doubled[t] = static_cast<Exponent>(2 * gamma[t]);
            w *= factorial[doubled[t]] / factorial[gamma[t]];
        }
        total += w * std::fabs(to_double(c[layout.rank(doubled)]));
    }
    return total;
}

template <typename T>
PolyharmonicProfile<T> polyharmonic_profile(const MobiusMap& map, int k_max, std::span<const Rational> x) {
    if (k_max < 0) {
        throw std::invalid_argument("polyharmonic_profile: negative order");
    }
    if (static_cast<int>(x.size()) != map.dim()) {
        throw ShapeError("sample point has wrong dimension");
    }
    const std::size_t m = x.size();
    const auto orders = static_cast<std::size_t>(k_max) + 1;
    const std::vector<T> x0 = convert_vector<T>(x);
    const auto xs = seed<T>(x0, 2 * k_max);

    std::vector<Jet<T>> diff;
    diff.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        diff.push_back(xs[j] - scalar_from<T>(map.a[j]));
    }
    std::optional<Jet<T>> inv_f;
    if (map.epsilon == 2) {
        const Jet<T> f = squared_norm<T>(diff);
        if (is_zero(f.value())) {
            throw SingularityError("Mobius map is singular at x = a");
        }
        inv_f = T(1) / f;
    }

    // lap[j][order] = Delta^order u_j (x0); u_j is built and dropped one at a
    // time since degree-10 jets in 12 variables are large.
    std::vector<std::vector<T>> lap(m, std::vector<T>(orders));
    std::vector<std::vector<double>> mass(m, std::vector<double>(orders));
    for (std::size_t j = 0; j < m; ++j) {
        const Jet<T> u = inv_f ? Jet<T>(diff[j] * *inv_f) : diff[j];
        for (std::size_t order = 0; order < orders; ++order) {
            lap[j][order] = iterated_laplacian(u, static_cast<int>(order));
            mass[j][order] = iterated_laplacian_mass(u, static_cast<int>(order));
        }
    }

    const T k = scalar_from<T>(map.k);
    PolyharmonicProfile<T> out;
    out.values.assign(orders, std::vector<T>(m, T(0)));
    out.scale.assign(orders, 0.0);
    for (std::size_t order = 0; order < orders; ++order) {
        for (std::size_t i = 0; i < m; ++i) {
            T acc = order == 0 ? scalar_from<T>(map.b[i]) : T(0);
            for (std::size_t j = 0; j < m; ++j) {
                const Rational& aij = map.A(static_cast<int>(i), static_cast<int>(j));
                if (sgn(aij) != 0) {
                    acc += k * scalar_from<T>(aij) * lap[j][order];
                    out.scale[order] += std::fabs(to_double(Rational(map.k * aij))) * mass[j][order];
                }
            }
            out.values[order][i] = acc;
        }
    }
    return out;
}

template <typename T>
std::vector<T> polyharmonic_residual(const MobiusMap& map, int k, std::span<const Rational> x) {
    if (k < 1) {
        throw std::invalid_argument("polyharmonic_residual: order must be >= 1");
    }
    return polyharmonic_profile<T>(map, k, x).values[static_cast<std::size_t>(k)];
}

template <typename T>
std::vector<T> polyharmonic_residual(const ConformalInstance& inst, int k, std::span<const Rational> x) {
    if (inst.domain.chart() != Chart::flat || inst.target.chart() != Chart::flat) {
        throw ModelError("polyharmonic residuals are implemented for flat domain and target only");
    }
    return polyharmonic_residual<T>(inst.map, k, x);
}

RationalVector polyharmonic_closed_form(const MobiusMap& map, int k, std::span<const Rational> x) {
    if (static_cast<int>(x.size()) != map.dim()) {
        throw ShapeError("sample point has wrong dimension");
    }
    if (k == 0) {
        return apply_point<Rational>(map, x);
    }
    const std::size_t m = x.size();
    RationalVector out(m);
    if (map.epsilon == 0) {
        return out;
    }
    RationalVector diff(m);
    Rational f = 0;
    for (std::size_t j = 0; j < m; ++j) {
        diff[j] = x[j] - map.a[j];
        f += diff[j] * diff[j];
    }
    if (sgn(f) == 0) {
        throw SingularityError("Mobius map is singular at x = a");
    }
    Rational fpow = f;
    for (int j = 0; j < k; ++j) {
        fpow *= f;
    }
    const Rational scale = map.k * closed_form_coefficient(static_cast<int>(m), k) / fpow;
    const RationalVector rotated = map.A.apply(diff);
    for (std::size_t i = 0; i < m; ++i) {
        out[i] = scale * rotated[i];
    }
    return out;
}

RationalVector interpolate_checked(std::span<const Rational> nodes, std::span<const Rational> values, int max_degree) {
    if (max_degree < 0) {
        throw std::invalid_argument("interpolate_checked: negative degree");
    }
    const auto n = static_cast<std::size_t>(max_degree) + 1;
    if (nodes.size() != values.size() || nodes.size() < n) {
        throw std::invalid_argument("interpolate_checked: need max_degree + 1 samples");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (nodes[i] == nodes[j]) {
                throw std::invalid_argument("interpolate_checked: nodes must be distinct");
            }
        }
    }
    // Newton divided differences on the first n nodes.
    std::vector<Rational> dd(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = n - 1; i >= level; --i) {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    // Expand sum_i dd[i] prod_{j<i} (s - nodes[j]) into monomials (Horner).
    RationalVector coeffs(n);
    coeffs[0] = dd[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        // coeffs <- coeffs * (s - nodes[i]) + dd[i]
        for (std::size_t p = n - 1; p >= 1; --p) {
            coeffs[p] = coeffs[p - 1] - nodes[i] * coeffs[p];
        }
        coeffs[0] = dd[i] - nodes[i] * coeffs[0];
    }
    for (std::size_t i = n; i < nodes.size(); ++i) {
        Rational acc = 0;
        for (std::size_t p = n; p-- > 0;) {
            acc = acc * nodes[i] + coeffs[p];
        }
        if (acc != values[i]) {
            throw DegreeUnderestimateError("radial numerator has degree above " + std::to_string(max_degree));
        }
    }
    return coeffs;
}

Rational radial_nd2_numerator(const ConformalInstance& inst, std::span<const Rational> u, const Rational& t) {
    const std::size_t m = static_cast<std::size_t>(inst.dim());
    if (u.size() != m) {
        throw ShapeError("radial direction has wrong dimension");
    }
    Rational uu = 0;
    for (const auto& v : u) {
        uu += v * v;
    }
    if (sgn(uu) == 0 || sgn(t) == 0) {
        throw SingularityError("radial probe needs t != 0 and u != 0");
    }
    RationalVector x(m);
    for (std::size_t i = 0; i < m; ++i) {
        x[i] = t * u[i];
    }
    const Rational s = t * t * uu;

    Rational multiplier;
    Rational sigma = 1;
    if (inst.domain.chart() != Chart::flat) {
        sigma = checked_divide(Rational(2), Rational(1 + inst.domain.curvature() * s));
    }
    const Rational sigma3 = sigma * sigma * sigma;
    if (inst.target.chart() == Chart::flat) {
        if (inst.map.epsilon != 2 || !all_zero<Rational>(inst.map.a)) {
            throw ValidationError("radial probe for a flat target needs epsilon = 2 and a = 0");
        }
        multiplier = s * s * s * s * s * sigma3 / (inst.map.k * inst.map.k);
    } else {
        const ReducedFactorParams& p = *inst.reduced;
        if (!all_zero<Rational>(p.d)) {
            throw ValidationError("radial probe for a curved target needs d = 0");
        }
        const Rational c2 = p.c * p.c;
        const Rational F = (p.sign == DenominatorSign::plus ? c2 : Rational(-c2)) + s;
        multiplier = F * F * F * F * F * sigma3 / (4 * c2);
    }

    const auto res = combine<Rational>(inst, x, derivatives_at<Rational>(inst, x, FactorRoute::closed_form), {});
    Rational along = 0;
    for (std::size_t i = 0; i < m; ++i) {
        along += res.nd2.value[i] * u[i];
    }
    return multiplier * along / (t * uu);
}

RationalVector radial_coefficients(const std::function<Rational(const Rational&)>& evaluator,
                                   std::span<const Rational> nodes, int max_degree) {
    RationalVector values;
    values.reserve(nodes.size());
    for (const auto& s : nodes) {
        values.push_back(evaluator(s));
    }
    return interpolate_checked(nodes, values, max_degree);
}

RationalVector radial_coefficients(const ConformalInstance& inst, std::span<const Rational> u, int max_degree,
                                   int extra) {
    if (max_degree < 0 || extra < 0) {
        throw std::invalid_argument("radial_coefficients: negative degree or sample count");
    }
    const std::size_t wanted = static_cast<std::size_t>(max_degree + 1 + extra);
    // |u|_2 <= |u|_1 < bound, so every t below 1 / bound keeps x = t u inside
    // the unit ball as the hyperbolic chart requires.
    Rational l1 = 0;
    Rational uu = 0;
    for (const auto& v : u) {
        l1 += abs(v);
        uu += v * v;
    }
    const mpz_class bound = l1.get_num() / l1.get_den() + 1;
    const long candidates = 4 * static_cast<long>(wanted) + 8;

    RationalVector nodes;
    RationalVector values;
    for (long j = 1; j <= candidates && nodes.size() < wanted; ++j) {
        Rational t(mpz_class(j), bound * (candidates + 1));
        t.canonicalize();
        try {
            values.push_back(radial_nd2_numerator(inst, u, t));
            nodes.push_back(t * t * uu);
        } catch (const SingularityError&) {
            // t hit the singular set of this family; skip it
        }
    }
    if (nodes.size() < wanted) {
        throw SamplingError("radial_coefficients: too few nonsingular radial samples");
    }
    return interpolate_checked(nodes, values, max_degree);
}

#define BICONF_INSTANTIATE(T)                                                                                  \
    template FactorDerivatives<T> factor_derivatives<T>(const ConformalInstance&, std::span<const Rational>);  \
    template PointResiduals<T> evaluate_point<T>(const ConformalInstance&, std::span<const Rational>,          \
                                                 const EvalOptions&);                                          \
    template Residual<T> residual_CL<T>(const ConformalInstance&, std::span<const Rational>, const EvalOptions&); \
    template Residual<T> residual_SDL<T>(const ConformalInstance&, std::span<const Rational>,                  \
                                         const EvalOptions&);                                                  \
    template Residual<T> residual_ND<T>(const ConformalInstance&, std::span<const Rational>, const EvalOptions&); \
    template Residual<T> residual_ND2<T>(const ConformalInstance&, std::span<const Rational>,                  \
                                         const EvalOptions&);                                                  \
    template bool harmonicity_flag<T>(const ConformalInstance&, std::span<const Rational>, const EvalOptions&); \
    template PolyharmonicProfile<T> polyharmonic_profile<T>(const MobiusMap&, int, std::span<const Rational>); \
    template std::vector<T> polyharmonic_residual<T>(const MobiusMap&, int, std::span<const Rational>);         \
    template std::vector<T> polyharmonic_residual<T>(const ConformalInstance&, int, std::span<const Rational>);

BICONF_INSTANTIATE(Rational)
BICONF_INSTANTIATE(double)

#undef BICONF_INSTANTIATE

}  // namespace biconf
