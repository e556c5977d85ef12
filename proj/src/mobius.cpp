#include "biconf/mobius.hpp"

#include <stdexcept>
#include <string>

namespace biconf {

RationalMatrix::RationalMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    if (n < 1) {
        throw std::invalid_argument("matrix size must be >= 1");
    }
}

RationalMatrix RationalMatrix::identity(int n) {
    RationalMatrix m(n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 1;
    }
    return m;
}

RationalMatrix RationalMatrix::transpose() const {
    RationalMatrix t(n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

RationalVector RationalMatrix::apply(std::span<const Rational> v) const {
    if (static_cast<int>(v.size()) != n_) {
        throw ShapeError("matrix-vector size mismatch");
    }
    RationalVector out(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        Rational acc = 0;
        for (int j = 0; j < n_; ++j) {
            acc += (*this)(i, j) * v[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.n_ != b.n_) {
        throw ShapeError("matrix size mismatch");
    }
    RationalMatrix c(a.n_);
    for (int i = 0; i < a.n_; ++i) {
        for (int k = 0; k < a.n_; ++k) {
            if (sgn(a(i, k)) == 0) {
                continue;
            }
            for (int j = 0; j < a.n_; ++j) {
                c(i, j) += a(i, k) * b(k, j);
            }
        }
    }
    return c;
}

RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.n_ != b.n_) {
        throw ShapeError("matrix size mismatch");
    }
    RationalMatrix c(a.n_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) {
        c.data_[i] = a.data_[i] + b.data_[i];
    }
    return c;
}

RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.n_ != b.n_) {
        throw ShapeError("matrix size mismatch");
    }
    RationalMatrix c(a.n_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) {
        c.data_[i] = a.data_[i] - b.data_[i];
    }
    return c;
}

RationalMatrix RationalMatrix::inverse() const {
    RationalMatrix work = *this;
    RationalMatrix inv = identity(n_);
    for (int col = 0; col < n_; ++col) {
        int pivot = -1;
        for (int r = col; r < n_; ++r) {
            if (sgn(work(r, col)) != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) {
            throw SingularityError("matrix is singular");
        }
        if (pivot != col) {
            for (int j = 0; j < n_; ++j) {
                std::swap(work(pivot, j), work(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        }
        const Rational scale = 1 / work(col, col);
        for (int j = 0; j < n_; ++j) {
            work(col, j) *= scale;
            inv(col, j) *= scale;
        }
        for (int r = 0; r < n_; ++r) {
            if (r == col || sgn(work(r, col)) == 0) {
                continue;
            }
            const Rational f = work(r, col);
            for (int j = 0; j < n_; ++j) {
                work(r, j) -= f * work(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

bool RationalMatrix::is_orthogonal() const {
    return transpose() * (*this) == identity(n_);
}

bool RationalMatrix::is_skew() const {
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            if ((*this)(i, j) != -(*this)(j, i)) {
                return false;
            }
        }
    }
    return true;
}

Rational determinant(const RationalMatrix& m) {
    RationalMatrix work = m;
    const int n = m.size();
    Rational det = 1;
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r) {
            if (sgn(work(r, col)) != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) {
            return 0;
        }
        if (pivot != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(work(pivot, j), work(col, j));
            }
            det = -det;
        }
        det *= work(col, col);
        for (int r = col + 1; r < n; ++r) {
            const Rational f = work(r, col) / work(col, col);
            if (sgn(f) == 0) {
                continue;
            }
            for (int j = col; j < n; ++j) {
                work(r, j) -= f * work(col, j);
            }
        }
    }
    return det;
}

RationalMatrix cayley_orthogonal(const RationalMatrix& skew) {
    if (!skew.is_skew()) {
        throw ValidationError("cayley_orthogonal: matrix is not skew-symmetric");
    }
    const auto id = RationalMatrix::identity(skew.size());
    return (id - skew).inverse() * (id + skew);
}

RationalMatrix signed_permutation(std::span<const int> perm, std::span<const int> signs) {
    const int n = static_cast<int>(perm.size());
    if (signs.size() != perm.size()) {
        throw ValidationError("signed_permutation: perm and signs differ in length");
    }
    RationalMatrix p(n);
    std::vector<bool> used(perm.size(), false);
    for (int i = 0; i < n; ++i) {
        const int j = perm[static_cast<std::size_t>(i)];
        const int s = signs[static_cast<std::size_t>(i)];
        if (j < 0 || j >= n || used[static_cast<std::size_t>(j)]) {
            throw ValidationError("signed_permutation: not a permutation");
        }
        if (s != 1 && s != -1) {
            throw ValidationError("signed_permutation: signs must be +1 or -1");
        }
        used[static_cast<std::size_t>(j)] = true;
        p(i, j) = s;
    }
    return p;
}

MobiusMap validate(const MobiusMap& map) {
    const int m = map.dim();
    if (m < 1) {
        throw ValidationError("map dimension must be >= 1");
    }
    if (static_cast<int>(map.b.size()) != m || map.A.size() != m) {
        throw ValidationError("map parameters a, b, A have inconsistent dimensions");
    }
    if (sgn(map.k) == 0) {
        throw ValidationError("map parameter k must be nonzero");
    }
    if (map.epsilon != 0 && map.epsilon != 2) {
        throw ValidationError("map parameter epsilon must be 0 or 2, got " + std::to_string(map.epsilon));
    }
    if (!map.A.is_orthogonal()) {
        throw ValidationError("map parameter A is not orthogonal");
    }
    return map;
}

MobiusMap inversion(int dim) {
    return MobiusMap{RationalVector(static_cast<std::size_t>(dim)), RationalVector(static_cast<std::size_t>(dim)),
                     Rational(1), RationalMatrix::identity(dim), 2};
}

MobiusMap identity_map(int dim) {
    MobiusMap map = inversion(dim);
    map.epsilon = 0;
    return map;
}

namespace {

template <typename T>
T squared_distance(std::span<const T> x, std::span<const T> a) {
    T s(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const T d = x[i] - a[i];
        s += d * d;
    }
    return s;
}

template <typename T>
std::vector<T> matrix_as(const RationalMatrix& a) {
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(a.size() * a.size()));
    for (int i = 0; i < a.size(); ++i) {
        for (int j = 0; j < a.size(); ++j) {
            out.push_back(scalar_from<T>(a(i, j)));
        }
    }
    return out;
}

void require_dims(const MobiusMap& map, std::size_t n) {
    if (static_cast<std::size_t>(map.dim()) != n) {
        throw ShapeError("map and point dimensions differ");
    }
}

// Jets of x - a and, for epsilon = 2, f = |x - a|^2.
template <typename T>
std::vector<Jet<T>> shifted(const MobiusMap& map, std::span<const Jet<T>> x) {
    std::vector<Jet<T>> d;
    d.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        d.push_back(x[i] - scalar_from<T>(map.a[i]));
    }
    return d;
}

// |phi|^2 = |b|^2 + 2k <A^T b, x - a> / f + k^2 / f        (epsilon = 2)
//         = |b|^2 + 2k <A^T b, x - a>     + k^2 f          (epsilon = 0)
template <typename T>
Jet<T> image_norm_sq(const MobiusMap& map, std::span<const Jet<T>> diff, const Jet<T>& f) {
    const RationalVector atb = map.A.transpose().apply(map.b);
    Rational bb = 0;
    for (const auto& bi : map.b) {
        bb += bi * bi;
    }
    const T k = scalar_from<T>(map.k);
    Jet<T> cross = diff[0] * scalar_from<T>(atb[0]);
    for (std::size_t i = 1; i < diff.size(); ++i) {
        cross += diff[i] * scalar_from<T>(atb[i]);
    }
    if (map.epsilon == 2) {
        Jet<T> num = cross * T(T(2) * k);
        num += T(k * k);
        return scalar_from<T>(bb) + num / f;
    }
    Jet<T> out = cross * T(T(2) * k) + f * T(k * k);
    out += scalar_from<T>(bb);
    return out;
}

template <typename T>
void require_target_point(const SpaceFormModel& target, const T& image_norm_sq) {
    if (target.chart() != Chart::hyperbolic) {
        return;
    }
    if (image_norm_sq == T(1)) {
        throw SingularityError("image lies on the boundary of the Poincare ball");
    }
    if (image_norm_sq > T(1)) {
        throw InadmissiblePointError("image lies outside the Poincare ball");
    }
}

}  // namespace

template <typename T>
std::vector<T> apply_point(const MobiusMap& map, std::span<const T> x) {
    require_dims(map, x.size());
    const std::vector<T> a = convert_vector<T>(map.a);
    const std::vector<T> amat = matrix_as<T>(map.A);
    const std::size_t m = x.size();
    T scale = scalar_from<T>(map.k);
    if (map.epsilon == 2) {
        scale = checked_divide(scale, squared_distance<T>(x, a));
    }
    std::vector<T> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        T acc(0);
        for (std::size_t j = 0; j < m; ++j) {
            acc += amat[i * m + j] * (x[j] - a[j]);
        }
        out[i] = scalar_from<T>(map.b[i]) + scale * acc;
    }
    return out;
}

RationalVector inverse_apply(const MobiusMap& map, std::span<const Rational> y) {
    require_dims(map, y.size());
    RationalVector diff(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        diff[i] = y[i] - map.b[i];
    }
    RationalVector back = map.A.transpose().apply(diff);
    Rational scale;
    if (map.epsilon == 2) {
        // x - a = k A^T (y - b) / |y - b|^2
        Rational n = 0;
        for (const auto& v : diff) {
            n += v * v;
        }
        scale = checked_divide(map.k, n);
    } else {
        scale = checked_divide(Rational(1), map.k);
    }
    for (std::size_t i = 0; i < back.size(); ++i) {
        back[i] = map.a[i] + scale * back[i];
    }
    return back;
}

template <typename T>
std::vector<Jet<T>> apply_jet(const MobiusMap& map, std::span<const Jet<T>> x) {
    require_dims(map, x.size());
    std::vector<Jet<T>> w = shifted(map, x);
    if (map.epsilon == 2) {
        const Jet<T> f = squared_norm<T>(w);
        if (is_zero(f.value())) {
            throw SingularityError("Mobius map is singular at x = a");
        }
        const Jet<T> inv = T(1) / f;
        for (auto& wi : w) {
            wi = wi * inv;
        }
    }
    const T k = scalar_from<T>(map.k);
    const std::size_t m = x.size();
    std::vector<Jet<T>> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        Jet<T> acc = x[0].constant_like(scalar_from<T>(map.b[i]));
        for (std::size_t j = 0; j < m; ++j) {
            if (sgn(map.A(static_cast<int>(i), static_cast<int>(j))) == 0) {
                continue;
            }
            acc += w[j] * T(k * scalar_from<T>(map.A(static_cast<int>(i), static_cast<int>(j))));
        }
        out.push_back(std::move(acc));
    }
    return out;
}

template <typename T>
Jet<T> euclidean_factor(const MobiusMap& map, std::span<const Jet<T>> x) {
    require_dims(map, x.size());
    const T k = scalar_from<T>(map.k);
    if (map.epsilon == 0) {
        return x[0].constant_like(k);
    }
    const std::vector<Jet<T>> w = shifted(map, x);
    const Jet<T> f = squared_norm<T>(w);
    if (is_zero(f.value())) {
        throw SingularityError("conformal factor is singular at x = a");
    }
    return k / f;
}

template <typename T>
Jet<T> conformal_factor(const SpaceFormModel& domain, const SpaceFormModel& target, const MobiusMap& map,
                        std::span<const Jet<T>> x) {
    require_dims(map, x.size());
    if (domain.dim() != map.dim() || target.dim() != map.dim()) {
        throw ShapeError("conformal_factor: model dimensions differ from the map");
    }
    require_chart_point(domain, x);
    const std::vector<Jet<T>> diff = shifted(map, x);
    const Jet<T> f = squared_norm<T>(diff);
    if (map.epsilon == 2 && is_zero(f.value())) {
        throw SingularityError("conformal factor is singular at x = a");
    }
    const T k = scalar_from<T>(map.k);
    Jet<T> lambda = map.epsilon == 2 ? k / f : f.constant_like(k);
    if (target.chart() != Chart::flat) {
        const Jet<T> image = image_norm_sq(map, std::span<const Jet<T>>(diff), f);
        require_target_point(target, image.value());
        lambda = chart_factor_of_norm_sq(target, image) * lambda;
    }
    if (domain.chart() != Chart::flat) {
        lambda = inverse_chart_factor_of_norm_sq(domain, squared_norm(x)) * lambda;
    }
    if (ScalarTraits<T>::sign(lambda.value()) <= 0) {
        throw InadmissiblePointError("conformal factor is not positive at this point");
    }
    return lambda;
}

ReducedFactorParams reduced_parameters(const MobiusMap& map, const SpaceFormModel& target) {
    if (target.chart() == Chart::flat) {
        throw ModelError("reduced parameters are defined for sphere and hyperbolic targets only");
    }
    const RationalVector atb = map.A.transpose().apply(map.b);
    Rational bb = 0;
    for (const auto& bi : map.b) {
        bb += bi * bi;
    }
    ReducedFactorParams p;
    p.sign = target.chart() == Chart::sphere ? DenominatorSign::plus : DenominatorSign::minus;
    p.d.resize(map.a.size());
    if (map.epsilon == 2) {
        const Rational denom = target.chart() == Chart::sphere ? Rational(1 + bb) : Rational(1 - bb);
        if (sgn(denom) == 0) {
            throw ValidationError("reduced parameters undefined: |b| = 1 with a hyperbolic target");
        }
        p.c = map.k / denom;
        const Rational shift = target.chart() == Chart::sphere ? Rational(-p.c) : p.c;
        for (std::size_t i = 0; i < p.d.size(); ++i) {
            p.d[i] = map.a[i] + shift * atb[i];
        }
    } else {
        const Rational inv_k = 1 / map.k;
        p.c = target.chart() == Chart::sphere ? inv_k : Rational(-inv_k);
        for (std::size_t i = 0; i < p.d.size(); ++i) {
            p.d[i] = map.a[i] - inv_k * atb[i];
        }
    }
    return p;
}

template <typename T>
Jet<T> closed_form_factor(const SpaceFormModel& domain, const SpaceFormModel& target, const MobiusMap& map,
                          std::span<const Jet<T>> x) {
    require_dims(map, x.size());
    require_chart_point(domain, x);
    Jet<T> lambda = x[0].constant_like(scalar_from<T>(map.k));
    if (target.chart() == Chart::flat) {
        if (map.epsilon == 2) {
            const std::vector<Jet<T>> diff = shifted(map, x);
            lambda = scalar_from<T>(map.k) / squared_norm<T>(diff);
        }
    } else {
        const ReducedFactorParams p = reduced_parameters(map, target);
        std::vector<Jet<T>> diff;
        diff.reserve(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            diff.push_back(x[i] - scalar_from<T>(p.d[i]));
        }
        const T c = scalar_from<T>(p.c);
        const T c2 = p.sign == DenominatorSign::plus ? T(c * c) : T(-(c * c));
        lambda = T(T(2) * c) / (squared_norm<T>(diff) + c2);
    }
    if (domain.chart() != Chart::flat) {
        lambda = inverse_chart_factor_of_norm_sq(domain, squared_norm(x)) * lambda;
    }
    return lambda;
}

Rational conformal_factor_value(const SpaceFormModel& domain, const SpaceFormModel& target, const MobiusMap& map,
                                std::span<const Rational> x) {
    const auto jets = seed<Rational>(x, 0);
    return conformal_factor<Rational>(domain, target, map, jets).value();
}

bool conformality_check(const SpaceFormModel& domain, const SpaceFormModel& target, const MobiusMap& map,
                        std::span<const Rational> x) {
    const auto jets = seed<Rational>(x, 1);
    const auto phi = apply_jet<Rational>(map, jets);
    const Rational lambda = conformal_factor<Rational>(domain, target, map, jets).value();

    Rational image_sq = 0;
    for (const auto& p : phi) {
        image_sq += p.value() * p.value();
    }
    Rational x_sq = 0;
    for (const auto& v : x) {
        x_sq += v * v;
    }
    auto factor = [](const SpaceFormModel& model, const Rational& norm_sq) -> Rational {
        if (model.chart() == Chart::flat) {
            return 1;
        }
        return checked_divide(Rational(2), Rational(1 + model.curvature() * norm_sq));
    };
    const Rational rho = factor(target, image_sq);
    const Rational sigma = factor(domain, x_sq);
    const Rational rhs = lambda * lambda * sigma * sigma;

    const int m = map.dim();
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            Rational jtj = 0;
            for (int r = 0; r < m; ++r) {
                const auto& row = phi[static_cast<std::size_t>(r)];
                jtj += row.coefficients()[row.layout()->unit_index(i)] * row.coefficients()[row.layout()->unit_index(j)];
            }
            const Rational lhs = rho * rho * jtj;
            if (lhs != (i == j ? rhs : Rational(0))) {
                return false;
            }
        }
    }
    return true;
}

#define BICONF_INSTANTIATE(T)                                                                                   \
    template std::vector<T> apply_point<T>(const MobiusMap&, std::span<const T>);                               \
    template std::vector<Jet<T>> apply_jet<T>(const MobiusMap&, std::span<const Jet<T>>);                       \
    template Jet<T> euclidean_factor<T>(const MobiusMap&, std::span<const Jet<T>>);                             \
    template Jet<T> conformal_factor<T>(const SpaceFormModel&, const SpaceFormModel&, const MobiusMap&,         \
                                        std::span<const Jet<T>>);                                               \
    template Jet<T> closed_form_factor<T>(const SpaceFormModel&, const SpaceFormModel&, const MobiusMap&,       \
                                          std::span<const Jet<T>>);

BICONF_INSTANTIATE(Rational)
BICONF_INSTANTIATE(double)

#undef BICONF_INSTANTIATE

}  // namespace biconf
