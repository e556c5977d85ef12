#pragma once

#include <algorithm>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "biconf/errors.hpp"
#include "biconf/multi_index.hpp"
#include "biconf/scalar.hpp"

namespace biconf {

// Truncated multivariate Taylor expansion of a scalar function at a base
// point x0: coefficients c_beta = (d^beta f)(x0) / beta! for |beta| <= D,
// stored densely in JetLayout order.
//
// Jets are values. Binary operations require equal dimension and base point;
// operands of different degree combine at the smaller degree, since a
// degree-D jet carries no information beyond order D.
//
// Sign convention: laplacian() is the analyst's sum of second partials.
// The geometer's Laplacian differs by (-1)^k on k-fold iterates, which
// never changes a zero set.
template <typename T>
class Jet {
public:
    using Scalar = T;
    using Traits = ScalarTraits<T>;
    using BasePoint = std::shared_ptr<const std::vector<T>>;

    Jet(std::shared_ptr<const JetLayout> layout, BasePoint base, std::vector<T> coeffs)
        : layout_(std::move(layout)), base_(std::move(base)), coeffs_(std::move(coeffs)) {
        if (!layout_ || !base_ || static_cast<int>(base_->size()) != layout_->dim() ||
            coeffs_.size() != layout_->size()) {
            throw ShapeError("jet: coefficient table does not match layout");
        }
    }

    static Jet constant(std::shared_ptr<const JetLayout> layout, BasePoint base, const T& value) {
        std::vector<T> c(layout->size(), T(0));
        c[0] = value;
        return Jet(std::move(layout), std::move(base), std::move(c));
    }

    Jet constant_like(const T& value) const { return constant(layout_, base_, value); }

    int dim() const { return layout_->dim(); }
    int degree() const { return layout_->degree(); }
    std::size_t size() const { return coeffs_.size(); }
    const std::shared_ptr<const JetLayout>& layout() const { return layout_; }
    const BasePoint& base() const { return base_; }
    std::span<const T> base_point() const { return *base_; }
    std::span<const T> coefficients() const { return coeffs_; }

    const T& value() const { return coeffs_[0]; }

    // Coefficient of beta; zero for |beta| beyond the truncation degree is
    // not an answer the jet can give, so that case throws.
    const T& coefficient(std::span<const Exponent> beta) const {
        const std::size_t r = layout_->rank(beta);
        if (r >= coeffs_.size()) {
            throw DegreeError("jet: coefficient above truncation degree");
        }
        return coeffs_[r];
    }

    Jet truncated(int degree) const {
        if (degree > this->degree()) {
            throw DegreeError("jet: cannot raise truncation degree");
        }
        if (degree == this->degree()) {
            return *this;
        }
        auto layout = JetLayout::get(dim(), degree);
        std::vector<T> c(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(layout->size()));
        return Jet(std::move(layout), base_, std::move(c));
    }

    bool is_zero() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const T& v) { return Traits::is_zero(v); });
    }

    std::size_t nonzero_count() const {
        return static_cast<std::size_t>(
            std::count_if(coeffs_.begin(), coeffs_.end(), [](const T& v) { return !Traits::is_zero(v); }));
    }

    Jet operator-() const {
        Jet out = *this;
        for (auto& v : out.coeffs_) {
            v = -v;
        }
        return out;
    }

    Jet& operator+=(const Jet& rhs) { return accumulate(rhs, +1); }
    Jet& operator-=(const Jet& rhs) { return accumulate(rhs, -1); }

    Jet& operator+=(const T& s) {
        coeffs_[0] += s;
        return *this;
    }
    Jet& operator-=(const T& s) {
        coeffs_[0] -= s;
        return *this;
    }
    Jet& operator*=(const T& s) {
        for (auto& v : coeffs_) {
            v *= s;
        }
        return *this;
    }

    // Same dimension and base point (values compared when the pointers differ).
    void check_compatible(const Jet& other) const {
        if (dim() != other.dim()) {
            throw ShapeError("jet: dimension mismatch");
        }
        if (base_ != other.base_ && *base_ != *other.base_) {
            throw ShapeError("jet: base point mismatch");
        }
    }

    std::vector<T>& mutable_coefficients() { return coeffs_; }

private:
    Jet& accumulate(const Jet& rhs, int sign) {
        check_compatible(rhs);
        if (rhs.degree() < degree()) {
            *this = truncated(rhs.degree());
        }
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (sign > 0) {
                coeffs_[i] += rhs.coeffs_[i];
            } else {
                coeffs_[i] -= rhs.coeffs_[i];
            }
        }
        return *this;
    }

    std::shared_ptr<const JetLayout> layout_;
    BasePoint base_;
    std::vector<T> coeffs_;
};

// Truncated Cauchy product. The outer loop runs over the sparser operand so
// products with low-degree polynomials (coordinates, |x - a|^2) stay cheap.
template <typename T>
Jet<T> multiply(const Jet<T>& a, const Jet<T>& b) {
    a.check_compatible(b);
    const int degree = std::min(a.degree(), b.degree());
    auto layout = JetLayout::get(a.dim(), degree);
    const bool a_outer = a.nonzero_count() <= b.nonzero_count();
    const auto outer = a_outer ? a.coefficients() : b.coefficients();
    const auto inner = a_outer ? b.coefficients() : a.coefficients();
    const std::size_t m = static_cast<std::size_t>(a.dim());

    std::vector<T> out(layout->size(), T(0));
    std::vector<Exponent> sum(m);
    T tmp(0);
    for (std::size_t i = 0; i < layout->size(); ++i) {
        if (ScalarTraits<T>::is_zero(outer[i])) {
            continue;
        }
        const auto alpha = layout->exponents(i);
        const std::size_t limit = layout->size_up_to(degree - layout->total_degree(i));
        for (std::size_t j = 0; j < limit; ++j) {
            if (ScalarTraits<T>::is_zero(inner[j])) {
                continue;
            }
            const auto beta = layout->exponents(j);
            for (std::size_t t = 0; t < m; ++t) {
                sum[t] = static_cast<Exponent>(alpha[t] + beta[t]);
            }
            ScalarTraits<T>::fma(out[layout->rank(sum)], outer[i], inner[j], tmp);
        }
    }
    return Jet<T>(std::move(layout), a.base(), std::move(out));
}

// Quotient jet q with q * den = num up to the common degree. Solved degree by
// degree; only the nonzero coefficients of den enter the recurrence.
template <typename T>
Jet<T> divide(const Jet<T>& num, const Jet<T>& den) {
    num.check_compatible(den);
    if (ScalarTraits<T>::is_zero(den.value())) {
        throw SingularityError("jet division: denominator vanishes at the base point");
    }
    const int degree = std::min(num.degree(), den.degree());
    auto layout = JetLayout::get(num.dim(), degree);
    const std::size_t m = static_cast<std::size_t>(num.dim());
    const auto dc = den.coefficients();
    const auto nc = num.coefficients();

    std::vector<std::size_t> support;
    for (std::size_t i = 1; i < layout->size(); ++i) {
        if (!ScalarTraits<T>::is_zero(dc[i])) {
            support.push_back(i);
        }
    }
    const T inv0 = checked_divide(T(1), dc[0]);
    std::vector<T> q(layout->size(), T(0));
    std::vector<Exponent> diff(m);
    T acc(0);
    T tmp(0);
    for (std::size_t idx = 0; idx < layout->size(); ++idx) {
        acc = nc[idx];
        const auto beta = layout->exponents(idx);
        const int beta_degree = layout->total_degree(idx);
        for (std::size_t s : support) {
            if (layout->total_degree(s) > beta_degree) {
                break;
            }
            const auto alpha = layout->exponents(s);
            bool below = true;
            for (std::size_t t = 0; t < m; ++t) {
                if (alpha[t] > beta[t]) {
                    below = false;
                    break;
                }
                diff[t] = static_cast<Exponent>(beta[t] - alpha[t]);
            }
            if (below) {
                ScalarTraits<T>::fms(acc, dc[s], q[layout->rank(diff)], tmp);
            }
        }
        q[idx] = acc * inv0;
    }
    return Jet<T>(std::move(layout), num.base(), std::move(q));
}

template <typename T>
Jet<T> operator+(Jet<T> a, const Jet<T>& b) {
    a += b;
    return a;
}
template <typename T>
Jet<T> operator-(Jet<T> a, const Jet<T>& b) {
    a -= b;
    return a;
}
template <typename T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
    return multiply(a, b);
}
template <typename T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
    return divide(a, b);
}

template <typename T>
Jet<T> operator+(Jet<T> a, const T& s) {
    a += s;
    return a;
}
template <typename T>
Jet<T> operator+(const T& s, Jet<T> a) {
    a += s;
    return a;
}
template <typename T>
Jet<T> operator-(Jet<T> a, const T& s) {
    a -= s;
    return a;
}
template <typename T>
Jet<T> operator-(const T& s, const Jet<T>& a) {
    Jet<T> out = -a;
    out += s;
    return out;
}
template <typename T>
Jet<T> operator*(Jet<T> a, const T& s) {
    a *= s;
    return a;
}
template <typename T>
Jet<T> operator*(const T& s, Jet<T> a) {
    a *= s;
    return a;
}
template <typename T>
Jet<T> operator/(Jet<T> a, const T& s) {
    a *= checked_divide(T(1), s);
    return a;
}
template <typename T>
Jet<T> operator/(const T& s, const Jet<T>& a) {
    return divide(a.constant_like(s), a);
}

// Coordinate jets x_1..x_m at x0: constant term x0_i, unit coefficient on e_i.
template <typename T>
std::vector<Jet<T>> seed(std::span<const T> x0, int degree) {
    if (x0.empty()) {
        throw std::invalid_argument("seed: base point needs at least one coordinate");
    }
    if (degree < 0) {
        throw std::invalid_argument("seed: negative degree");
    }
    const int m = static_cast<int>(x0.size());
    auto layout = JetLayout::get(m, degree);
    auto base = std::make_shared<const std::vector<T>>(x0.begin(), x0.end());
    std::vector<Jet<T>> out;
    out.reserve(x0.size());
    for (int i = 0; i < m; ++i) {
        std::vector<T> c(layout->size(), T(0));
        c[0] = x0[static_cast<std::size_t>(i)];
        if (degree >= 1) {
            c[layout->unit_index(i)] = T(1);
        }
        out.emplace_back(layout, base, std::move(c));
    }
    return out;
}

// d f / d x_axis, one degree lower: c'_beta = (beta_axis + 1) c_{beta + e_axis}.
template <typename T>
Jet<T> partial(const Jet<T>& f, int axis) {
    if (f.degree() < 1) {
        throw DegreeError("partial: jet degree must be >= 1");
    }
    if (axis < 0 || axis >= f.dim()) {
        throw std::out_of_range("partial: axis out of range");
    }
    const auto& src = *f.layout();
    auto layout = JetLayout::get(f.dim(), f.degree() - 1);
    const auto c = f.coefficients();
    std::vector<T> out(layout->size(), T(0));
    std::vector<Exponent> shifted(static_cast<std::size_t>(f.dim()));
    const auto a = static_cast<std::size_t>(axis);
    for (std::size_t idx = 0; idx < layout->size(); ++idx) {
        const auto beta = layout->exponents(idx);
        std::copy(beta.begin(), beta.end(), shifted.begin());
        shifted[a] = static_cast<Exponent>(shifted[a] + 1);
        const T& v = c[src.rank(shifted)];
        if (!ScalarTraits<T>::is_zero(v)) {
            out[idx] = v * T(static_cast<long>(beta[a]) + 1);
        }
    }
    return Jet<T>(std::move(layout), f.base(), std::move(out));
}

// Flat Laplacian sum_i d_ii f, two degrees lower.
template <typename T>
Jet<T> laplacian(const Jet<T>& f) {
    if (f.degree() < 2) {
        throw DegreeError("laplacian: jet degree must be >= 2");
    }
    const auto& src = *f.layout();
    auto layout = JetLayout::get(f.dim(), f.degree() - 2);
    const auto c = f.coefficients();
    const std::size_t m = static_cast<std::size_t>(f.dim());
    std::vector<T> out(layout->size(), T(0));
    std::vector<Exponent> shifted(m);
    T tmp(0);
    for (std::size_t idx = 0; idx < layout->size(); ++idx) {
        const auto beta = layout->exponents(idx);
        std::copy(beta.begin(), beta.end(), shifted.begin());
        for (std::size_t i = 0; i < m; ++i) {
            shifted[i] = static_cast<Exponent>(beta[i] + 2);
            const T& v = c[src.rank(shifted)];
            if (!ScalarTraits<T>::is_zero(v)) {
                const long w = (static_cast<long>(beta[i]) + 1) * (static_cast<long>(beta[i]) + 2);
                ScalarTraits<T>::fma(out[idx], v, T(w), tmp);
            }
            shifted[i] = beta[i];
        }
    }
    return Jet<T>(std::move(layout), f.base(), std::move(out));
}

// Delta^k f (x0) = sum_{|gamma| = k} (k! / gamma!) (2 gamma)! c_{2 gamma}.
template <typename T>
T iterated_laplacian(const Jet<T>& f, int k) {
    if (k < 0) {
        throw std::invalid_argument("iterated_laplacian: negative order");
    }
    if (2 * k > f.degree()) {
        throw DegreeError("iterated_laplacian: need degree >= 2k");
    }
    if (k == 0) {
        return f.value();
    }
    const auto& layout = *f.layout();
    const auto c = f.coefficients();
    const std::size_t m = static_cast<std::size_t>(f.dim());
    std::vector<mpz_class> factorial(static_cast<std::size_t>(2 * k) + 1);
    factorial[0] = 1;
    for (std::size_t i = 1; i < factorial.size(); ++i) {
        factorial[i] = factorial[i - 1] * static_cast<unsigned long>(i);
    }
    std::vector<Exponent> doubled(m);
    T total(0);
    T tmp(0);
    for (std::size_t idx = layout.degree_begin(k); idx < layout.degree_begin(k + 1); ++idx) {
        const auto gamma = layout.exponents(idx);
        mpz_class weight = factorial[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < m; ++i) {
            doubled[i] = static_cast<Exponent>(2 * gamma[i]);
            weight *= factorial[doubled[i]];
            weight /= factorial[gamma[i]];
        }
        const T& v = c[layout.rank(doubled)];
        if (!ScalarTraits<T>::is_zero(v)) {
            ScalarTraits<T>::fma(total, v, scalar_from<T>(Rational(weight)), tmp);
        }
    }
    return total;
}

template <typename T>
std::pair<T, std::vector<T>> value_and_gradient(const Jet<T>& f) {
    if (f.degree() < 1) {
        throw DegreeError("value_and_gradient: jet degree must be >= 1");
    }
    std::vector<T> grad;
    grad.reserve(static_cast<std::size_t>(f.dim()));
    for (int i = 0; i < f.dim(); ++i) {
        grad.push_back(f.coefficients()[f.layout()->unit_index(i)]);
    }
    return {f.value(), std::move(grad)};
}

template <typename T>
Jet<T> dot(std::span<const Jet<T>> u, std::span<const Jet<T>> v) {
    if (u.size() != v.size() || u.empty()) {
        throw ShapeError("dot: length mismatch");
    }
    Jet<T> acc = u[0] * v[0];
    for (std::size_t i = 1; i < u.size(); ++i) {
        acc += u[i] * v[i];
    }
    return acc;
}

template <typename T>
Jet<T> squared_norm(std::span<const Jet<T>> u) {
    return dot(u, u);
}

}  // namespace biconf
