#pragma once

#include <gmpxx.h>

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biconf/errors.hpp"

namespace biconf {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

enum class Mode { exact, floating };

std::string_view mode_name(Mode mode);
Mode parse_mode(std::string_view name);

// Accepts "p/q", "p" and "-p/q"; the result is canonicalized.
// Throws std::invalid_argument on anything else (including q = 0).
Rational parse_rational(std::string_view text);

// Canonical GMP form: "p/q", or "p" when q = 1.
std::string to_string(const Rational& q);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

// Uniform access to the two scalar modes. Exact mode is GMP rationals,
// float mode is IEEE double.
template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
    static constexpr Mode mode = Mode::exact;
    static Rational from_rational(const Rational& q) { return q; }
    static double to_double(const Rational& q) { return q.get_d(); }
    static bool is_zero(const Rational& q) { return sgn(q) == 0; }
    static int sign(const Rational& q) { return sgn(q); }
    // acc += a * b, reusing tmp to avoid an allocation per term.
    static void fma(Rational& acc, const Rational& a, const Rational& b, Rational& tmp) {
        mpq_mul(tmp.get_mpq_t(), a.get_mpq_t(), b.get_mpq_t());
        mpq_add(acc.get_mpq_t(), acc.get_mpq_t(), tmp.get_mpq_t());
    }
    // acc -= a * b
    static void fms(Rational& acc, const Rational& a, const Rational& b, Rational& tmp) {
        mpq_mul(tmp.get_mpq_t(), a.get_mpq_t(), b.get_mpq_t());
        mpq_sub(acc.get_mpq_t(), acc.get_mpq_t(), tmp.get_mpq_t());
    }
};

template <>
struct ScalarTraits<double> {
    static constexpr Mode mode = Mode::floating;
    static double from_rational(const Rational& q) { return q.get_d(); }
    static double to_double(double v) { return v; }
    static bool is_zero(double v) { return v == 0.0; }
    static int sign(double v) { return (v > 0.0) - (v < 0.0); }
    static void fma(double& acc, double a, double b, double&) { acc += a * b; }
    static void fms(double& acc, double a, double b, double&) { acc -= a * b; }
};

template <typename T>
T scalar_from(const Rational& q) {
    return ScalarTraits<T>::from_rational(q);
}

template <typename T>
T scalar_from(long v) {
    return ScalarTraits<T>::from_rational(Rational(v));
}

template <typename T>
bool is_zero(const T& v) {
    return ScalarTraits<T>::is_zero(v);
}

template <typename T>
double to_double(const T& v) {
    return ScalarTraits<T>::to_double(v);
}

template <typename T>
T checked_divide(const T& num, const T& den) {
    if (is_zero(den)) {
        throw SingularityError("division by zero");
    }
    return T(num / den);
}

template <typename T>
std::vector<T> convert_vector(std::span<const Rational> v) {
    std::vector<T> out;
    out.reserve(v.size());
    for (const auto& q : v) {
        out.push_back(scalar_from<T>(q));
    }
    return out;
}

// Euclidean norm of a scalar tuple, always reported as a double.
template <typename T>
double euclidean_norm(std::span<const T> v) {
    double sum = 0.0;
    for (const auto& x : v) {
        const double d = to_double(x);
        sum += d * d;
    }
    return std::sqrt(sum);
}

template <typename T>
bool all_zero(std::span<const T> v) {
    for (const auto& x : v) {
        if (!is_zero(x)) {
            return false;
        }
    }
    return true;
}

}  // namespace biconf
