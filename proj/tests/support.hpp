#pragma once

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "biconf/jet.hpp"
#include "biconf/multi_index.hpp"
#include "biconf/scalar.hpp"

namespace biconf::testing {

inline Rational q(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline RationalVector qv(std::initializer_list<Rational> values) {
    return RationalVector(values);
}

inline std::vector<double> to_doubles(std::span<const Rational> v) {
    std::vector<double> out;
    for (const auto& x : v) {
        out.push_back(x.get_d());
    }
    return out;
}

inline Rational squared(std::span<const Rational> v) {
    Rational s = 0;
    for (const auto& x : v) {
        s += x * x;
    }
    return s;
}

inline double relative_error(double got, double want) {
    return std::fabs(got - want) / std::max(1.0, std::fabs(want));
}

// Sparse polynomial, exponent tuple -> coefficient. Serves as an oracle that
// shares no code with the jet engine.
using Exponents = std::vector<int>;
using Polynomial = std::map<Exponents, Rational>;

inline Polynomial random_polynomial(std::mt19937_64& gen, int dim, int degree, int terms) {
    std::uniform_int_distribution<int> exp_dist(0, degree);
    std::uniform_int_distribution<long> num(-9, 9);
    std::uniform_int_distribution<long> den(1, 5);
    Polynomial p;
    for (int t = 0; t < terms; ++t) {
        Exponents e(static_cast<std::size_t>(dim), 0);
        int left = degree;
        for (auto& v : e) {
            v = std::min(left, exp_dist(gen));
            left -= v;
        }
        p[e] += q(num(gen), den(gen));
    }
    return p;
}

// Builds the polynomial from seeded coordinate jets with ring operations.
template <typename T>
Jet<T> polynomial_jet(const Polynomial& p, const std::vector<Jet<T>>& x) {
    Jet<T> out = x.front().constant_like(T(0));
    for (const auto& [e, c] : p) {
        Jet<T> term = x.front().constant_like(scalar_from<T>(c));
        for (std::size_t i = 0; i < e.size(); ++i) {
            for (int k = 0; k < e[i]; ++k) {
                term = term * x[i];
            }
        }
        out = out + term;
    }
    return out;
}

inline Rational power(const Rational& base, int e) {
    Rational r = 1;
    for (int i = 0; i < e; ++i) {
        r *= base;
    }
    return r;
}

inline Rational choose(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    Rational r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= Rational(n - k + i, i);
        r.canonicalize();
    }
    return r;
}

// Taylor coefficient of x^beta at x0: sum over monomials c_alpha prod_i
// C(alpha_i, beta_i) x0_i^(alpha_i - beta_i), from the binomial expansion of
// (x0_i + h_i)^alpha_i.
inline Rational taylor_coefficient(const Polynomial& p, std::span<const Rational> x0, std::span<const Exponent> beta) {
    Rational total = 0;
    for (const auto& [alpha, c] : p) {
        Rational term = c;
        for (std::size_t i = 0; i < alpha.size() && sgn(term) != 0; ++i) {
            term *= choose(alpha[i], beta[i]) * power(x0[i], alpha[i] - beta[i]);
        }
        total += term;
    }
    return total;
}

}  // namespace biconf::testing
