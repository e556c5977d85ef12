#include "doctest.h"

#include <functional>

#include "biconf/errors.hpp"
#include "biconf/jet.hpp"
#include "support.hpp"

using namespace biconf;
using namespace biconf::testing;

namespace {

const Rational& coeff(const Jet<Rational>& f, std::initializer_list<int> beta) {
    std::vector<Exponent> e;
    for (int b : beta) {
        e.push_back(static_cast<Exponent>(b));
    }
    return f.coefficient(e);
}

}  // namespace

TEST_CASE("layout sizes and ordering") {
    CHECK(monomial_count(3, 4) == 35);
    CHECK(monomial_count(12, 10) == 646646);
    const auto layout = JetLayout::get(3, 3);
    CHECK(layout->size() == 20);
    for (std::size_t i = 0; i < layout->size(); ++i) {
        CHECK(layout->rank(layout->exponents(i)) == i);
    }
    // Truncation is a prefix.
    const auto small = JetLayout::get(3, 2);
    for (std::size_t i = 0; i < small->size(); ++i) {
        CHECK(std::ranges::equal(small->exponents(i), layout->exponents(i)));
    }
}

TEST_CASE("seed gives coordinate functions") {
    const auto xy = seed<Rational>(qv({0, 0}), 2);
    REQUIRE(xy.size() == 2);
    CHECK(xy[0].value() == 0);
    CHECK(coeff(xy[0], {1, 0}) == 1);
    CHECK(coeff(xy[0], {0, 1}) == 0);
    CHECK(coeff(xy[1], {0, 1}) == 1);

    const auto x = seed<Rational>(qv({3}), 1);
    CHECK(x[0].coefficients().size() == 2);
    CHECK(x[0].coefficients()[0] == 3);
    CHECK(x[0].coefficients()[1] == 1);

    const auto xyz = seed<Rational>(qv({1, 2, 3}), 4);
    REQUIRE(xyz.size() == 3);
    for (const auto& j : xyz) {
        CHECK(j.size() == 35);
    }
    CHECK_THROWS_AS(seed<Rational>(RationalVector{}, 2), std::invalid_argument);
}

TEST_CASE("ring operations") {
    const auto v = seed<Rational>(qv({0, 0}), 2);
    const auto one = v[0].constant_like(1);
    const auto p = (one + v[0]) * (one + v[1]);
    CHECK(p.value() == 1);
    CHECK(coeff(p, {1, 0}) == 1);
    CHECK(coeff(p, {0, 1}) == 1);
    CHECK(coeff(p, {1, 1}) == 1);
    CHECK(coeff(p, {2, 0}) == 0);
    CHECK(p.nonzero_count() == 4);

    const auto x1 = seed<Rational>(qv({0}), 1);
    CHECK((x1[0] * x1[0]).is_zero());  // x^2 truncated at degree 1

    const auto x = seed<Rational>(qv({5}), 2)[0];
    const auto two = x.constant_like(2);
    CHECK(((two + x) - (two + x)).is_zero());

    const auto scaled = Rational(3) * x;
    CHECK(scaled.value() == 15);
    CHECK(scaled.coefficients()[1] == 3);
}

TEST_CASE("mismatched operands are rejected") {
    const auto a = seed<Rational>(qv({0, 0}), 2)[0];
    const auto b = seed<Rational>(qv({1, 0}), 2)[0];
    const auto c = seed<Rational>(qv({0, 0, 0}), 2)[0];
    CHECK_THROWS_AS(a + b, ShapeError);
    CHECK_THROWS_AS(a * c, ShapeError);
}

TEST_CASE("division") {
    const auto x = seed<Rational>(qv({0}), 2)[0];
    const auto g = Rational(1) / (Rational(1) - x);
    CHECK(g.coefficients()[0] == 1);
    CHECK(g.coefficients()[1] == 1);
    CHECK(g.coefficients()[2] == 1);

    CHECK_THROWS_AS(x / x, SingularityError);

    // 1/|x|^2 at (1,0,0,0): value 1, d/dx1 = -2/|x|^4 x1 = -2.
    const auto p = seed<Rational>(qv({1, 0, 0, 0}), 1);
    const auto r = Rational(1) / squared_norm<Rational>(p);
    const auto [value, grad] = value_and_gradient(r);
    CHECK(value == 1);
    CHECK(grad == qv({-2, 0, 0, 0}));
}

TEST_CASE("partial derivatives") {
    const auto x = seed<Rational>(qv({0}), 2)[0];
    const auto d = partial(x * x, 0);
    CHECK(d.degree() == 1);
    CHECK(d.coefficients()[0] == 0);
    CHECK(d.coefficients()[1] == 2);

    CHECK(partial(x.constant_like(7), 0).is_zero());

    // d/dx 1/(1-x) = 1/(1-x)^2 = 1 + 2x + ...
    const auto g = partial(Rational(1) / (Rational(1) - x), 0);
    CHECK(g.degree() == 1);
    CHECK(g.coefficients()[0] == 1);
    CHECK(g.coefficients()[1] == 2);

    const auto flat = seed<Rational>(qv({1}), 0)[0];
    CHECK_THROWS_AS(partial(flat, 0), DegreeError);
}

TEST_CASE("laplacian") {
    const auto v = seed<Rational>(qv({0, 0}), 2);
    const auto lap = laplacian(squared_norm<Rational>(v));
    CHECK(lap.degree() == 0);
    CHECK(lap.value() == 4);

    // k/|x-a|^2 is harmonic in R^4 away from a.
    const auto w = seed<Rational>(qv({q(1, 2), q(-1, 3), 2, q(3, 4)}), 4);
    std::vector<Jet<Rational>> shifted;
    const RationalVector a = qv({q(1, 5), 0, -1, q(2, 7)});
    for (std::size_t i = 0; i < w.size(); ++i) {
        shifted.push_back(w[i] - a[i]);
    }
    const auto lambda = Rational(3, 2) / squared_norm<Rational>(shifted);
    CHECK(laplacian(lambda).is_zero());

    // lap |x|^4 = (4m + 8)|x|^2 = 20 at (1,0,0) in m = 3.
    const auto u = seed<Rational>(qv({1, 0, 0}), 4);
    const auto r2 = squared_norm<Rational>(u);
    CHECK(laplacian(r2 * r2).value() == 20);

    CHECK_THROWS_AS(laplacian(seed<Rational>(qv({0}), 1)[0]), DegreeError);
}

TEST_CASE("iterated laplacian") {
    const auto u = seed<Rational>(qv({q(1, 3), q(2, 5), -1}), 4);
    const auto r2 = squared_norm<Rational>(u);
    CHECK(iterated_laplacian(r2, 1) == 6);
    // lap^2 |x|^4 = 8m(m+2) = 120 in m = 3, at any point.
    CHECK(iterated_laplacian(r2 * r2, 2) == 120);

    // x1/|x|^2 in m = 6 at e1: 2*4*(m-2)(m-4) = 64.
    RationalVector e1(6, Rational(0));
    e1[0] = 1;
    const auto x = seed<Rational>(e1, 4);
    const auto f = x[0] / squared_norm<Rational>(x);
    CHECK(iterated_laplacian(f, 2) == 64);

    CHECK_THROWS_AS(iterated_laplacian(f, 3), DegreeError);
    CHECK(iterated_laplacian(f, 0) == 1);
}

TEST_CASE("value and gradient") {
    const auto x = seed<Rational>(qv({2}), 2)[0];
    const auto [v, g] = value_and_gradient(x * x + Rational(1));
    CHECK(v == 5);
    CHECK(g == qv({4}));

    const auto c = seed<Rational>(qv({1, 2}), 1)[0].constant_like(q(7, 3));
    const auto [cv, cg] = value_and_gradient(c);
    CHECK(cv == q(7, 3));
    CHECK(cg == qv({0, 0}));
}

TEST_CASE("property: jets of polynomials are their Taylor coefficients") {
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 25; ++trial) {
        const int dim = 1 + trial % 4;
        const int degree = 2 + trial % 3;
        const auto p = random_polynomial(gen, dim, degree + 1, 6);
        RationalVector x0;
        std::uniform_int_distribution<long> num(-7, 7);
        for (int i = 0; i < dim; ++i) {
            x0.push_back(q(num(gen), 3));
        }
        const auto f = polynomial_jet(p, seed<Rational>(x0, degree));
        const auto& layout = *f.layout();
        for (std::size_t i = 0; i < layout.size(); ++i) {
            CHECK(f.coefficients()[i] == taylor_coefficient(p, x0, layout.exponents(i)));
        }
    }
}

TEST_CASE("property: division undoes multiplication and lap is a sum of second partials") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 2 + trial % 3;
        RationalVector x0;
        std::uniform_int_distribution<long> num(-5, 5);
        for (int i = 0; i < dim; ++i) {
            x0.push_back(q(num(gen), 4));
        }
        const auto x = seed<Rational>(x0, 4);
        const auto a = polynomial_jet(random_polynomial(gen, dim, 4, 5), x);
        auto b = polynomial_jet(random_polynomial(gen, dim, 3, 4), x);
        if (sgn(b.value()) == 0) {
            b = b + Rational(1);
        }
        const auto back = (a * b) / b;
        CHECK(std::ranges::equal(back.coefficients(), a.coefficients()));

        const auto h = a / b;
        auto sum = partial(partial(h, 0), 0);
        for (int i = 1; i < dim; ++i) {
            sum = sum + partial(partial(h, i), i);
        }
        CHECK(std::ranges::equal(laplacian(h).coefficients(), sum.coefficients()));
        CHECK(iterated_laplacian(h, 1) == laplacian(h).value());
    }
}

TEST_CASE("float laplacian matches central differences") {
    using Fn = std::function<double(const std::vector<double>&)>;
    using JetFn = std::function<Jet<double>(const std::vector<Jet<double>>&)>;
    struct Case {
        Fn f;
        JetFn jet;
    };
    const std::vector<Case> cases{
        {[](const std::vector<double>& x) { return 1.0 / (1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); },
         [](const std::vector<Jet<double>>& x) { return 1.0 / (1.0 + squared_norm<double>(x)); }},
        {[](const std::vector<double>& x) { return x[0] * x[1] / (2.0 + x[2] * x[2]); },
         [](const std::vector<Jet<double>>& x) { return x[0] * x[1] / (2.0 + x[2] * x[2]); }},
        {[](const std::vector<double>& x) { return std::pow(x[0] - x[1], 3) + x[2] * x[0] * x[0]; },
         [](const std::vector<Jet<double>>& x) {
             const auto d = x[0] - x[1];
             return d * d * d + x[2] * x[0] * x[0];
         }},
    };
    const std::vector<double> x0{0.3, -0.7, 0.45};
    const double h = 1e-4;
    for (const auto& c : cases) {
        const auto jet = c.jet(seed<double>(x0, 2));
        double fd = 0;
        for (std::size_t i = 0; i < x0.size(); ++i) {
            auto up = x0;
            auto down = x0;
            up[i] += h;
            down[i] -= h;
            fd += (c.f(up) - 2 * c.f(x0) + c.f(down)) / (h * h);
        }
        CHECK(relative_error(laplacian(jet).value(), fd) < 1e-6);
    }
}
