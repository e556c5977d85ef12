#include "doctest.h"

#include "biconf/errors.hpp"
#include "biconf/mobius.hpp"
#include "biconf/sampling.hpp"
#include "support.hpp"

using namespace biconf;
using namespace biconf::testing;

namespace {

MobiusMap make_map(RationalVector a, RationalVector b, Rational k, RationalMatrix A, int epsilon) {
    MobiusMap map;
    map.a = std::move(a);
    map.b = std::move(b);
    map.k = std::move(k);
    map.A = std::move(A);
    map.epsilon = epsilon;
    return map;
}

RationalMatrix skew_matrix(int n, const Rational& s, int i, int j) {
    RationalMatrix m(n);
    m(i, j) = s;
    m(j, i) = -s;
    return m;
}

RationalVector sub(std::span<const Rational> u, std::span<const Rational> v) {
    RationalVector out;
    for (std::size_t i = 0; i < u.size(); ++i) {
        out.push_back(u[i] - v[i]);
    }
    return out;
}

}  // namespace

TEST_CASE("matrices") {
    const auto s = skew_matrix(3, q(1, 2), 0, 2) + skew_matrix(3, q(-2, 3), 1, 2);
    CHECK(s.is_skew());
    const auto r = cayley_orthogonal(s);
    CHECK(r.is_orthogonal());
    CHECK(determinant(r) == 1);
    CHECK(r.inverse() == r.transpose());

    const std::vector<int> perm{2, 0, 1};
    const std::vector<int> signs{-1, 1, -1};
    const auto p = signed_permutation(perm, signs);
    CHECK(p.is_orthogonal());
    CHECK(p(0, 2) == -1);
    CHECK(p(1, 0) == 1);
    CHECK(determinant(p) == 1);  // cyclic permutation, two sign flips

    RationalMatrix singular(2);
    singular(0, 0) = 1;
    singular(0, 1) = 2;
    singular(1, 0) = 2;
    singular(1, 1) = 4;
    CHECK(determinant(singular) == 0);
    CHECK_THROWS_AS(singular.inverse(), SingularityError);
}

TEST_CASE("validate") {
    const auto ok = make_map(qv({0, 0, 0}), qv({1, 0, 0}), 2, RationalMatrix::identity(3), 2);
    CHECK_NOTHROW(validate(ok));

    auto bad = ok;
    bad.A(0, 1) = q(1, 10);
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = ok;
    bad.k = 0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = ok;
    bad.epsilon = 1;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = ok;
    bad.b = qv({1, 0});
    CHECK_THROWS_AS(validate(bad), ValidationError);
}

TEST_CASE("apply and inverse_apply") {
    const auto inv = inversion(3);
    const auto y = apply_point<Rational>(inv, qv({2, 0, 0}));
    CHECK(y == qv({q(1, 2), 0, 0}));

    const auto map = make_map(qv({1, q(1, 2), 0}), qv({-1, 0, q(1, 3)}), q(3, 2),
                              cayley_orthogonal(skew_matrix(3, q(1, 3), 0, 1)), 2);
    const RationalVector x = qv({q(1, 4), q(-2, 3), q(5, 6)});
    const auto image = apply_point<Rational>(map, x);
    CHECK(inverse_apply(map, image) == x);

    const auto xs = seed<Rational>(x, 2);
    const auto jets = apply_jet<Rational>(map, std::span<const Jet<Rational>>(xs));
    for (std::size_t i = 0; i < jets.size(); ++i) {
        CHECK(jets[i].value() == image[i]);
    }
    CHECK_THROWS_AS(apply_point<Rational>(map, map.a), SingularityError);

    const auto affine = make_map(qv({1, 0}), qv({0, 2}), 3, RationalMatrix::identity(2), 0);
    CHECK(apply_point<Rational>(affine, qv({2, 1})) == qv({3, 5}));
}

TEST_CASE("euclidean factor") {
    const auto map = make_map(qv({1, 0, 0, 0}), qv({0, 0, 0, 0}), 5, RationalMatrix::identity(4), 2);
    const auto x = seed<Rational>(qv({3, 0, 0, 0}), 1);
    CHECK(euclidean_factor<Rational>(map, std::span<const Jet<Rational>>(x)).value() == q(5, 4));
    auto affine = map;
    affine.epsilon = 0;
    CHECK(euclidean_factor<Rational>(affine, std::span<const Jet<Rational>>(x)).value() == 5);
}

TEST_CASE("conformal factor examples") {
    const RationalVector x0 = qv({q(1, 2), q(-1, 3), 1});
    const auto x = seed<Rational>(x0, 2);
    const std::span<const Jet<Rational>> xs(x);

    // The identity into the sphere chart: lambda = rho = 2 / (1 + |x|^2).
    const auto id = identity_map(3);
    const auto lam = conformal_factor<Rational>(SpaceFormModel(Chart::flat, 3), SpaceFormModel(Chart::sphere, 3), id, xs);
    CHECK(lam.value() == 2 / (1 + squared(x0)));

    // Inversion from the sphere chart to flat space: k (1 + |x|^2) / (2 |x - a|^2).
    const auto map = make_map(qv({0, 1, 0}), qv({0, 0, 0}), 3, RationalMatrix::identity(3), 2);
    const auto lam2 = conformal_factor<Rational>(SpaceFormModel(Chart::sphere, 3), SpaceFormModel(Chart::flat, 3), map, xs);
    CHECK(lam2.value() == Rational(3) * (1 + squared(x0)) / (2 * squared(sub(x0, map.a))));

    // The factor keeps the sign of k, so negative k is rejected here.
    auto neg = map;
    neg.k = -3;
    CHECK_THROWS_AS(conformal_factor_value(SpaceFormModel(Chart::sphere, 3), SpaceFormModel(Chart::flat, 3), neg, x0),
                    InadmissiblePointError);

    // A point outside the ball chart, and a point mapped outside it.
    const SpaceFormModel ball(Chart::hyperbolic, 3);
    CHECK_THROWS_AS(conformal_factor_value(ball, SpaceFormModel(Chart::flat, 3), id, qv({2, 0, 0})),
                    InadmissiblePointError);
    const auto dilate = make_map(qv({0, 0, 0}), qv({0, 0, 0}), 4, RationalMatrix::identity(3), 0);
    CHECK_THROWS_AS(conformal_factor_value(SpaceFormModel(Chart::flat, 3), ball, dilate, qv({q(1, 2), 0, 0})),
                    InadmissiblePointError);
}

TEST_CASE("reduced parameters") {
    const SpaceFormModel sphere(Chart::sphere, 3);
    const SpaceFormModel ball(Chart::hyperbolic, 3);
    const auto map = make_map(qv({1, 0, 0}), qv({0, q(1, 2), 0}), 2, RationalMatrix::identity(3), 2);

    const auto s = reduced_parameters(map, sphere);
    CHECK(s.c == q(8, 5));  // 2 / (1 + 1/4)
    CHECK(s.d == qv({1, q(-4, 5), 0}));
    CHECK(s.sign == DenominatorSign::plus);

    const auto h = reduced_parameters(map, ball);
    CHECK(h.c == q(8, 3));  // 2 / (1 - 1/4)
    CHECK(h.d == qv({1, q(4, 3), 0}));
    CHECK(h.sign == DenominatorSign::minus);

    auto affine = map;
    affine.epsilon = 0;
    const auto sa = reduced_parameters(affine, sphere);
    CHECK(sa.c == q(1, 2));
    CHECK(sa.d == qv({1, q(-1, 4), 0}));
    CHECK(reduced_parameters(affine, ball).c == q(-1, 2));

    CHECK_THROWS_AS(reduced_parameters(map, SpaceFormModel(Chart::flat, 3)), ModelError);
    auto unit = map;
    unit.b = qv({0, 1, 0});
    CHECK_THROWS_AS(reduced_parameters(unit, ball), ValidationError);
    CHECK_NOTHROW(reduced_parameters(unit, sphere));
    unit.epsilon = 0;
    CHECK_NOTHROW(reduced_parameters(unit, ball));
}

TEST_CASE("conformality check") {
    const auto map = make_map(qv({1, 0, 0}), qv({0, q(1, 2), 0}), 2,
                              cayley_orthogonal(skew_matrix(3, q(2, 5), 1, 2)), 2);
    const RationalVector x0 = qv({q(-1, 3), q(1, 4), q(2, 3)});
    for (auto c1 : {Chart::flat, Chart::sphere}) {
        for (auto c2 : {Chart::flat, Chart::sphere}) {
            CHECK(conformality_check(SpaceFormModel(c1, 3), SpaceFormModel(c2, 3), map, x0));
        }
    }
    // A shear is not conformal; the check itself must notice.
    auto shear = map;
    shear.A = RationalMatrix::identity(3);
    shear.A(0, 1) = q(1, 3);
    CHECK_FALSE(conformality_check(SpaceFormModel(Chart::flat, 3), SpaceFormModel(Chart::flat, 3), shear, x0));
}

TEST_CASE("flat-to-sphere factor matches its closed-form derivatives") {
    // lambda = 2c / (c^2 + |x-d|^2), grad lambda = -4c (x-d)/F^2,
    // lap lambda = -4c [m c^2 + (m-4)|x-d|^2] / F^3,
    // grad(lambda lap lambda) = -2m lambda^3 grad lambda - 8c^2(m-4)(2c^2 - 6|x-d|^2)(x-d)/F^5.
    const auto map = make_map(qv({q(1, 3), 0, q(-1, 2), 1, q(1, 4)}), qv({q(1, 2), q(-1, 3), 0, q(1, 5), 0}), q(3, 2),
                              cayley_orthogonal(skew_matrix(5, q(1, 2), 0, 3)), 2);
    const int m = 5;
    const SpaceFormModel flat(Chart::flat, m);
    const SpaceFormModel sphere(Chart::sphere, m);
    const auto p = reduced_parameters(map, sphere);
    const RationalVector x0 = qv({q(2, 3), q(1, 7), q(-1, 4), q(1, 2), q(-3, 5)});
    const auto x = seed<Rational>(x0, 3);
    const auto lambda = conformal_factor<Rational>(flat, sphere, map, std::span<const Jet<Rational>>(x));

    const auto xd = sub(x0, p.d);
    const Rational r = squared(xd);
    const Rational F = p.c * p.c + r;
    const Rational L = 2 * p.c / F;
    CHECK(lambda.value() == L);

    const auto [v, grad] = value_and_gradient(lambda);
    RationalVector gl;
    for (const auto& t : xd) {
        gl.push_back(-4 * p.c * t / (F * F));
    }
    CHECK(grad == gl);

    const auto lap = laplacian(lambda);
    CHECK(lap.value() == -4 * p.c * (m * p.c * p.c + (m - 4) * r) / (F * F * F));
    CHECK(Rational(L * lap.value()) ==
          Rational(-Rational(m, 2) * L * L * L * L - 8 * p.c * p.c * (m - 4) * r / (F * F * F * F)));

    const auto [lv, lgrad] = value_and_gradient(lambda * lap);
    for (int i = 0; i < m; ++i) {
        const Rational want = -2 * m * L * L * L * gl[i] -
                              8 * p.c * p.c * (m - 4) * (2 * p.c * p.c - 6 * r) * xd[i] / (F * F * F * F * F);
        CHECK(lgrad[i] == want);
    }
}

TEST_CASE("flat-to-ball factor in dimension 4 satisfies lap lambda = 2 lambda^3") {
    const auto map = make_map(qv({q(1, 3), 0, q(-1, 2), 1}), qv({q(1, 5), 0, q(-1, 4), 0}), q(1, 8),
                              cayley_orthogonal(skew_matrix(4, q(1, 3), 1, 3)), 2);
    const SpaceFormModel flat(Chart::flat, 4);
    const SpaceFormModel ball(Chart::hyperbolic, 4);
    const RationalVector x0 = qv({q(1, 2), q(-1, 3), q(1, 4), q(2, 3)});
    const auto x = seed<Rational>(x0, 2);
    const auto lambda = conformal_factor<Rational>(flat, ball, map, std::span<const Jet<Rational>>(x));
    const auto p = reduced_parameters(map, ball);
    CHECK(lambda.value() == 2 * p.c / (-p.c * p.c + squared(sub(x0, p.d))));
    const Rational L = lambda.value();
    CHECK(laplacian(lambda).value() == 2 * L * L * L);
}

TEST_CASE("property: conformal factor equals the closed form") {
    Rng rng(11);
    int compared = 0;
    for (int m = 3; m <= 5; ++m) {
        for (auto c1 : {Chart::flat, Chart::sphere, Chart::hyperbolic}) {
            for (auto c2 : {Chart::flat, Chart::sphere, Chart::hyperbolic}) {
                for (int eps : {0, 2}) {
                    const SpaceFormModel domain(c1, m);
                    const SpaceFormModel target(c2, m);
                    const auto map = random_map(rng, m, eps, target);
                    for (int i = 0; i < 20; ++i) {
                        const auto x0 = random_point(rng, m, c1 == Chart::hyperbolic ? Rational(9, 10) : Rational(2), 16);
                        const auto x = seed<Rational>(x0, 2);
                        const std::span<const Jet<Rational>> xs(x);
                        try {
                            const auto got = conformal_factor<Rational>(domain, target, map, xs);
                            const auto want = closed_form_factor<Rational>(domain, target, map, xs);
                            CHECK(std::ranges::equal(got.coefficients(), want.coefficients()));
                            CHECK(conformality_check(domain, target, map, x0));
                            ++compared;
                        } catch (const SingularityError&) {
                        } catch (const InadmissiblePointError&) {
                        }
                    }
                }
            }
        }
    }
    CHECK(compared > 600);
}

TEST_CASE("property: rotating the domain rotates the factor") {
    Rng rng(5);
    const SpaceFormModel domain(Chart::sphere, 4);
    const SpaceFormModel target(Chart::sphere, 4);
    for (int trial = 0; trial < 10; ++trial) {
        const auto map = random_map(rng, 4, trial % 2 == 0 ? 2 : 0, target);
        const auto Q = cayley_orthogonal(skew_matrix(4, rng.rational(2, 5), 0, 1) +
                                         skew_matrix(4, rng.rational(2, 5), 2, 3));
        auto rotated = map;
        rotated.A = map.A * Q;
        rotated.a = Q.transpose().apply(map.a);
        for (int i = 0; i < 5; ++i) {
            const auto x0 = random_point(rng, 4, 2, 12);
            const auto y0 = Q.transpose().apply(x0);
            try {
                CHECK(conformal_factor_value(domain, target, map, x0) ==
                      conformal_factor_value(domain, target, rotated, y0));
            } catch (const SingularityError&) {
            }
        }
    }
}

TEST_CASE("property: Cayley transforms of random skew matrices are rotations") {
    Rng rng(9);
    for (int n = 2; n <= 6; ++n) {
        RationalMatrix s(n);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const auto v = rng.rational(3, 7);
                s(i, j) = v;
                s(j, i) = -v;
            }
        }
        const auto r = cayley_orthogonal(s);
        CHECK(r.is_orthogonal());
        CHECK(determinant(r) == 1);
    }
}
