#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biconf/jet.hpp"
#include "biconf/mobius.hpp"
#include "biconf/scalar.hpp"
#include "biconf/spaceform.hpp"

namespace biconf {

// A conformal map between two space-form charts of the same dimension.
struct ConformalInstance {
    SpaceFormModel domain;
    SpaceFormModel target;
    MobiusMap map;
    std::optional<ReducedFactorParams> reduced;  // curved targets only

    int dim() const { return domain.dim(); }
    std::string describe() const;
};

// Validates the map, matching dimensions and, for curved targets, the
// reduced parameters (|b| = 1 with a hyperbolic target is rejected). A
// negative k is replaced by -k with A replaced by -A, which is the same map.
ConformalInstance make_instance(const SpaceFormModel& domain, const SpaceFormModel& target, const MobiusMap& map);

// Deliberate defects for negative-control runs of the self test.
enum class Mutation { none, flip_nd2_gradient_sign };

struct EvalOptions {
    double tol = 1e-9;  // float mode: zero iff |value| <= tol * scale
    Mutation mutation = Mutation::none;
};

// One residual at one point. scale is the sum of the norms of the terms the
// residual adds up; in exact mode exact_zero means value == 0.
template <typename T>
struct Residual {
    RationalVector point;
    std::vector<T> value;
    bool exact_zero = false;
    double norm = 0;
    double scale = 0;
};

// Values at x0 of lambda and its curved derivatives, from degree-3 jets:
//   L = lambda, DL = lap_bar lambda, N = |grad_bar lambda|^2,
//   GL = grad_bar lambda, GDL = grad_bar DL, GN = grad_bar N,
//   GLD = grad_bar (lambda DL).
// The magnitudes bound each quantity by the sum of the absolute values of
// its summands (products of partials of lambda and tau = 1/sigma). They set
// the float-mode scale, so that a quantity which cancels to roundoff, such
// as lap lambda for the inversion in m = 4, is not measured against itself.
template <typename T>
struct FactorDerivatives {
    T L;
    T DL;
    T N;
    std::vector<T> GL;
    std::vector<T> GDL;
    std::vector<T> GN;
    std::vector<T> GLD;

    struct Magnitudes {
        double DL = 0;
        double N = 0;
        double GL = 0;
        double GDL = 0;
        double GN = 0;
        double GLD = 0;
    } mag;
};

template <typename T>
FactorDerivatives<T> factor_derivatives(const ConformalInstance& inst, std::span<const Rational> x);

template <typename T>
struct PointResiduals {
    FactorDerivatives<T> d;
    Residual<T> cl;
    Residual<T> sdl;
    Residual<T> nd;
    Residual<T> nd2;
    bool harmonic = false;  // grad_bar lambda = 0 at the point
};

// All residuals share one set of jets. With c1, c2 the curvatures of domain
// and target:
//   CL  = DL - (L Scal_M - L^3 Scal_N) / (2(m-1)) + ((m-4)/(2L)) N
//   SDL = L GDL - 3 DL GL - ((m-4)/2) GN + 2 L (m-1) c1 GL
//   ND  = 2 GLD - 4 DL GL + (2 m c2 L^2 + (m-2) c1) L GL
//   ND2 = (m-4) GN + (4 DL + (2-3m) c1 L + 2 m c2 L^3) GL
// For a genuine conformal factor CL vanishes identically, and expanding
// grad_bar(L CL) = 0 gives ND = SDL and ND2 = -SDL at every point.
template <typename T>
PointResiduals<T> evaluate_point(const ConformalInstance& inst, std::span<const Rational> x,
                                 const EvalOptions& opts = {});

template <typename T>
Residual<T> residual_CL(const ConformalInstance& inst, std::span<const Rational> x, const EvalOptions& opts = {});
template <typename T>
Residual<T> residual_SDL(const ConformalInstance& inst, std::span<const Rational> x, const EvalOptions& opts = {});
template <typename T>
Residual<T> residual_ND(const ConformalInstance& inst, std::span<const Rational> x, const EvalOptions& opts = {});
template <typename T>
Residual<T> residual_ND2(const ConformalInstance& inst, std::span<const Rational> x, const EvalOptions& opts = {});

template <typename T>
bool harmonicity_flag(const ConformalInstance& inst, std::span<const Rational> x, const EvalOptions& opts = {});

// lhs == factor * rhs componentwise, exactly.
bool proportional(std::span<const Rational> lhs, std::span<const Rational> rhs, const Rational& factor);

// (-1)^k [2 4 ... (2k)] [(m-2)(m-4)...(m-2k)]: Delta^k of (x_i - a_i)/|x - a|^2
// equals this times (x_i - a_i)/|x - a|^(2(k+1)).
Rational closed_form_coefficient(int m, int k);

// Delta^j phi at x for j = 0..k_max, flat domain and target only. phi is
// linear in u_j = (x_j - a_j)/|x - a|^2, so one degree-2k_max jet per
// coordinate serves every order. scale[j] sums the absolute values of the
// terms that make up row j; float mode measures zeros against it.
template <typename T>
struct PolyharmonicProfile {
    std::vector<std::vector<T>> values;  // values[j][i] = Delta^j phi_i (x)
    std::vector<double> scale;
};

template <typename T>
PolyharmonicProfile<T> polyharmonic_profile(const MobiusMap& map, int k_max, std::span<const Rational> x);

template <typename T>
std::vector<T> polyharmonic_residual(const MobiusMap& map, int k, std::span<const Rational> x);

// As above, rejecting (ModelError) instances whose domain or target is curved.
template <typename T>
std::vector<T> polyharmonic_residual(const ConformalInstance& inst, int k, std::span<const Rational> x);

// k A coeff(m, k) (x - a) / |x - a|^(2(k+1)) for epsilon = 2; zero for
// epsilon = 0 and k >= 1.
RationalVector polyharmonic_closed_form(const MobiusMap& map, int k, std::span<const Rational> x);

// Coefficients p_0..p_d of the polynomial of degree <= max_degree through
// (nodes[i], values[i]). Nodes beyond the first max_degree + 1 must lie on
// it, otherwise DegreeUnderestimateError.
RationalVector interpolate_checked(std::span<const Rational> nodes, std::span<const Rational> values, int max_degree);

// Cleared radial numerator of ND2 along x = t u at s = |x|^2:
//   P(s) = M(x) <ND2(x), u> / (t |u|^2)
// with M = F^5 sigma^3 / (4 c^2) for curved targets (F = s_sign c^2 + |x|^2,
// requires d = 0) and M = f^5 sigma^3 / k^2 for a flat target with
// epsilon = 2 (f = |x|^2, requires a = 0). P is a polynomial in s. Works from
// the closed-form factor, so target admissibility is not required.
Rational radial_nd2_numerator(const ConformalInstance& inst, std::span<const Rational> u, const Rational& t);

// Exact coefficients in s of the cleared numerator along direction u, from
// max_degree + 1 + extra radial samples.
RationalVector radial_coefficients(const ConformalInstance& inst, std::span<const Rational> u, int max_degree,
                                   int extra = 2);

// Same, for an arbitrary evaluator s -> value sampled at the given nodes.
RationalVector radial_coefficients(const std::function<Rational(const Rational&)>& evaluator,
                                   std::span<const Rational> nodes, int max_degree);

}  // namespace biconf
