#pragma once

#include <span>
#include <vector>

#include "biconf/jet.hpp"
#include "biconf/scalar.hpp"
#include "biconf/spaceform.hpp"

namespace biconf {

// Small dense square matrix over the rationals.
class RationalMatrix {
public:
    RationalMatrix() = default;
    explicit RationalMatrix(int n);

    static RationalMatrix identity(int n);

    int size() const { return n_; }
    Rational& operator()(int i, int j) { return data_[index(i, j)]; }
    const Rational& operator()(int i, int j) const { return data_[index(i, j)]; }

    RationalMatrix transpose() const;
    RationalVector apply(std::span<const Rational> v) const;
    RationalMatrix inverse() const;  // Gauss-Jordan; SingularityError if singular

    bool is_orthogonal() const;  // A^T A = I, exactly
    bool is_skew() const;        // S = -S^T

    bool operator==(const RationalMatrix&) const = default;

    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b);

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
    }

    int n_ = 0;
    std::vector<Rational> data_;
};

// Rational determinant by fraction-free elimination.
Rational determinant(const RationalMatrix& m);

// (I - S)^-1 (I + S): exactly orthogonal with determinant +1 for skew S.
RationalMatrix cayley_orthogonal(const RationalMatrix& skew);

// Row i has entry signs[i] in column perm[i] (0-based). Orthogonal with
// determinant +-1.
RationalMatrix signed_permutation(std::span<const int> perm, std::span<const int> signs);

// phi(x) = b + k A (x - a) / |x - a|^epsilon, epsilon in {0, 2}, A in O(m).
struct MobiusMap {
    RationalVector a;
    RationalVector b;
    Rational k;
    RationalMatrix A;
    int epsilon = 2;

    int dim() const { return static_cast<int>(a.size()); }
};

// Returns the map when A^T A = I exactly, k != 0, epsilon in {0, 2} and all
// shapes agree; throws ValidationError otherwise.
MobiusMap validate(const MobiusMap& map);

// The inversion x / |x|^2 in R^m.
MobiusMap inversion(int dim);
// The identity map (epsilon = 0, k = 1, a = b = 0, A = I).
MobiusMap identity_map(int dim);

template <typename T>
std::vector<T> apply_point(const MobiusMap& map, std::span<const T> x);

// Preimage of y; used by samplers that work from the target side.
RationalVector inverse_apply(const MobiusMap& map, std::span<const Rational> y);

template <typename T>
std::vector<Jet<T>> apply_jet(const MobiusMap& map, std::span<const Jet<T>> x);

// Flat-to-flat conformal factor k / |x - a|^2 (epsilon = 2) or k
// (epsilon = 0). The sign of k is kept.
template <typename T>
Jet<T> euclidean_factor(const MobiusMap& map, std::span<const Jet<T>> x);

// lambda = rho(phi(x)) lambda_E(x) / sigma(x), so that phi^* h = lambda^2 g_bar.
// |phi|^2 is expanded through A^T A = I, so the map must be validated.
// Throws SingularityError on x = a (epsilon = 2) or a chart boundary, and
// InadmissiblePointError if x or phi(x) leaves its chart or lambda(x0) <= 0.
template <typename T>
Jet<T> conformal_factor(const SpaceFormModel& domain, const SpaceFormModel& target, const MobiusMap& map,
                        std::span<const Jet<T>> x);

enum class DenominatorSign { plus, minus };

// Target-side data of the closed form lambda = 2c / (s c^2 + |x - d|^2)
// (before the domain chart factor), s = +1 for the sphere, -1 for the ball.
struct ReducedFactorParams {
    Rational c;
    RationalVector d;
    DenominatorSign sign = DenominatorSign::plus;
};

// Closed-form reduction for curved targets. epsilon = 2:
//   sphere      c = k / (1 + |b|^2),  d = a - k A^T b / (1 + |b|^2)
//   hyperbolic  c = k / (1 - |b|^2),  d = a + k A^T b / (1 - |b|^2)
// epsilon = 0 (completing the square in |b + k A (x - a)|^2):
//   sphere      c =  1 / k,  d = a - A^T b / k
//   hyperbolic  c = -1 / k,  d = a - A^T b / k
// Throws ModelError for a flat target and ValidationError for |b| = 1 with a
// hyperbolic target and epsilon = 2.
ReducedFactorParams reduced_parameters(const MobiusMap& map, const SpaceFormModel& target);

// lambda from the closed forms: (1/sigma) * {k/|x-a|^2, k, 2c/(s c^2 + |x-d|^2)}.
// Independent of conformal_factor's route through phi.
template <typename T>
Jet<T> closed_form_factor(const SpaceFormModel& domain, const SpaceFormModel& target, const MobiusMap& map,
                          std::span<const Jet<T>> x);

// rho(phi(x))^2 J^T J == lambda^2 sigma(x)^2 I exactly, with J from degree-1
// jets. This is phi^* h = lambda^2 g_bar at the point.
bool conformality_check(const SpaceFormModel& domain, const SpaceFormModel& target, const MobiusMap& map,
                        std::span<const Rational> x);

// Pointwise conformal factor, used by samplers for admissibility. Same
// errors as conformal_factor.
Rational conformal_factor_value(const SpaceFormModel& domain, const SpaceFormModel& target, const MobiusMap& map,
                                std::span<const Rational> x);

}  // namespace biconf
