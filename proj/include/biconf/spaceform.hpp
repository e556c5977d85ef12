#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "biconf/jet.hpp"
#include "biconf/scalar.hpp"

namespace biconf {

enum class Chart { flat, sphere, hyperbolic };

std::string_view chart_name(Chart chart);
Chart parse_chart(std::string_view name);

// A space form of unit curvature c in {-1, 0, +1} seen through a conformal
// chart (R^m, sigma^2 delta):
//   flat        sigma = 1
//   sphere      sigma = 2 / (1 + |x|^2)   stereographic chart of S^m minus N
//   hyperbolic  sigma = 2 / (1 - |x|^2)   Poincare ball, |x| < 1
class SpaceFormModel {
public:
    SpaceFormModel() : SpaceFormModel(Chart::flat, 2) {}
    SpaceFormModel(Chart chart, int dim);

    Chart chart() const { return chart_; }
    int dim() const { return dim_; }
    int curvature() const;
    std::string_view name() const { return chart_name(chart_); }

    bool operator==(const SpaceFormModel&) const = default;

private:
    Chart chart_;
    int dim_;
};

// m (m - 1) c
Rational scal(const SpaceFormModel& model);
// (m - 1) c, the factor in Ric = (m - 1) c g. This is the only way Ricci
// curvature enters the residuals.
Rational ricci_factor(const SpaceFormModel& model);

template <typename T>
bool in_domain(const SpaceFormModel& model, std::span<const T> x);

// sigma as a function of s = |y|^2, and its reciprocal (1 + c s) / 2, which
// is a polynomial. The flat model gives constant jets 1.
template <typename T>
Jet<T> chart_factor_of_norm_sq(const SpaceFormModel& model, const Jet<T>& norm_sq);
template <typename T>
Jet<T> inverse_chart_factor_of_norm_sq(const SpaceFormModel& model, const Jet<T>& norm_sq);

// Throws ShapeError on a dimension mismatch, SingularityError on |x| = 1 for
// the hyperbolic chart and InadmissiblePointError outside the ball.
template <typename T>
void require_chart_point(const SpaceFormModel& model, std::span<const Jet<T>> x);

// Jet of sigma at the base point of x. Throws SingularityError on |x| = 1
// for the hyperbolic chart and InadmissiblePointError outside the ball.
template <typename T>
Jet<T> sigma_jet(const SpaceFormModel& model, std::span<const Jet<T>> x);

// Curved operators of (R^m, sigma^2 delta) at one base point. All of them
// are written through tau = 1/sigma, which is polynomial for every chart:
//
//   lap_bar f   = sigma^-2 lap f + (m - 2) sigma^-3 <grad sigma, grad f>
//               = tau^2 lap f - (m - 2) tau <grad tau, grad f>
//   grad_bar f  = tau^2 grad f                (chart components)
//   |grad_bar f|^2 = g_bar(grad_bar f, grad_bar f) = tau^2 |grad f|^2
//
// Degrees: lap_bar drops two, the gradients drop one.
template <typename T>
class ChartCalculus {
public:
    ChartCalculus(const SpaceFormModel& model, std::span<const Jet<T>> x);

    const SpaceFormModel& model() const { return model_; }
    const Jet<T>& inv_sigma() const { return inv_sigma_; }
    const Jet<T>& inv_sigma_sq() const { return inv_sigma_sq_; }

    Jet<T> laplace_beltrami(const Jet<T>& f) const;
    std::vector<Jet<T>> grad_bar(const Jet<T>& f) const;
    Jet<T> grad_norm_sq_bar(const Jet<T>& f) const;

private:
    SpaceFormModel model_;
    Jet<T> inv_sigma_;
    Jet<T> inv_sigma_sq_;
    std::vector<Jet<T>> grad_inv_sigma_;
};

template <typename T>
Jet<T> laplace_beltrami(const Jet<T>& f, const SpaceFormModel& model, std::span<const Jet<T>> x) {
    return ChartCalculus<T>(model, x).laplace_beltrami(f);
}

template <typename T>
std::vector<Jet<T>> grad_bar(const Jet<T>& f, const SpaceFormModel& model, std::span<const Jet<T>> x) {
    return ChartCalculus<T>(model, x).grad_bar(f);
}

template <typename T>
Jet<T> grad_norm_sq_bar(const Jet<T>& f, const SpaceFormModel& model, std::span<const Jet<T>> x) {
    return ChartCalculus<T>(model, x).grad_norm_sq_bar(f);
}

template <typename T>
std::vector<Jet<T>> gradient(const Jet<T>& f) {
    std::vector<Jet<T>> g;
    g.reserve(static_cast<std::size_t>(f.dim()));
    for (int i = 0; i < f.dim(); ++i) {
        g.push_back(partial(f, i));
    }
    return g;
}

}  // namespace biconf
