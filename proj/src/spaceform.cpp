#include "biconf/spaceform.hpp"

#include <stdexcept>
#include <string>

namespace biconf {

std::string_view chart_name(Chart chart) {
    switch (chart) {
    case Chart::flat:
        return "flat";
    case Chart::sphere:
        return "sphere";
    case Chart::hyperbolic:
        return "hyperbolic";
    }
    return "?";
}

Chart parse_chart(std::string_view name) {
    if (name == "flat") {
        return Chart::flat;
    }
    if (name == "sphere") {
        return Chart::sphere;
    }
    if (name == "hyperbolic") {
        return Chart::hyperbolic;
    }
    throw std::invalid_argument("unknown space form model '" + std::string(name) + "'");
}

SpaceFormModel::SpaceFormModel(Chart chart, int dim) : chart_(chart), dim_(dim) {
    if (dim < 2) {
        throw std::invalid_argument("space form dimension must be >= 2");
    }
}

int SpaceFormModel::curvature() const {
    switch (chart_) {
    case Chart::flat:
        return 0;
    case Chart::sphere:
        return 1;
    case Chart::hyperbolic:
        return -1;
    }
    return 0;
}

Rational scal(const SpaceFormModel& model) {
    return Rational(model.dim() * (model.dim() - 1) * model.curvature());
}

Rational ricci_factor(const SpaceFormModel& model) {
    return Rational((model.dim() - 1) * model.curvature());
}

template <typename T>
bool in_domain(const SpaceFormModel& model, std::span<const T> x) {
    if (model.chart() != Chart::hyperbolic) {
        return true;
    }
    T norm_sq(0);
    for (const auto& v : x) {
        norm_sq += v * v;
    }
    return norm_sq < T(1);
}

template <typename T>
Jet<T> chart_factor_of_norm_sq(const SpaceFormModel& model, const Jet<T>& norm_sq) {
    if (model.chart() == Chart::flat) {
        return norm_sq.constant_like(T(1));
    }
    const T c(model.curvature());
    return T(2) / (T(1) + c * norm_sq);
}

template <typename T>
Jet<T> inverse_chart_factor_of_norm_sq(const SpaceFormModel& model, const Jet<T>& norm_sq) {
    if (model.chart() == Chart::flat) {
        return norm_sq.constant_like(T(1));
    }
    const T c(model.curvature());
    return (T(1) + c * norm_sq) * scalar_from<T>(Rational(1, 2));
}

template <typename T>
void require_chart_point(const SpaceFormModel& model, std::span<const Jet<T>> x) {
    if (static_cast<int>(x.size()) != model.dim()) {
        throw ShapeError("chart point has wrong dimension");
    }
    if (model.chart() != Chart::hyperbolic) {
        return;
    }
    T norm_sq(0);
    for (const auto& xi : x) {
        norm_sq += xi.value() * xi.value();
    }
    if (norm_sq == T(1)) {
        throw SingularityError("hyperbolic chart factor is singular on |x| = 1");
    }
    if (norm_sq > T(1)) {
        throw InadmissiblePointError("point lies outside the Poincare ball");
    }
}

template <typename T>
Jet<T> sigma_jet(const SpaceFormModel& model, std::span<const Jet<T>> x) {
    require_chart_point(model, x);
    return chart_factor_of_norm_sq(model, squared_norm(x));
}

template <typename T>
ChartCalculus<T>::ChartCalculus(const SpaceFormModel& model, std::span<const Jet<T>> x)
    : model_(model),
      inv_sigma_((require_chart_point(model, x), inverse_chart_factor_of_norm_sq(model, squared_norm(x)))),
      inv_sigma_sq_(inv_sigma_ * inv_sigma_) {
    if (inv_sigma_.degree() >= 1) {
        grad_inv_sigma_ = gradient(inv_sigma_);
    }
}

template <typename T>
Jet<T> ChartCalculus<T>::laplace_beltrami(const Jet<T>& f) const {
    Jet<T> out = inv_sigma_sq_ * laplacian(f);
    if (model_.chart() == Chart::flat) {
        return out;
    }
    Jet<T> cross = grad_inv_sigma_[0] * partial(f, 0);
    for (int i = 1; i < f.dim(); ++i) {
        cross += grad_inv_sigma_[static_cast<std::size_t>(i)] * partial(f, i);
    }
    out -= T(model_.dim() - 2) * (inv_sigma_ * cross);
    return out;
}

template <typename T>
std::vector<Jet<T>> ChartCalculus<T>::grad_bar(const Jet<T>& f) const {
    std::vector<Jet<T>> g = gradient(f);
    if (model_.chart() != Chart::flat) {
        for (auto& gi : g) {
            gi = inv_sigma_sq_ * gi;
        }
    }
    return g;
}

template <typename T>
Jet<T> ChartCalculus<T>::grad_norm_sq_bar(const Jet<T>& f) const {
    const std::vector<Jet<T>> g = gradient(f);
    Jet<T> sum = squared_norm<T>(g);
    if (model_.chart() != Chart::flat) {
        sum = inv_sigma_sq_ * sum;
    }
    return sum;
}

#define BICONF_INSTANTIATE(T)                                                                        \
    template bool in_domain<T>(const SpaceFormModel&, std::span<const T>);                           \
    template Jet<T> chart_factor_of_norm_sq<T>(const SpaceFormModel&, const Jet<T>&);                \
    template Jet<T> inverse_chart_factor_of_norm_sq<T>(const SpaceFormModel&, const Jet<T>&);        \
    template void require_chart_point<T>(const SpaceFormModel&, std::span<const Jet<T>>);            \
    template Jet<T> sigma_jet<T>(const SpaceFormModel&, std::span<const Jet<T>>);                    \
    template class ChartCalculus<T>;

BICONF_INSTANTIATE(Rational)
BICONF_INSTANTIATE(double)

#undef BICONF_INSTANTIATE

}  // namespace biconf
