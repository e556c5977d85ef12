#include "biconf/multi_index.hpp"

#include <array>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace biconf {

namespace {

constexpr int kBinomialRows = 64;  // C(63, 31) still fits in 64 bits

const std::array<std::array<std::uint64_t, kBinomialRows>, kBinomialRows>& binomial_table() {
    static const auto table = [] {
        std::array<std::array<std::uint64_t, kBinomialRows>, kBinomialRows> t{};
        for (int n = 0; n < kBinomialRows; ++n) {
            t[n][0] = 1;
            for (int k = 1; k <= n; ++k) {
                t[n][k] = t[n - 1][k - 1] + (k < n ? t[n - 1][k] : 0);
            }
        }
        return t;
    }();
    return table;
}

void enumerate_degree(int dim, int remaining, int axis, std::vector<Exponent>& current, std::vector<Exponent>& out) {
    if (axis == dim - 1) {
        current[static_cast<std::size_t>(axis)] = static_cast<Exponent>(remaining);
        out.insert(out.end(), current.begin(), current.end());
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        current[static_cast<std::size_t>(axis)] = static_cast<Exponent>(e);
        enumerate_degree(dim, remaining - e, axis + 1, current, out);
    }
}

}  // namespace

std::uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) {
        return 0;
    }
    if (n >= kBinomialRows) {
        throw std::out_of_range("binomial: argument too large");
    }
    return binomial_table()[n][k];
}

std::size_t monomial_count(int dim, int degree) {
    return static_cast<std::size_t>(binomial(dim + degree, degree));
}

JetLayout::JetLayout(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 1) {
        throw std::invalid_argument("jet dimension must be >= 1");
    }
    if (degree < 0 || degree > 255) {
        throw std::invalid_argument("jet degree out of range");
    }
    const std::size_t n = monomial_count(dim, degree);
    exponents_.reserve(n * static_cast<std::size_t>(dim));
    total_degree_.reserve(n);
    degree_begin_.reserve(static_cast<std::size_t>(degree) + 2);
    std::vector<Exponent> current(static_cast<std::size_t>(dim), 0);
    for (int d = 0; d <= degree; ++d) {
        degree_begin_.push_back(total_degree_.size());
        const std::size_t before = exponents_.size();
        enumerate_degree(dim, d, 0, current, exponents_);
        const std::size_t added = (exponents_.size() - before) / static_cast<std::size_t>(dim);
        total_degree_.insert(total_degree_.end(), added, d);
    }
    degree_begin_.push_back(total_degree_.size());
}

std::size_t JetLayout::rank(std::span<const Exponent> beta) const {
    int d = 0;
    for (Exponent e : beta) {
        d += e;
    }
    // Monomials of total degree < d.
    std::size_t r = d == 0 ? 0 : static_cast<std::size_t>(binomial(dim_ + d - 1, dim_));
    int remaining = d;
    for (int i = 0; i + 1 < dim_; ++i) {
        const int bi = beta[static_cast<std::size_t>(i)];
        if (remaining > bi) {
            const int tail = dim_ - 1 - i;
            r += static_cast<std::size_t>(binomial(remaining - bi - 1 + tail, tail));
        }
        remaining -= bi;
    }
    return r;
}

std::shared_ptr<const JetLayout> JetLayout::get(int dim, int degree) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{dim, degree}];
    if (!slot) {
        slot = std::make_shared<const JetLayout>(dim, degree);
    }
    return slot;
}

}  // namespace biconf
