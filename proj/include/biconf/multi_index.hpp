#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace biconf {

using Exponent = std::uint8_t;

// C(n, k) for the small arguments used by jet layouts.
std::uint64_t binomial(int n, int k);

// Number of monomials of total degree <= degree in dim variables: C(dim+degree, degree).
std::size_t monomial_count(int dim, int degree);

// Dense graded-lexicographic indexing of the multi-indices |beta| <= D in m
// variables. Within one total degree, larger leading exponents come first,
// so x1^d precedes x2^d. The ordering does not depend on D: the layout for
// degree D-1 is a prefix of the layout for degree D, which makes truncation
// a resize.
//
// Layouts are immutable and shared; get() returns a cached instance.
class JetLayout {
public:
    static std::shared_ptr<const JetLayout> get(int dim, int degree);

    JetLayout(int dim, int degree);

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    std::size_t size() const { return degree_begin_.back(); }

    // Index of the first multi-index of total degree d (d may be degree()+1).
    std::size_t degree_begin(int d) const { return degree_begin_[static_cast<std::size_t>(d)]; }
    // Number of multi-indices with total degree <= d.
    std::size_t size_up_to(int d) const { return degree_begin_[static_cast<std::size_t>(d) + 1]; }

    std::span<const Exponent> exponents(std::size_t index) const {
        return {exponents_.data() + index * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    int total_degree(std::size_t index) const { return total_degree_[index]; }

    // Position of beta in the ordering. beta must have dim() entries; its
    // total degree may exceed degree() (the index is then >= size()).
    std::size_t rank(std::span<const Exponent> beta) const;

    // Index of e_axis.
    std::size_t unit_index(int axis) const { return 1 + static_cast<std::size_t>(axis); }

private:
    int dim_;
    int degree_;
    std::vector<Exponent> exponents_;
    std::vector<int> total_degree_;
    std::vector<std::size_t> degree_begin_;
};

}  // namespace biconf
