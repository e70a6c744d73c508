#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "siht/numerics.hpp"

namespace siht {

using IndexSet = std::vector<std::size_t>;

/// Disjoint index sets S_1..S_L over a length-N vector, each with a sparsity
/// budget k_j <= |S_j|. Construction validates and sorts every set.
class SparsityStructure {
public:
    SparsityStructure() = default;
    SparsityStructure(std::vector<IndexSet> sets, std::vector<std::size_t> budgets,
                      std::size_t ambient_length);

    /// One set covering 0..n-1 with budget k.
    static SparsityStructure full_cover(std::size_t n, std::size_t k);
    /// L contiguous blocks of size n/L (n divisible by L), budgets zero.
    static SparsityStructure uniform_split(std::size_t n, std::size_t parts);

    std::size_t size() const noexcept { return sets_.size(); }
    std::size_t ambient_length() const noexcept { return ambient_; }
    const std::vector<IndexSet>& sets() const noexcept { return sets_; }
    const IndexSet& set(std::size_t j) const { return sets_.at(j); }
    const std::vector<std::size_t>& budgets() const noexcept { return budgets_; }
    std::size_t budget(std::size_t j) const { return budgets_.at(j); }
    std::size_t total_budget() const noexcept;

    /// Copy with budgets replaced, e.g. read off a known sparse vector.
    SparsityStructure with_budgets(std::vector<std::size_t> budgets) const;
    /// Budgets equal to the number of nonzeros of `x` inside each set.
    SparsityStructure with_budgets_from(std::span<const cplx> x) const;
    /// Every budget raised by `extra`, capped at the set size.
    SparsityStructure inflated(std::size_t extra) const;

    /// Indices in none of the sets, ascending.
    IndexSet uncovered() const;

private:
    std::vector<IndexSet> sets_;
    std::vector<std::size_t> budgets_;
    std::size_t ambient_ = 0;
};

/// Keeps the k entries of largest modulus (ties: lowest index), zeroes the rest.
ComplexVector hard_threshold(std::span<const cplx> v, std::size_t k);

/// Hard threshold applied to v restricted to `set`; entries outside are untouched.
ComplexVector local_threshold(std::span<const cplx> v, std::span<const std::size_t> set,
                              std::size_t k);

/// Composition of the local thresholds of every set. With `zero_outside`,
/// entries covered by no set are also zeroed.
ComplexVector structured_threshold(std::span<const cplx> v, const SparsityStructure& ss,
                                   bool zero_outside);

/// Same as structured_threshold but applies the local thresholds in the
/// given set order. Result does not depend on the order.
ComplexVector structured_threshold_ordered(std::span<const cplx> v, const SparsityStructure& ss,
                                           std::span<const std::size_t> order, bool zero_outside);

/// Indices of the nonzero entries, ascending.
IndexSet support(std::span<const cplx> v);

} // namespace siht
