#include "siht/thresholding.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "siht/error.hpp"

namespace siht {

namespace {

// Writes into `out` (same length as v) the top-k of v over `idx`, zeroing the
// other positions listed in idx. Ordering: larger modulus first, then lower index.
void threshold_positions(std::span<const cplx> v, std::vector<std::size_t> idx, std::size_t k,
                         ComplexVector& out)
{
    if (k > idx.size()) {
        fail(ErrorCode::BudgetTooLarge,
             "budget " + std::to_string(k) + " exceeds " + std::to_string(idx.size()) + " entries");
    }
    const auto before = [&](std::size_t a, std::size_t b) {
        const double na = std::norm(v[a]);
        const double nb = std::norm(v[b]);
        return na != nb ? na > nb : a < b;
    };
    if (k < idx.size()) {
        std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), before);
        for (std::size_t p = k; p < idx.size(); ++p) out[idx[p]] = cplx{};
    }
    for (std::size_t p = 0; p < k; ++p) out[idx[p]] = v[idx[p]];
}

} // namespace

SparsityStructure::SparsityStructure(std::vector<IndexSet> sets, std::vector<std::size_t> budgets,
                                     std::size_t ambient_length)
    : sets_(std::move(sets)), budgets_(std::move(budgets)), ambient_(ambient_length)
{
    if (sets_.size() != budgets_.size()) {
        fail(ErrorCode::InvalidStructure, "one budget per set required");
    }
    std::vector<char> seen(ambient_, 0);
    for (std::size_t j = 0; j < sets_.size(); ++j) {
        auto& s = sets_[j];
        std::sort(s.begin(), s.end());
        for (const auto i : s) {
            if (i >= ambient_) {
                fail(ErrorCode::IndexOutOfRange,
                     "index " + std::to_string(i) + " in set " + std::to_string(j));
            }
            if (seen[i]) {
                fail(ErrorCode::InvalidStructure, "index " + std::to_string(i) + " in two sets");
            }
            seen[i] = 1;
        }
        if (budgets_[j] > s.size()) {
            fail(ErrorCode::BudgetTooLarge, "budget of set " + std::to_string(j) + " exceeds its size");
        }
    }
}

SparsityStructure SparsityStructure::full_cover(std::size_t n, std::size_t k)
{
    IndexSet all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return SparsityStructure({std::move(all)}, {k}, n);
}

SparsityStructure SparsityStructure::uniform_split(std::size_t n, std::size_t parts)
{
    if (parts == 0 || n % parts != 0) {
        fail(ErrorCode::InvalidStructure, "length must be divisible by the number of parts");
    }
    const std::size_t width = n / parts;
    std::vector<IndexSet> sets(parts);
    for (std::size_t j = 0; j < parts; ++j) {
        sets[j].resize(width);
        std::iota(sets[j].begin(), sets[j].end(), j * width);
    }
    return SparsityStructure(std::move(sets), std::vector<std::size_t>(parts, 0), n);
}

std::size_t SparsityStructure::total_budget() const noexcept
{
    return std::accumulate(budgets_.begin(), budgets_.end(), std::size_t{0});
}

SparsityStructure SparsityStructure::with_budgets(std::vector<std::size_t> budgets) const
{
    return SparsityStructure(sets_, std::move(budgets), ambient_);
}

SparsityStructure SparsityStructure::with_budgets_from(std::span<const cplx> x) const
{
    if (x.size() != ambient_) fail(ErrorCode::DimensionMismatch, "vector length vs structure");
    std::vector<std::size_t> k(sets_.size(), 0);
    for (std::size_t j = 0; j < sets_.size(); ++j) {
        for (const auto i : sets_[j]) k[j] += x[i] != cplx{} ? 1 : 0;
    }
    return with_budgets(std::move(k));
}

SparsityStructure SparsityStructure::inflated(std::size_t extra) const
{
    auto k = budgets_;
    for (std::size_t j = 0; j < k.size(); ++j) k[j] = std::min(k[j] + extra, sets_[j].size());
    return with_budgets(std::move(k));
}

IndexSet SparsityStructure::uncovered() const
{
    std::vector<char> seen(ambient_, 0);
    for (const auto& s : sets_) {
        for (const auto i : s) seen[i] = 1;
    }
    IndexSet out;
    for (std::size_t i = 0; i < ambient_; ++i) {
        if (!seen[i]) out.push_back(i);
    }
    return out;
}

ComplexVector hard_threshold(std::span<const cplx> v, std::size_t k)
{
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    ComplexVector out(v.size());
    threshold_positions(v, std::move(idx), k, out);
    return out;
}

ComplexVector local_threshold(std::span<const cplx> v, std::span<const std::size_t> set,
                              std::size_t k)
{
    for (const auto i : set) {
        if (i >= v.size()) fail(ErrorCode::IndexOutOfRange, "index " + std::to_string(i));
    }
    ComplexVector out(v.begin(), v.end());
    threshold_positions(v, std::vector<std::size_t>(set.begin(), set.end()), k, out);
    return out;
}

ComplexVector structured_threshold_ordered(std::span<const cplx> v, const SparsityStructure& ss,
                                           std::span<const std::size_t> order, bool zero_outside)
{
    if (v.size() != ss.ambient_length()) {
        fail(ErrorCode::DimensionMismatch, "vector length vs structure");
    }
    ComplexVector out(v.begin(), v.end());
    // The sets are disjoint, so each local threshold reads only its own
    // entries of v; composing in place is the same as composing the operators.
    for (const auto j : order) {
        const auto& s = ss.set(j);
        threshold_positions(v, std::vector<std::size_t>(s.begin(), s.end()), ss.budget(j), out);
    }
    if (zero_outside) {
        for (const auto i : ss.uncovered()) out[i] = cplx{};
    }
    return out;
}

ComplexVector structured_threshold(std::span<const cplx> v, const SparsityStructure& ss,
                                   bool zero_outside)
{
    std::vector<std::size_t> order(ss.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    return structured_threshold_ordered(v, ss, order, zero_outside);
}

IndexSet support(std::span<const cplx> v)
{
    IndexSet out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != cplx{}) out.push_back(i);
    }
    return out;
}

} // namespace siht
