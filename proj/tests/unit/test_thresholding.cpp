#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "siht/error.hpp"
#include "siht/thresholding.hpp"
#include "unit/oracles.hpp"

using namespace siht;

namespace {

ComplexVector real_vec(std::initializer_list<double> v)
{
    ComplexVector out;
    for (double x : v) out.emplace_back(x, 0.0);
    return out;
}

bool same(const ComplexVector& a, const ComplexVector& b)
{
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// Random disjoint sets over 0..n-1 (not necessarily covering), with budgets.
SparsityStructure random_structure(std::size_t n, std::size_t parts, std::uint64_t seed)
{
    CounterRng rng(seed);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<IndexSet> sets(parts);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = rng.below(parts + 1); // bucket `parts` means uncovered
        if (p < parts) sets[p].push_back(perm[i]);
    }
    for (std::size_t p = 0; p < parts; ++p) {
        if (sets[p].empty()) sets[p].push_back(perm[p]);
    }
    // Deduplicate after the fallback above.
    std::vector<char> used(n, 0);
    for (auto& s : sets) {
        IndexSet t;
        for (auto j : s) {
            if (!used[j]) {
                used[j] = 1;
                t.push_back(j);
            }
        }
        s = t;
    }
    sets.erase(std::remove_if(sets.begin(), sets.end(), [](const IndexSet& s) { return s.empty(); }),
               sets.end());
    std::vector<std::size_t> budgets;
    for (const auto& s : sets) budgets.push_back(rng.below(s.size() + 1));
    return SparsityStructure(sets, budgets, n);
}

} // namespace

TEST_SUITE("thresholding")
{
    TEST_CASE("hard_threshold examples")
    {
        CHECK(same(hard_threshold(real_vec({3, -5, 1, 0}), 2), real_vec({3, -5, 0, 0})));
        CHECK(same(hard_threshold(real_vec({3, -5, 1, 0}), 0), real_vec({0, 0, 0, 0})));
        CHECK(same(hard_threshold(real_vec({2, -2}), 1), real_vec({2, 0})));
        try {
            hard_threshold(real_vec({1, 2}), 3);
            FAIL("expected BudgetTooLarge");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BudgetTooLarge);
        }
    }

    TEST_CASE("hard_threshold compares complex modulus")
    {
        const ComplexVector v{cplx{0.0, 3.0}, cplx{2.5, 0.0}, cplx{-1.0, -1.0}};
        const auto h = hard_threshold(v, 1);
        CHECK(h[0] == v[0]);
        CHECK(h[1] == cplx{});
    }

    TEST_CASE("hard_threshold is a projection")
    {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto v = oracle::random_vector(15, seed);
            const auto once = hard_threshold(v, 4);
            CHECK(same(hard_threshold(once, 4), once));
        }
    }

    TEST_CASE("hard_threshold keeps the energy-maximizing subset (exhaustive oracle)")
    {
        for (std::uint64_t seed = 1; seed <= 30; ++seed) {
            const std::size_t n = 6 + seed % 7; // 6..12
            const std::size_t k = 1 + seed % 4;
            const auto v = oracle::random_vector(n, seed * 31);
            double best = -1.0;
            oracle::for_each_subset(n, k, [&](const std::vector<std::size_t>& idx) {
                double e = 0.0;
                for (auto j : idx) e += std::norm(v[j]);
                best = std::max(best, e);
            });
            double got = 0.0;
            for (const auto& x : hard_threshold(v, k)) got += std::norm(x);
            CHECK(got == doctest::Approx(best).epsilon(1e-14));
        }
    }

    TEST_CASE("local_threshold examples")
    {
        const auto v = real_vec({5, 1, 2});
        const IndexSet s{1, 2};
        CHECK(same(local_threshold(v, s, 1), real_vec({5, 0, 2})));
        CHECK(same(local_threshold(v, s, 2), v));
        const IndexSet all{0, 1, 2};
        CHECK(same(local_threshold(v, all, 2), hard_threshold(v, 2)));
        const IndexSet bad{1, 3};
        try {
            local_threshold(v, bad, 1);
            FAIL("expected IndexOutOfRange");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::IndexOutOfRange);
        }
    }

    TEST_CASE("structure validation")
    {
        CHECK_THROWS_AS(SparsityStructure({{0, 1}, {1, 2}}, {1, 1}, 3), Error);
        CHECK_THROWS_AS(SparsityStructure({{0, 5}}, {1}, 3), Error);
        try {
            SparsityStructure({{0, 1}}, {3}, 3);
            FAIL("expected BudgetTooLarge");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BudgetTooLarge);
        }
        const SparsityStructure ss({{2, 0}, {4}}, {1, 1}, 6);
        CHECK(ss.set(0) == IndexSet{0, 2});
        CHECK(ss.total_budget() == 2);
        CHECK(ss.uncovered() == IndexSet{1, 3, 5});

        const auto split = SparsityStructure::uniform_split(10, 5);
        CHECK(split.size() == 5);
        CHECK(split.set(4) == IndexSet{8, 9});
        const auto x = real_vec({0, 1, 0, 0, 2, 3, 0, 0, 0, 0});
        CHECK(split.with_budgets_from(x).budgets() == std::vector<std::size_t>{1, 0, 2, 0, 0});
        CHECK(split.with_budgets_from(x).inflated(2).budgets() == std::vector<std::size_t>{2, 2, 2, 2, 2});
    }

    TEST_CASE("structured_threshold example")
    {
        const auto v = real_vec({1, 3, 2, 0.5, 0.4});
        const SparsityStructure ss({{0, 1, 2}, {3, 4}}, {1, 1}, 5);
        CHECK(same(structured_threshold(v, ss, false), real_vec({0, 3, 0, 0.5, 0})));
    }

    TEST_CASE("single full set reduces to hard_threshold")
    {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto v = oracle::random_vector(12, seed);
            const auto ss = SparsityStructure::full_cover(12, 3);
            CHECK(same(structured_threshold(v, ss, true), hard_threshold(v, 3)));
        }
    }

    TEST_CASE("zero_outside controls uncovered entries")
    {
        const auto v = real_vec({1, 2, 3, 4});
        const SparsityStructure ss({{0, 1}}, {1}, 4);
        CHECK(same(structured_threshold(v, ss, false), real_vec({0, 2, 3, 4})));
        CHECK(same(structured_threshold(v, ss, true), real_vec({0, 2, 0, 0})));
    }

    TEST_CASE("order invariance over all set orders and literal composition")
    {
        for (std::uint64_t seed = 1; seed <= 40; ++seed) {
            const std::size_t parts = 1 + seed % 4;
            const auto ss = random_structure(14, parts, seed);
            const auto v = oracle::random_vector(14, seed + 1000);
            const auto ref = structured_threshold(v, ss, false);
            std::vector<std::size_t> order(ss.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            do {
                CHECK(same(structured_threshold_ordered(v, ss, order, false), ref));
                // Literal composition H^(o_L) ... H^(o_1) v.
                ComplexVector w = v;
                for (auto j : order) w = local_threshold(w, ss.set(j), ss.budget(j));
                CHECK(same(w, ref));
            } while (std::next_permutation(order.begin(), order.end()));
        }
    }

    TEST_CASE("per-set nonzero count is min(k_j, in-set nonzeros)")
    {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto ss = random_structure(16, 3, seed);
            auto v = oracle::random_vector(16, seed + 7);
            for (std::size_t j = 0; j < v.size(); j += 3) v[j] = 0.0;
            const auto out = structured_threshold(v, ss, true);
            for (std::size_t s = 0; s < ss.size(); ++s) {
                std::size_t nz_in = 0, nz_out = 0;
                for (auto j : ss.set(s)) {
                    nz_in += v[j] != cplx{};
                    nz_out += out[j] != cplx{};
                }
                CHECK(nz_out == std::min(ss.budget(s), nz_in));
            }
        }
    }

    TEST_CASE("support lists nonzeros")
    {
        CHECK(support(real_vec({0, 1, 0, -2})) == IndexSet{1, 3});
    }
}
