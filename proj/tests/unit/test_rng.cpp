#include <doctest.h>

#include <cmath>
#include <vector>

#include "siht/rng.hpp"

using siht::CounterRng;

TEST_SUITE("rng")
{
    TEST_CASE("known values")
    {
        // SplitMix64 finalizer of 0 is 0; of 1 it is the published constant.
        CHECK(CounterRng::mix(0) == 0);
        CHECK(CounterRng::mix(1) == 0x5692161D100B05E5ULL);
        CounterRng r(42);
        CHECK(r.key() == CounterRng::mix(42));
        const auto v = r.next_u64();
        CHECK(v == CounterRng::mix(CounterRng::mix(42) + 0x9E3779B97F4A7C15ULL));
        CHECK(r.counter() == 1);
    }

    TEST_CASE("streams are reproducible and distinct")
    {
        CounterRng a(5), b(5), c(6);
        for (int i = 0; i < 10; ++i) {
            const auto x = a.next_u64();
            CHECK(x == b.next_u64());
            CHECK(x != c.next_u64());
        }
        const auto s1 = CounterRng(5).split(1), s1b = CounterRng(5).split(1), s2 = CounterRng(5).split(2);
        CHECK(s1.key() == s1b.key());
        CHECK(s1.key() != s2.key());
        // split does not depend on how much the parent has been consumed
        CounterRng used(5);
        used.next_u64();
        CHECK(used.split(1).key() == s1.key());
    }

    TEST_CASE("uniform, below and normal statistics")
    {
        CounterRng r(11);
        const int n = 200000;
        double su = 0.0, sn = 0.0, sn2 = 0.0;
        std::vector<int> hist(7, 0);
        for (int i = 0; i < n; ++i) {
            const double u = r.uniform();
            CHECK_UNARY(u >= 0.0);
            CHECK_UNARY(u < 1.0);
            su += u;
            ++hist[r.below(7)];
            const double z = r.normal();
            sn += z;
            sn2 += z * z;
        }
        CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
        CHECK(std::abs(sn / n) < 0.01);
        CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
        for (int h : hist) CHECK(std::abs(h - n / 7.0) < 5.0 * std::sqrt(n / 7.0));
        CHECK(r.normal(3.0, 0.0) == 3.0);
    }
}
