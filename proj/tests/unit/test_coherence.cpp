#include <doctest.h>

#include <cmath>
#include <numbers>

#include "siht/coherence.hpp"
#include "siht/error.hpp"
#include "siht/isp_model.hpp"
#include "unit/oracles.hpp"

using namespace siht;

namespace {

double brute_mu(const ComplexMatrix& a, const IndexSet& s, const IndexSet& s2)
{
    double best = 0.0;
    for (auto i : s) {
        for (auto j : s2) {
            if (i == j) continue;
            cplx ip = 0.0;
            double ni = 0.0, nj = 0.0;
            for (std::size_t r = 0; r < a.rows(); ++r) {
                ip += std::conj(a(r, i)) * a(r, j);
                ni += std::norm(a(r, i));
                nj += std::norm(a(r, j));
            }
            best = std::max(best, std::abs(ip) / std::sqrt(ni * nj));
        }
    }
    return best;
}

IndexSet range(std::size_t first, std::size_t last)
{
    IndexSet s;
    for (std::size_t j = first; j <= last; ++j) s.push_back(j);
    return s;
}

} // namespace

TEST_SUITE("coherence")
{
    TEST_CASE("identity has zero coherence, duplicate columns have one")
    {
        CHECK(mutual_coherence(ComplexMatrix::identity(4)) == 0.0);
        // row-major: columns (1,0), (0,1), (1,0)
        ComplexMatrix d(2, 3, {cplx{1.0}, cplx{0.0}, cplx{1.0}, cplx{0.0}, cplx{1.0}, cplx{0.0}});
        CHECK(mutual_coherence(d) == doctest::Approx(1.0));
        // Scaling a column does not change anything.
        ComplexMatrix e(2, 2, {cplx{2.0}, cplx{1.0}, cplx{0.0}, cplx{1.0}});
        CHECK(mutual_coherence(e) == doctest::Approx(1.0 / std::sqrt(2.0)));
    }

    TEST_CASE("mutual coherence matches brute force and bounds restricted values")
    {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto a = oracle::random_matrix(6, 14, seed);
            const IndexSet all = range(0, 13);
            const double mu = mutual_coherence(a);
            CHECK(mu == doctest::Approx(brute_mu(a, all, all)).epsilon(1e-12));
            const IndexSet s{0, 3, 5}, s2{5, 9, 13};
            const double r = restricted_coherence(a, s, s2);
            CHECK(r == doctest::Approx(brute_mu(a, s, s2)).epsilon(1e-12));
            CHECK(r <= mu + 1e-15);
            CHECK(restricted_coherence(a, s, s2) == doctest::Approx(restricted_coherence(a, s2, s)));
            CHECK(mu <= 1.0 + 1e-12);
        }
    }

    TEST_CASE("restricted coherence errors")
    {
        const auto a = oracle::random_matrix(4, 6, 1);
        const IndexSet empty, one{2};
        try {
            restricted_coherence(a, empty, one);
            FAIL("expected EmptySet");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptySet);
        }
        try {
            restricted_coherence(a, one, one);
            FAIL("expected SingletonSelf");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SingletonSelf);
        }
        ComplexMatrix z(2, 2, {cplx{1.0}, cplx{0.0}, cplx{0.0}, cplx{0.0}});
        CHECK_THROWS_AS(mutual_coherence(z), Error);
    }

    TEST_CASE("sinc estimate")
    {
        CHECK(sinc_coherence_estimate(275.0, 0.0) == 1.0);
        CHECK(sinc_coherence_estimate(1.0, std::numbers::pi) == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(std::abs(sinc_coherence_estimate(10.0, 1e-10) - 1.0) < 1e-15);
        // Neighbouring directions of a 200-point equatorial grid at omega_r = 275.
        CHECK(grid_sinc_estimate(275.0, 2.0 * std::numbers::pi / 200.0) == doctest::Approx(0.081879).epsilon(1e-5));
    }

    TEST_CASE("plain IHT bound examples")
    {
        const auto c = iht_error_bound(0.1, 2, 1.0, 0.0, 3);
        CHECK(c.converges);
        CHECK(c.rate == doctest::Approx(0.6));
        CHECK(c.values[0] == doctest::Approx(1.0));
        CHECK(c.values[1] == doctest::Approx(0.6));
        CHECK(c.values[3] == doctest::Approx(0.216));
        CHECK(c.noise_floor == 0.0);

        const auto n = iht_error_bound(0.1, 2, 1.0, 0.5, 2);
        CHECK(n.noise_floor == doctest::Approx(6.0 / 0.4 * 0.5));

        const auto d = iht_error_bound(0.2, 2, 1.0, 0.0, 3);
        CHECK_FALSE(d.converges);
        CHECK(std::isinf(d.noise_floor));
        CHECK(d.values[3] > d.values[0]);
    }

    TEST_CASE("column rate arithmetic with the reported toy coherences")
    {
        // mu_S1 = mu_S1S2 = 0.081884, mu_S2 = 0.019788 with budgets (2, 1):
        // column 1 sums 3*2*0.081884 + 3*1*0.081884, column 2 sums 3*2*0.081884 + 3*1*0.019788.
        const double a = 0.081884, b = 0.019788;
        const double col1 = 6.0 * a + 3.0 * a;
        const double col2 = 6.0 * a + 3.0 * b;
        CHECK(col2 == doctest::Approx(0.550668).epsilon(1e-9));
        CHECK(col1 > col2);
    }

    TEST_CASE("coherence report on the toy scene")
    {
        const auto det = fibonacci_sphere_detectors(100, 275.0);
        const auto a = sensing_matrix(det, grid_1d(200));
        const SparsityStructure ss({range(97, 111), range(158, 170)}, {2, 1}, 200);
        const auto r = coherence_report(a, ss);
        CHECK(r.set_count() == 2);
        CHECK(r.mu_within[0] == doctest::Approx(brute_mu(a, ss.set(0), ss.set(0))).epsilon(1e-12));
        CHECK(r.mu_between[0][1] == doctest::Approx(brute_mu(a, ss.set(0), ss.set(1))).epsilon(1e-12));
        CHECK(r.mu_between[0][1] == r.mu_between[1][0]);
        CHECK(r.rho == doctest::Approx(std::max(6.0 * r.mu_within[0], 3.0 * r.mu_within[1])));
        CHECK(r.rho_tilde == doctest::Approx(std::max(6.0, 3.0) * r.mu_between[0][1]));
        CHECK(r.column_rate <= r.aggregate_rate() + 1e-15);
        CHECK(r.mu >= r.mu_within[0]);
    }

    TEST_CASE("single set collapses to the plain IHT bound")
    {
        const auto a = normalize_columns(oracle::random_matrix(400, 20, 4));
        const auto ss = SparsityStructure::full_cover(20, 1);
        const auto r = coherence_report(a, ss);
        CHECK(r.rho == doctest::Approx(3.0 * r.mu));
        CHECK(r.rho_tilde == 0.0);
        CHECK(r.column_rate == doctest::Approx(3.0 * r.mu));
        const std::vector<double> e0{2.0}, noise{0.01};
        if (r.rho < 1.0) {
            const auto t2 = set_error_bound(r, ss, e0, noise, 0.01, 0, 10);
            const auto t1 = iht_error_bound(r.mu, 1, 2.0, 0.01, 10);
            for (std::size_t t = 0; t <= 10; ++t) CHECK(t2.values[t] == doctest::Approx(t1.values[t]));
            const auto c1 = structured_error_bound(r, 1, 1, 2.0, 0.01, 10);
            for (std::size_t t = 0; t <= 10; ++t) CHECK(c1.values[t] == doctest::Approx(t1.values[t]));
        }
    }

    TEST_CASE("equal coherences make both structured rates agree")
    {
        CoherenceReport r;
        r.mu = 0.01;
        r.mu_within = {0.01, 0.01, 0.01};
        r.mu_between.assign(3, std::vector<double>(3, 0.01));
        r.rho = r.rho_tilde = 0.03;
        r.column_rate = 0.09;
        const auto agg = structured_error_bound(r, 3, 3, 1.0, 0.0, 5, RateForm::Aggregate);
        const auto col = structured_error_bound(r, 3, 3, 1.0, 0.0, 5, RateForm::ColumnSum);
        CHECK(agg.rate == doctest::Approx(3.0 * 0.01 * 3.0));
        CHECK(col.rate == doctest::Approx(agg.rate));
    }

    TEST_CASE("walk sums match the nested-sum oracle")
    {
        const std::vector<double> w{0.3, 1.2, 0.7, 2.0};
        for (std::size_t s = 0; s <= 5; ++s) {
            const auto got = walk_sum<double>(w, s);
            for (std::size_t n = 0; n < w.size(); ++n) {
                CHECK(got[n] == doctest::Approx(oracle::nested_walk_sum(w, n, s)).epsilon(1e-12));
            }
        }
        // Counting identity: with unit weights J^s 1 = (L-1)^s 1.
        const std::vector<double> ones(5, 1.0);
        CHECK(walk_sum<double>(ones, 4)[2] == doctest::Approx(256.0));
        // Two sets: walks alternate, so the sum picks the other entry on odd s.
        const std::vector<double> two{3.0, 5.0};
        CHECK(walk_sum<double>(two, 3)[0] == 5.0);
        CHECK(walk_sum<double>(two, 4)[0] == 3.0);
    }

    TEST_CASE("per-set bound matches a literal evaluation")
    {
        const auto a = normalize_columns(oracle::random_matrix(200, 30, 12));
        const SparsityStructure ss({range(0, 9), range(10, 19), range(20, 29)}, {1, 1, 1}, 30);
        const auto r = coherence_report(a, ss);
        REQUIRE(r.rho < 1.0);
        const std::vector<double> e0{1.0, 0.5, 2.0}, noise{0.01, 0.02, 0.03};
        const double g = 0.04;
        const std::vector<double> kw{3.0, 3.0, 3.0};
        for (std::size_t n = 0; n < 3; ++n) {
            const auto c = set_error_bound(r, ss, e0, noise, g, n, 6);
            const double own = 3.0 * r.mu_within[n];
            for (std::size_t t = 0; t <= 6; ++t) {
                double v = std::pow(own, double(t)) * e0[n] + 3.0 / (1.0 - own) * noise[n];
                double tail = 0.0;
                for (std::size_t s = 1; s <= t; ++s) {
                    v += binomial(t, s) * std::pow(r.rho, double(t - s)) * std::pow(r.rho_tilde, double(s)) *
                         oracle::nested_walk_sum(e0, n, s);
                    tail += std::pow(r.rho_tilde / (1.0 - r.rho), double(s)) / (1.0 - r.rho) *
                            oracle::nested_walk_sum(kw, n, s);
                }
                v += tail * g;
                CHECK(c.values[t] == doctest::Approx(v).epsilon(1e-10));
            }
        }
    }

    TEST_CASE("per-set bound rejects non-contractive structures")
    {
        CoherenceReport r;
        r.mu_within = {0.5, 0.5};
        r.mu_between.assign(2, std::vector<double>(2, 0.5));
        r.rho = 1.5;
        const auto ss = SparsityStructure::uniform_split(4, 2).with_budgets({1, 1});
        const std::vector<double> e0{1.0, 1.0}, noise{0.0, 0.0};
        try {
            set_error_bound(r, ss, e0, noise, 0.0, 0, 3);
            FAIL("expected RhoNotContractive");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::RhoNotContractive);
        }
    }

    TEST_CASE("binomial")
    {
        CHECK(binomial(5, 2) == 10.0);
        CHECK(binomial(3, 5) == 0.0);
        CHECK(binomial(60, 30) == 118264581564861424.0);
        CHECK(binomial(100, 3) == doctest::Approx(161700.0).epsilon(1e-10));
    }
}
