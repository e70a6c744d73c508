#include <doctest.h>

#include "siht/error.hpp"
#include "siht/numerics.hpp"
#include "unit/oracles.hpp"

using namespace siht;

TEST_SUITE("numerics")
{
    TEST_CASE("matrix construction rejects bad shapes")
    {
        CHECK_THROWS_AS(ComplexMatrix(0, 3), Error);
        CHECK_THROWS_AS(ComplexMatrix(2, 2, std::vector<cplx>(3)), Error);
        const ComplexMatrix a(2, 3);
        CHECK(a.data().size() == 6);
        CHECK_FALSE(a.normalized());
    }

    TEST_CASE("normalize_columns")
    {
        const auto id = normalize_columns(ComplexMatrix::identity(2));
        CHECK(id.normalized());
        CHECK(id(0, 0) == cplx{1.0});
        CHECK(id(1, 0) == cplx{0.0});

        ComplexMatrix a(2, 1, {cplx{3.0}, cplx{4.0}});
        const auto n = normalize_columns(a);
        CHECK(n(0, 0).real() == doctest::Approx(0.6));
        CHECK(n(1, 0).real() == doctest::Approx(0.8));

        const auto r = normalize_columns(oracle::random_matrix(5, 7, 11));
        for (std::size_t j = 0; j < 7; ++j) CHECK(std::abs(r.column_norm(j) - 1.0) <= 1e-12);
        const auto rr = normalize_columns(r);
        for (std::size_t i = 0; i < r.data().size(); ++i) CHECK(std::abs(rr.data()[i] - r.data()[i]) <= 1e-15);

        ComplexMatrix z(2, 2, {cplx{1.0}, cplx{0.0}, cplx{1.0}, cplx{0.0}});
        z(0, 1) = 0.0;
        try {
            normalize_columns(z);
            FAIL("expected ZeroColumn");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ZeroColumn);
        }
    }

    TEST_CASE("mark_normalized verifies the columns")
    {
        ComplexMatrix a(2, 1, {cplx{3.0}, cplx{4.0}});
        CHECK_THROWS_AS(a.mark_normalized(), Error);
    }

    TEST_CASE("residual_map matches the triple-loop oracle")
    {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto a = oracle::random_matrix(3, 5, seed);
            const auto x = oracle::random_vector(5, seed + 100);
            const auto b = oracle::random_vector(3, seed + 200);
            const auto got = residual_map(a, x, b);
            const auto want = oracle::residual_map(a, x, b);
            for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(got[j] - want[j]) <= 1e-12);
        }
    }

    TEST_CASE("residual_map special cases")
    {
        const auto id = ComplexMatrix::identity(4);
        const auto x = oracle::random_vector(4, 3);
        const auto same = residual_map(id, x, x);
        for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(same[j] - x[j]) <= 1e-15);

        const auto a = oracle::random_matrix(3, 5, 9);
        const auto b = oracle::random_vector(3, 10);
        const auto back = residual_map(a, ComplexVector(5), b);
        const auto want = oracle::adjoint_matvec(a, b);
        for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(back[j] - want[j]) <= 1e-12);

        CHECK_THROWS_AS(residual_map(a, ComplexVector(4), b), Error);
    }

    TEST_CASE("adjoint consistency")
    {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto a = oracle::random_matrix(6, 9, seed);
            const auto x = oracle::random_vector(9, seed + 50);
            const auto y = oracle::random_vector(6, seed + 60);
            const cplx lhs = inner(siht::apply(a, x), y);
            const cplx rhs = inner(x, apply_adjoint(a, y));
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
        }
    }

    TEST_CASE("apply agrees with the dense product on sparse input")
    {
        const auto a = oracle::random_matrix(4, 8, 21);
        ComplexVector x(8);
        x[2] = cplx{1.5, -0.5};
        x[7] = cplx{-2.0, 0.25};
        const auto got = siht::apply(a, x);
        const auto want = oracle::matvec(a, x);
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-13);
    }

    TEST_CASE("vector norms")
    {
        const ComplexVector v{cplx{3.0, 4.0}, cplx{0.0, -1.0}};
        CHECK(norm1(v) == doctest::Approx(6.0));
        CHECK(norm2(v) == doctest::Approx(std::sqrt(26.0)));
        CHECK(norm_inf(v) == doctest::Approx(5.0));
        CHECK_THROWS_AS(subtract(v, ComplexVector(3)), Error);
    }

    TEST_CASE("tikhonov: square invertible system with lambda 0 solves exactly")
    {
        const auto a = oracle::random_matrix(5, 5, 4);
        const auto b = oracle::random_vector(5, 5);
        const auto x = tikhonov_least_squares(a, b, 0.0);
        CHECK(oracle::norm2(subtract(siht::apply(a, x), b)) <= 1e-10);
    }

    TEST_CASE("tikhonov matches a conjugate-gradient oracle")
    {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto a = oracle::random_matrix(4, 8, seed);
            const auto b = oracle::random_vector(4, seed + 7);
            const auto x = tikhonov_least_squares(a, b, 1e-3);
            const auto want = oracle::cg_tikhonov(a, b, 1e-3);
            for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(x[j] - want[j]) <= 1e-8);
        }
    }

    TEST_CASE("tikhonov output is stationary and shrinks with lambda")
    {
        const auto a = oracle::random_matrix(6, 10, 13);
        const auto b = oracle::random_vector(6, 14);
        const double lambda = 0.05;
        const auto x = tikhonov_least_squares(a, b, lambda);
        auto g = oracle::adjoint_matvec(a, oracle::matvec(a, x));
        const auto atb = oracle::adjoint_matvec(a, b);
        for (std::size_t j = 0; j < x.size(); ++j) g[j] += lambda * x[j] - atb[j];
        CHECK(norm_inf(g) <= 1e-9 * norm_inf(atb));

        double prev = std::numeric_limits<double>::infinity();
        for (double l : {1e-4, 1e-2, 1.0, 1e2, 1e4, 1e8}) {
            const double nrm = norm2(tikhonov_least_squares(a, b, l));
            CHECK(nrm <= prev);
            prev = nrm;
        }
        CHECK(prev < 1e-6);
    }

    TEST_CASE("tikhonov default lambda and singular detection")
    {
        const auto a = oracle::random_matrix(4, 8, 2);
        double fro = 0.0;
        for (const auto& v : a.data()) fro += std::norm(v);
        CHECK(default_tikhonov_lambda(a) == doctest::Approx(1e-3 * fro / 8.0));

        const auto b = oracle::random_vector(4, 3);
        try {
            tikhonov_least_squares(a, b, 0.0);
            FAIL("expected SingularSystem");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SingularSystem);
        }
        CHECK_NOTHROW(tikhonov_least_squares(a, b));
    }

    TEST_CASE("gram matrix equals A^*A")
    {
        const auto a = oracle::random_matrix(5, 6, 77);
        const GramMatrix g(a);
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
                cplx s = 0.0;
                for (std::size_t r = 0; r < 5; ++r) s += std::conj(a(r, i)) * a(r, j);
                CHECK(std::abs(g(i, j) - s) <= 1e-12);
            }
        }
    }
}
