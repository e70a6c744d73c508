#include "siht/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <iostream>
#include <numeric>
#include <thread>

#include "siht/error.hpp"

namespace siht {

namespace {

// plain product; std::complex operator* takes a slow NaN-recovery path
inline cplx mul(cplx a, cplx b)
{
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

ComplexVector parallel_structured_threshold(std::span<const cplx> z, const SparsityStructure& ss,
                                            bool zero_outside)
{
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(ss.size(), std::thread::hardware_concurrency()));
    std::vector<ComplexVector> partial(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                std::vector<std::size_t> order;
                for (std::size_t j = w; j < ss.size(); j += workers) order.push_back(j);
                partial[w] = structured_threshold_ordered(z, ss, order, false);
            });
        }
    }
    ComplexVector out(z.begin(), z.end());
    for (std::size_t w = 0; w < workers; ++w) {
        for (std::size_t j = w; j < ss.size(); j += workers) {
            for (const auto i : ss.set(j)) out[i] = partial[w][i];
        }
    }
    if (zero_outside) {
        for (const auto i : ss.uncovered()) out[i] = cplx{};
    }
    return out;
}

void check_inputs(std::size_t rows, std::size_t cols, std::span<const cplx> b,
                  std::optional<std::span<const cplx>> truth, const SolveConfig& cfg)
{
    cfg.validate();
    if (b.size() != rows) fail(ErrorCode::DimensionMismatch, "b length vs A rows");
    if (truth && truth->size() != cols) fail(ErrorCode::DimensionMismatch, "truth length vs A cols");
}

void warn_if_unnormalized(const ComplexMatrix& a)
{
    if (!a.normalized()) {
        std::clog << "siht: warning: solving with a matrix that is not column-normalized\n";
    }
}

// Shared fixed-point loop. `step(x)` returns the unthresholded z, `threshold(z)`
// projects it, `residual(x)` returns ||b - Ax||.
template <class Step, class Threshold, class Residual>
SolveResult run_iteration(std::size_t n, double b_norm, const SolveConfig& cfg,
                          std::optional<std::span<const cplx>> truth, Step&& step,
                          Threshold&& threshold, Residual&& residual)
{
    SolveResult res;
    res.x.assign(n, cplx{});
    auto& tr = res.trace;
    const double scale = b_norm > 0.0 ? 1.0 / b_norm : 1.0;
    ComplexVector best;
    double best_rel = std::numeric_limits<double>::infinity();

    for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
        ComplexVector next = threshold(step(res.x));
        const double rel = residual(next) * scale;
        if (!std::isfinite(rel) || (cfg.divergence_factor > 0.0 && rel > cfg.divergence_factor * best_rel)) {
            // Keep the last finite iterate (or the best one when tracking).
            if (cfg.divergence_factor > 0.0 && !best.empty()) res.x = std::move(best);
            tr.stop_reason = StopReason::Diverged;
            return res;
        }
        if (cfg.divergence_factor > 0.0 && rel < best_rel) {
            best_rel = rel;
            best = next;
        }
        const double moved = norm2(subtract(next, res.x));
        res.x = std::move(next);

        tr.iterations_run = t;
        tr.residual_history.push_back(rel);
        if (truth) tr.l1_error_history.push_back(norm1(subtract(res.x, *truth)));
        if (cfg.record_trace) tr.iterates.push_back(res.x);

        if (rel < cfg.residual_tol) {
            tr.stop_reason = StopReason::ResidualTol;
            return res;
        }
        if (moved < cfg.stagnation_tol) {
            tr.stop_reason = StopReason::Stagnation;
            return res;
        }
    }
    tr.stop_reason = StopReason::MaxIters;
    return res;
}

template <class Threshold>
SolveResult solve_direct(const ComplexMatrix& a, std::span<const cplx> b, const SolveConfig& cfg,
                         std::optional<std::span<const cplx>> truth, Threshold&& threshold)
{
    check_inputs(a.rows(), a.cols(), b, truth, cfg);
    warn_if_unnormalized(a);
    return run_iteration(
        a.cols(), norm2(b), cfg, truth,
        [&](const ComplexVector& x) { return residual_map(a, x, b); }, threshold,
        [&](const ComplexVector& x) { return norm2(subtract(b, siht::apply(a, x))); });
}

template <class Threshold>
SolveResult solve_gram(const GramMatrix& g, std::span<const cplx> b, const SolveConfig& cfg,
                       std::optional<std::span<const cplx>> truth, Threshold&& threshold)
{
    const auto& a = g.matrix();
    check_inputs(a.rows(), a.cols(), b, truth, cfg);
    warn_if_unnormalized(a);
    const ComplexVector atb = apply_adjoint(a, b);
    const std::size_t n = a.cols();
    return run_iteration(
        n, norm2(b), cfg, truth,
        [&](const ComplexVector& x) {
            ComplexVector z(n);
            for (std::size_t i = 0; i < n; ++i) z[i] = x[i] + atb[i];
            for (std::size_t j = 0; j < n; ++j) {
                if (x[j] == cplx{}) continue;
                const auto col = g.column(j);
                const cplx xj = x[j];
                for (std::size_t i = 0; i < n; ++i) z[i] -= mul(col[i], xj);
            }
            return z;
        },
        threshold, [&](const ComplexVector& x) { return norm2(subtract(b, siht::apply(a, x))); });
}

std::size_t checked_budget(std::size_t k, std::size_t n)
{
    if (k > n) fail(ErrorCode::BudgetTooLarge, "k exceeds the number of columns");
    return k;
}

auto structured_projector(const SparsityStructure& ss, std::size_t n, const SolveConfig& cfg)
{
    if (ss.ambient_length() != n) fail(ErrorCode::DimensionMismatch, "structure length vs A cols");
    return [&ss, &cfg](const ComplexVector& z) {
        return cfg.parallel_sets ? parallel_structured_threshold(z, ss, cfg.zero_outside)
                                 : structured_threshold(z, ss, cfg.zero_outside);
    };
}

} // namespace

void SolveConfig::validate() const
{
    if (max_iters < 1) fail(ErrorCode::ConfigError, "max_iters must be at least 1");
    if (!(residual_tol >= 0.0) || !(stagnation_tol >= 0.0) || !(divergence_factor >= 0.0)) {
        fail(ErrorCode::ConfigError, "tolerances must be nonnegative");
    }
}

std::string_view to_string(StopReason reason) noexcept
{
    switch (reason) {
    case StopReason::MaxIters: return "max_iters";
    case StopReason::ResidualTol: return "residual_tol";
    case StopReason::Stagnation: return "stagnation";
    case StopReason::Diverged: return "diverged";
    }
    return "unknown";
}

SolveResult iht_solve(const ComplexMatrix& a, std::span<const cplx> b, std::size_t k,
                      const SolveConfig& cfg, std::optional<std::span<const cplx>> truth)
{
    checked_budget(k, a.cols());
    return solve_direct(a, b, cfg, truth, [k](const ComplexVector& z) { return hard_threshold(z, k); });
}

SolveResult structured_iht_solve(const ComplexMatrix& a, std::span<const cplx> b,
                                 const SparsityStructure& ss, const SolveConfig& cfg,
                                 std::optional<std::span<const cplx>> truth)
{
    return solve_direct(a, b, cfg, truth, structured_projector(ss, a.cols(), cfg));
}

SolveResult iht_solve(const GramMatrix& gram, std::span<const cplx> b, std::size_t k,
                      const SolveConfig& cfg, std::optional<std::span<const cplx>> truth)
{
    checked_budget(k, gram.size());
    return solve_gram(gram, b, cfg, truth, [k](const ComplexVector& z) { return hard_threshold(z, k); });
}

SolveResult structured_iht_solve(const GramMatrix& gram, std::span<const cplx> b,
                                 const SparsityStructure& ss, const SolveConfig& cfg,
                                 std::optional<std::span<const cplx>> truth)
{
    return solve_gram(gram, b, cfg, truth, structured_projector(ss, gram.size(), cfg));
}

} // namespace siht
