#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "siht/numerics.hpp"
#include "siht/thresholding.hpp"

namespace siht {

struct SolveConfig {
    std::size_t max_iters = 1000;
    /// Stop when ||b - Ax|| / ||b|| < residual_tol.
    double residual_tol = 1e-12;
    /// Stop when ||x^(t+1) - x^(t)|| < stagnation_tol; 0 disables.
    double stagnation_tol = 0.0;
    bool zero_outside = true;
    bool record_trace = false;
    /// Run the per-set local thresholds on worker threads. Output is identical.
    bool parallel_sets = false;
    /// Stop once the relative residual exceeds divergence_factor times the
    /// smallest one seen so far and return that best iterate; 0 disables.
    /// Non-finite residuals always stop the loop.
    double divergence_factor = 0.0;

    void validate() const;
};

enum class StopReason { MaxIters, ResidualTol, Stagnation, Diverged };

std::string_view to_string(StopReason reason) noexcept;

struct SolveTrace {
    std::vector<ComplexVector> iterates;        // only with record_trace
    std::vector<double> residual_history;       // relative residual after each iteration
    std::vector<double> l1_error_history;       // ||x^(t) - x*||_1, only with a truth vector
    std::size_t iterations_run = 0;
    StopReason stop_reason = StopReason::MaxIters;
};

struct SolveResult {
    ComplexVector x;
    SolveTrace trace;
};

/// x^(t+1) = H_k(x^(t) + A^*(b - A x^(t))), starting from zero.
SolveResult iht_solve(const ComplexMatrix& a, std::span<const cplx> b, std::size_t k,
                      const SolveConfig& cfg = {},
                      std::optional<std::span<const cplx>> truth = std::nullopt);

/// Same iteration with the structured threshold over `ss`.
SolveResult structured_iht_solve(const ComplexMatrix& a, std::span<const cplx> b,
                                 const SparsityStructure& ss, const SolveConfig& cfg = {},
                                 std::optional<std::span<const cplx>> truth = std::nullopt);

/// Variants that form the Richardson step as x + A^*b - (A^*A)x with a cached
/// Gram matrix: O(N * nnz) per iteration instead of O(M * N). Use them when
/// many right-hand sides share one matrix.
SolveResult iht_solve(const GramMatrix& gram, std::span<const cplx> b, std::size_t k,
                      const SolveConfig& cfg = {},
                      std::optional<std::span<const cplx>> truth = std::nullopt);
SolveResult structured_iht_solve(const GramMatrix& gram, std::span<const cplx> b,
                                 const SparsityStructure& ss, const SolveConfig& cfg = {},
                                 std::optional<std::span<const cplx>> truth = std::nullopt);

} // namespace siht
