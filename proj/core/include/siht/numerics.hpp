#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace siht {

using cplx = std::complex<double>;
using ComplexVector = std::vector<cplx>;

/// Dense M x N complex matrix, row-major.
///
/// The `normalized()` flag records that every column has unit Euclidean norm
/// (within 1e-12). It is only ever set after that has been checked.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool normalized() const noexcept { return normalized_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const cplx> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<const cplx> data() const noexcept { return data_; }

    ComplexVector column(std::size_t j) const;
    double column_norm(std::size_t j) const;

    /// Sets the normalized flag after verifying unit column norms.
    /// Throws InvalidStructure if any column is off by more than 1e-12.
    void mark_normalized();

    /// Columns `indices` (in that order) as a new matrix; carries the flag.
    ComplexMatrix select_columns(std::span<const std::size_t> indices) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
    bool normalized_ = false;
};

// Vector helpers. All throw DimensionMismatch on non-conforming lengths.
double norm2(std::span<const cplx> v);
double norm1(std::span<const cplx> v);
double norm_inf(std::span<const cplx> v);
/// <x, y> = sum conj(x_i) y_i
cplx inner(std::span<const cplx> x, std::span<const cplx> y);
ComplexVector subtract(std::span<const cplx> a, std::span<const cplx> b);

/// A x. Zero entries of x are skipped, so sparse x costs O(M * nnz).
ComplexVector apply(const ComplexMatrix& a, std::span<const cplx> x);
/// A^* r
ComplexVector apply_adjoint(const ComplexMatrix& a, std::span<const cplx> r);

/// x + A^*(b - A x), the unthresholded Richardson step.
ComplexVector residual_map(const ComplexMatrix& a, std::span<const cplx> x,
                           std::span<const cplx> b);

/// Scales every column to unit norm. Idempotent. ZeroColumn(j) on a column
/// with norm below 1e-300.
ComplexMatrix normalize_columns(const ComplexMatrix& a);

/// 1e-3 * ||A||_F^2 / N, used when the caller gives no lambda.
double default_tikhonov_lambda(const ComplexMatrix& a);

/// argmin ||Ax - b||^2 + lambda ||x||^2 through the normal equations
/// (A^*A + lambda I) x = A^*b, solved densely.
/// SingularSystem if lambda == 0 and the condition estimate exceeds 1e14.
ComplexVector tikhonov_least_squares(const ComplexMatrix& a, std::span<const cplx> b,
                                     std::optional<double> lambda = std::nullopt);

/// Precomputed A^*A (column-major, Hermitian) for repeated solves against
/// one matrix with many right-hand sides.
class GramMatrix {
public:
    explicit GramMatrix(const ComplexMatrix& a);

    std::size_t size() const noexcept { return n_; }
    const ComplexMatrix& matrix() const noexcept { return a_; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[j * n_ + i]; }
    std::span<const cplx> column(std::size_t j) const { return {data_.data() + j * n_, n_}; }

private:
    ComplexMatrix a_;
    std::size_t n_;
    std::vector<cplx> data_;
};

} // namespace siht
