#include "siht/numerics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "siht/error.hpp"

namespace siht {

namespace {

// std::complex operator* goes through the NaN-recovery path of Annex G;
// inner loops use the plain formula.
inline cplx mul(cplx a, cplx b)
{
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline cplx mul_conj(cplx a, cplx b) // conj(a) * b
{
    return {a.real() * b.real() + a.imag() * b.imag(), a.real() * b.imag() - a.imag() * b.real()};
}

void require_same(std::size_t a, std::size_t b, const char* what)
{
    if (a != b) {
        fail(ErrorCode::DimensionMismatch,
             std::string(what) + " (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

} // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : ComplexMatrix(rows, cols, std::vector<cplx>(rows * cols))
{
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries))
{
    if (rows == 0 || cols == 0) {
        fail(ErrorCode::DimensionMismatch, "matrix needs at least one row and one column");
    }
    require_same(data_.size(), rows * cols, "entry count vs rows*cols");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n)
{
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    m.normalized_ = true;
    return m;
}

ComplexVector ComplexMatrix::column(std::size_t j) const
{
    ComplexVector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
}

double ComplexMatrix::column_norm(std::size_t j) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += std::norm((*this)(i, j));
    return std::sqrt(s);
}

void ComplexMatrix::mark_normalized()
{
    for (std::size_t j = 0; j < cols_; ++j) {
        if (std::abs(column_norm(j) - 1.0) > 1e-12) {
            fail(ErrorCode::InvalidStructure, "column " + std::to_string(j) + " is not unit norm");
        }
    }
    normalized_ = true;
}

ComplexMatrix ComplexMatrix::select_columns(std::span<const std::size_t> indices) const
{
    ComplexMatrix out(rows_, indices.size());
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t c = 0; c < indices.size(); ++c) {
            if (indices[c] >= cols_) fail(ErrorCode::IndexOutOfRange, "column index");
            out(i, c) = (*this)(i, indices[c]);
        }
    }
    out.normalized_ = normalized_;
    return out;
}

double norm2(std::span<const cplx> v)
{
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

double norm1(std::span<const cplx> v)
{
    double s = 0.0;
    for (const auto& z : v) s += std::abs(z);
    return s;
}

double norm_inf(std::span<const cplx> v)
{
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

cplx inner(std::span<const cplx> x, std::span<const cplx> y)
{
    require_same(x.size(), y.size(), "inner product lengths");
    cplx s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += mul_conj(x[i], y[i]);
    return s;
}

ComplexVector subtract(std::span<const cplx> a, std::span<const cplx> b)
{
    require_same(a.size(), b.size(), "subtract lengths");
    ComplexVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

ComplexVector apply(const ComplexMatrix& a, std::span<const cplx> x)
{
    require_same(a.cols(), x.size(), "A columns vs x length");
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] != cplx{}) nz.push_back(j);
    }
    ComplexVector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto row = a.row(i);
        cplx s = 0.0;
        for (const auto j : nz) s += mul(row[j], x[j]);
        out[i] = s;
    }
    return out;
}

ComplexVector apply_adjoint(const ComplexMatrix& a, std::span<const cplx> r)
{
    require_same(a.rows(), r.size(), "A rows vs r length");
    const std::size_t n = a.cols();
    std::vector<double> re(n, 0.0), im(n, 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto row = a.row(i);
        const double rr = r[i].real();
        const double ri = r[i].imag();
        for (std::size_t j = 0; j < n; ++j) {
            const double ar = row[j].real();
            const double ai = row[j].imag();
            re[j] += ar * rr + ai * ri;
            im[j] += ar * ri - ai * rr;
        }
    }
    ComplexVector out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = {re[j], im[j]};
    return out;
}

ComplexVector residual_map(const ComplexMatrix& a, std::span<const cplx> x,
                           std::span<const cplx> b)
{
    require_same(a.cols(), x.size(), "A columns vs x length");
    require_same(a.rows(), b.size(), "A rows vs b length");
    const auto ax = siht::apply(a, x);
    const auto r = subtract(b, ax);
    auto out = apply_adjoint(a, r);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += x[j];
    return out;
}

ComplexMatrix normalize_columns(const ComplexMatrix& a)
{
    std::vector<double> scale(a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        const double nj = a.column_norm(j);
        if (nj < 1e-300) fail(ErrorCode::ZeroColumn, "column " + std::to_string(j));
        scale[j] = 1.0 / nj;
    }
    std::vector<cplx> entries(a.data().begin(), a.data().end());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) entries[i * a.cols() + j] *= scale[j];
    }
    ComplexMatrix out(a.rows(), a.cols(), std::move(entries));
    out.mark_normalized();
    return out;
}

double default_tikhonov_lambda(const ComplexMatrix& a)
{
    double fro = 0.0;
    for (const auto& z : a.data()) fro += std::norm(z);
    return 1e-3 * fro / static_cast<double>(a.cols());
}

ComplexVector tikhonov_least_squares(const ComplexMatrix& a, std::span<const cplx> b,
                                     std::optional<double> lambda)
{
    require_same(a.rows(), b.size(), "A rows vs b length");
    const double lam = lambda.value_or(default_tikhonov_lambda(a));
    if (!(lam >= 0.0)) fail(ErrorCode::InvalidStructure, "lambda must be nonnegative");

    using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const Mat> am(a.data().data(), static_cast<Eigen::Index>(a.rows()),
                                   static_cast<Eigen::Index>(a.cols()));
    const Eigen::Map<const Eigen::VectorXcd> bm(b.data(), static_cast<Eigen::Index>(b.size()));

    Eigen::MatrixXcd normal = am.adjoint() * am;
    normal.diagonal().array() += lam;
    const Eigen::VectorXcd rhs = am.adjoint() * bm;

    const Eigen::LDLT<Eigen::MatrixXcd> ldlt(normal);
    if (ldlt.info() != Eigen::Success) fail(ErrorCode::SingularSystem, "LDLT factorization failed");
    if (lam == 0.0) {
        const double rcond = ldlt.rcond();
        if (!(rcond > 1e-14)) {
            fail(ErrorCode::SingularSystem, "normal equations condition estimate exceeds 1e14");
        }
    }
    const Eigen::VectorXcd sol = ldlt.solve(rhs);
    return ComplexVector(sol.data(), sol.data() + sol.size());
}

GramMatrix::GramMatrix(const ComplexMatrix& a)
    : a_(a), n_(a.cols()), data_(a.cols() * a.cols())
{
    // Lower triangle by row sweeps, then mirror.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto row = a.row(i);
        for (std::size_t j = 0; j < n_; ++j) {
            cplx* col = data_.data() + j * n_;
            const cplx cj = row[j];
            for (std::size_t l = j; l < n_; ++l) col[l] += mul_conj(row[l], cj);
        }
    }
    for (std::size_t j = 0; j < n_; ++j) {
        for (std::size_t l = j + 1; l < n_; ++l) data_[l * n_ + j] = std::conj(data_[j * n_ + l]);
    }
}

} // namespace siht
