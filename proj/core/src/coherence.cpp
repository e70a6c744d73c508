#include "siht/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "siht/error.hpp"

namespace siht {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unit-norm copies of the columns, stored contiguously per column.
std::vector<ComplexVector> unit_columns(const ComplexMatrix& a)
{
    std::vector<ComplexVector> cols(a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        cols[j] = a.column(j);
        const double nj = norm2(cols[j]);
        if (nj < 1e-300) fail(ErrorCode::ZeroColumn, "column " + std::to_string(j));
        for (auto& z : cols[j]) z /= nj;
    }
    return cols;
}

double pair_coherence(const ComplexVector& x, const ComplexVector& y)
{
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return std::hypot(re, im);
}

double max_over_pairs(std::span<const std::size_t> s, std::span<const std::size_t> s2,
                      auto&& value)
{
    double best = 0.0;
    for (const auto i : s) {
        for (const auto j : s2) {
            if (i != j) best = std::max(best, value(i, j));
        }
    }
    return best;
}

void check_sets(std::span<const std::size_t> s, std::span<const std::size_t> s2, std::size_t n)
{
    if (s.empty() || s2.empty()) fail(ErrorCode::EmptySet, "restricted coherence needs nonempty sets");
    for (const auto i : s) {
        if (i >= n) fail(ErrorCode::IndexOutOfRange, "index " + std::to_string(i));
    }
    for (const auto i : s2) {
        if (i >= n) fail(ErrorCode::IndexOutOfRange, "index " + std::to_string(i));
    }
    if (s.size() == 1 && s2.size() == 1 && s[0] == s2[0]) {
        fail(ErrorCode::SingletonSelf, "no distinct pair in a singleton set");
    }
}

// C(t, s) * a^s * b^(t-s), with 0^0 = 1.
double weighted_binomial(std::size_t t, std::size_t s, double a, double b)
{
    if (t <= 60) return binomial(t, s) * std::pow(a, static_cast<double>(s)) *
                        std::pow(b, static_cast<double>(t - s));
    if ((a == 0.0 && s > 0) || (b == 0.0 && t > s)) return 0.0;
    double lg = std::lgamma(static_cast<double>(t) + 1.0) - std::lgamma(static_cast<double>(s) + 1.0) -
                std::lgamma(static_cast<double>(t - s) + 1.0);
    if (s > 0) lg += static_cast<double>(s) * std::log(a);
    if (t > s) lg += static_cast<double>(t - s) * std::log(b);
    return std::exp(lg);
}

} // namespace

CoherenceTable::CoherenceTable(const ComplexMatrix& a)
    : n_(a.cols()), values_(a.cols() * a.cols(), 0.0)
{
    const auto cols = unit_columns(a);
    for (std::size_t i = 0; i < n_; ++i) {
        values_[i * n_ + i] = 1.0;
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double v = pair_coherence(cols[i], cols[j]);
            values_[i * n_ + j] = v;
            values_[j * n_ + i] = v;
        }
    }
}

double CoherenceTable::restricted(std::span<const std::size_t> s,
                                  std::span<const std::size_t> s2) const
{
    check_sets(s, s2, n_);
    return max_over_pairs(s, s2, [&](std::size_t i, std::size_t j) { return (*this)(i, j); });
}

double CoherenceTable::mutual() const
{
    if (n_ < 2) fail(ErrorCode::DimensionMismatch, "coherence needs at least two columns");
    double best = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) best = std::max(best, values_[i * n_ + j]);
    }
    return best;
}

double mutual_coherence(const ComplexMatrix& a)
{
    if (a.cols() < 2) fail(ErrorCode::DimensionMismatch, "coherence needs at least two columns");
    const auto cols = unit_columns(a);
    double best = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        for (std::size_t j = i + 1; j < cols.size(); ++j) {
            best = std::max(best, pair_coherence(cols[i], cols[j]));
        }
    }
    return best;
}

double restricted_coherence(const ComplexMatrix& a, std::span<const std::size_t> s,
                            std::span<const std::size_t> s2)
{
    check_sets(s, s2, a.cols());
    std::vector<std::size_t> used(s.begin(), s.end());
    used.insert(used.end(), s2.begin(), s2.end());
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());

    std::vector<ComplexVector> cols(a.cols());
    for (const auto j : used) {
        cols[j] = a.column(j);
        const double nj = norm2(cols[j]);
        if (nj < 1e-300) fail(ErrorCode::ZeroColumn, "column " + std::to_string(j));
        for (auto& z : cols[j]) z /= nj;
    }
    return max_over_pairs(s, s2,
                          [&](std::size_t i, std::size_t j) { return pair_coherence(cols[i], cols[j]); });
}

double sinc_coherence_estimate(double omega_r, double h)
{
    const double x = omega_r * h;
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double grid_sinc_estimate(double omega_r, double angular_step)
{
    return sinc_coherence_estimate(omega_r, 2.0 * std::sin(angular_step / 2.0));
}

double CoherenceReport::aggregate_rate() const noexcept
{
    const double l = static_cast<double>(set_count());
    return rho + (l > 0.0 ? l - 1.0 : 0.0) * rho_tilde;
}

CoherenceReport coherence_report(const ComplexMatrix& a, const SparsityStructure& ss)
{
    if (ss.ambient_length() != a.cols()) {
        fail(ErrorCode::DimensionMismatch, "structure length vs A cols");
    }
    return coherence_report(CoherenceTable(a), ss);
}

CoherenceReport coherence_report(const CoherenceTable& table, const SparsityStructure& ss)
{
    const std::size_t l = ss.size();
    CoherenceReport r;
    r.mu = table.mutual();
    r.mu_within.assign(l, 0.0);
    r.mu_between.assign(l, std::vector<double>(l, 0.0));
    for (std::size_t n = 0; n < l; ++n) {
        const auto& sn = ss.set(n);
        if (sn.empty()) fail(ErrorCode::EmptySet, "set " + std::to_string(n));
        r.mu_within[n] = sn.size() >= 2 ? table.restricted(sn, sn) : 0.0;
        r.mu_between[n][n] = r.mu_within[n];
        for (std::size_t m = n + 1; m < l; ++m) {
            const double v = table.restricted(sn, ss.set(m));
            r.mu_between[n][m] = v;
            r.mu_between[m][n] = v;
        }
    }
    for (std::size_t n = 0; n < l; ++n) {
        const double kn = 3.0 * static_cast<double>(ss.budget(n));
        r.rho = std::max(r.rho, kn * r.mu_within[n]);
        for (std::size_t m = 0; m < l; ++m) {
            if (m != n) r.rho_tilde = std::max(r.rho_tilde, kn * r.mu_between[n][m]);
        }
    }
    for (std::size_t m = 0; m < l; ++m) {
        double col = 0.0;
        for (std::size_t n = 0; n < l; ++n) {
            col += 3.0 * static_cast<double>(ss.budget(n)) * r.mu_between[n][m];
        }
        r.column_rate = std::max(r.column_rate, col);
    }
    return r;
}

double binomial(std::size_t t, std::size_t s)
{
    if (s > t) return 0.0;
    if (t <= 60) {
        s = std::min(s, t - s);
        std::uint64_t c = 1; // C(60, 30) * 60 still fits
        for (std::size_t i = 1; i <= s; ++i) c = c * (t - s + i) / i;
        return static_cast<double>(c);
    }
    return std::exp(std::lgamma(static_cast<double>(t) + 1.0) - std::lgamma(static_cast<double>(s) + 1.0) -
                    std::lgamma(static_cast<double>(t - s) + 1.0));
}

BoundCurve iht_error_bound(double mu, std::size_t k, double initial_l1, double noise_term,
                          std::size_t t_max)
{
    BoundCurve c;
    c.rate = 3.0 * mu * static_cast<double>(k);
    c.converges = c.rate < 1.0;
    c.noise_floor = c.converges ? 3.0 * static_cast<double>(k) / (1.0 - c.rate) * noise_term : kInf;
    const double floor = c.converges ? c.noise_floor : 0.0;
    c.values.resize(t_max + 1);
    for (std::size_t t = 0; t <= t_max; ++t) {
        c.values[t] = std::pow(c.rate, static_cast<double>(t)) * initial_l1 + floor;
    }
    return c;
}

BoundCurve set_error_bound(const CoherenceReport& report, const SparsityStructure& ss,
                          std::span<const double> initial_set_l1,
                          std::span<const double> noise_inf_per_set, double noise_inf_global,
                          std::size_t n, std::size_t t_max)
{
    const std::size_t l = ss.size();
    if (report.set_count() != l || initial_set_l1.size() != l || noise_inf_per_set.size() != l) {
        fail(ErrorCode::DimensionMismatch, "per-set inputs must have one entry per set");
    }
    if (n >= l) fail(ErrorCode::IndexOutOfRange, "set index");
    const double rho = report.rho;
    const double rt = report.rho_tilde;
    if (!(rho < 1.0)) fail(ErrorCode::RhoNotContractive, "rho = " + std::to_string(rho));

    const double kn = static_cast<double>(ss.budget(n));
    const double own_rate = 3.0 * report.mu_within[n] * kn;

    BoundCurve c;
    c.rate = own_rate;
    c.converges = true;
    const double lead_floor = 3.0 * kn / (1.0 - own_rate) * noise_inf_per_set[n];

    // Walk sums normalized by (L-1)^s so they stay O(1) for long horizons; the
    // (L-1)^s factor is folded into the scalar coefficients.
    const double lm1 = static_cast<double>(l) - 1.0;
    std::vector<double> e_hat(t_max + 1, 0.0), k_hat(t_max + 1, 0.0);
    if (l > 1) {
        std::vector<double> e(initial_set_l1.begin(), initial_set_l1.end());
        std::vector<double> kw(l);
        for (std::size_t m = 0; m < l; ++m) kw[m] = 3.0 * static_cast<double>(ss.budget(m));
        for (std::size_t s = 1; s <= t_max; ++s) {
            e = walk_sum<double>(e, 1);
            kw = walk_sum<double>(kw, 1);
            for (auto& v : e) v /= lm1;
            for (auto& v : kw) v /= lm1;
            e_hat[s] = e[n];
            k_hat[s] = kw[n];
        }
    }

    const double scaled_rt = rt * lm1;
    // ratio = rho_tilde (L-1) / (1 - rho) for the noise walk terms.
    const double noise_ratio = scaled_rt / (1.0 - rho);
    double noise_tail = 0.0;
    c.values.resize(t_max + 1);
    for (std::size_t t = 0; t <= t_max; ++t) {
        double v = std::pow(own_rate, static_cast<double>(t)) * initial_set_l1[n] + lead_floor;
        if (l > 1 && rt > 0.0) {
            for (std::size_t s = 1; s <= t; ++s) v += weighted_binomial(t, s, scaled_rt, rho) * e_hat[s];
            if (t >= 1) {
                noise_tail += std::pow(noise_ratio, static_cast<double>(t)) / (1.0 - rho) * k_hat[t];
            }
            v += noise_tail * noise_inf_global;
        }
        c.values[t] = v;
    }
    c.noise_floor = kInf;
    if (l == 1 || rt == 0.0) {
        c.noise_floor = lead_floor;
    } else if (noise_ratio < 1.0) {
        c.noise_floor = lead_floor + noise_tail * noise_inf_global;
    }
    return c;
}

BoundCurve structured_error_bound(const CoherenceReport& report, std::size_t set_count, std::size_t k,
                            double initial_l1, double noise_inf_global, std::size_t t_max,
                            RateForm form)
{
    BoundCurve c;
    c.rate = form == RateForm::Aggregate
                 ? report.rho + (set_count > 0 ? static_cast<double>(set_count) - 1.0 : 0.0) * report.rho_tilde
                 : report.column_rate;
    c.converges = c.rate < 1.0;
    c.noise_floor =
        c.converges ? 3.0 * static_cast<double>(k) * noise_inf_global / (1.0 - c.rate) : kInf;
    const double floor = c.converges ? c.noise_floor : 0.0;
    c.values.resize(t_max + 1);
    for (std::size_t t = 0; t <= t_max; ++t) {
        c.values[t] = std::pow(c.rate, static_cast<double>(t)) * initial_l1 + floor;
    }
    return c;
}

} // namespace siht
