#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "siht/numerics.hpp"
#include "siht/thresholding.hpp"

namespace siht {

/// Table of |<A_i, A_j>| / (||A_i|| ||A_j||) for every column pair.
class CoherenceTable {
public:
    explicit CoherenceTable(const ComplexMatrix& a);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

    /// Max over i in s, j in s2, i != j.
    double restricted(std::span<const std::size_t> s, std::span<const std::size_t> s2) const;
    double mutual() const;

private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

/// max_{i != j} |<A_i, A_j>| / (||A_i|| ||A_j||). Needs N >= 2; ZeroColumn on a zero column.
double mutual_coherence(const ComplexMatrix& a);

/// Restricted coherence mu_{S,S'}. EmptySet if either set is empty;
/// SingletonSelf when S == S' has a single element.
double restricted_coherence(const ComplexMatrix& a, std::span<const std::size_t> s,
                            std::span<const std::size_t> s2);

/// sin(x)/x with x = omega_R * h; the far-field estimate of the coherence of
/// two plane-wave columns whose unit directions are a distance h apart.
double sinc_coherence_estimate(double omega_r, double h);

/// The same estimate for neighbours on a circle of directions with angular
/// step `angular_step`, i.e. h = 2 sin(angular_step / 2).
double grid_sinc_estimate(double omega_r, double angular_step);

struct CoherenceReport {
    double mu = 0.0;
    std::vector<double> mu_within;               // mu_{S_j}; 0 for singleton sets
    std::vector<std::vector<double>> mu_between; // L x L, diagonal = mu_within
    double rho = 0.0;                            // max_n 3 k_n mu_{S_n}
    double rho_tilde = 0.0;                      // max_{m != n} 3 k_n mu_{S_n,S_m}
    /// max_m sum_n G_nm with G_nm = 3 k_n mu_{S_n,S_m} (G_nn = 3 k_n mu_{S_n}):
    /// the l1-induced norm of the per-set error recursion. Never exceeds
    /// rho + (L-1) rho_tilde, and equals 3 k mu when all coherences coincide.
    double column_rate = 0.0;

    std::size_t set_count() const noexcept { return mu_within.size(); }
    double aggregate_rate() const noexcept;
};

CoherenceReport coherence_report(const ComplexMatrix& a, const SparsityStructure& ss);
CoherenceReport coherence_report(const CoherenceTable& table, const SparsityStructure& ss);

struct BoundCurve {
    std::vector<double> values; // indexed by t = 0..t_max
    double rate = 0.0;          // contraction factor of the geometric term
    bool converges = false;     // rate < 1
    double noise_floor = 0.0;   // t -> infinity additive term; +inf when not contracting
};

/// (3 mu k)^t e0 + 3k / (1 - 3 mu k) * ||A^* eps||_inf.
BoundCurve iht_error_bound(double mu, std::size_t k, double initial_l1, double noise_term,
                          std::size_t t_max);

/// Per-set bound for set n, including the cross-set walk terms E_s(n), K_s(n).
/// RhoNotContractive when rho >= 1.
BoundCurve set_error_bound(const CoherenceReport& report, const SparsityStructure& ss,
                          std::span<const double> initial_set_l1,
                          std::span<const double> noise_inf_per_set, double noise_inf_global,
                          std::size_t n, std::size_t t_max);

enum class RateForm {
    Aggregate, // rho + (L-1) rho_tilde
    ColumnSum, // CoherenceReport::column_rate
};

/// rate^t e0 + 3k ||A^* eps||_inf / (1 - rate).
BoundCurve structured_error_bound(const CoherenceReport& report, std::size_t set_count, std::size_t k,
                            double initial_l1, double noise_inf_global, std::size_t t_max,
                            RateForm form = RateForm::Aggregate);

/// J^s w where J is the L x L all-ones-minus-identity matrix; entry n is
/// sum_{m1 != n} sum_{m2 != m1} ... w_{m_s}.
template <class T>
std::vector<T> walk_sum(std::span<const T> weights, std::size_t s)
{
    std::vector<T> cur(weights.begin(), weights.end());
    for (std::size_t step = 0; step < s; ++step) {
        T total{};
        for (const auto& v : cur) total += v;
        for (auto& v : cur) v = total - v;
    }
    return cur;
}

/// Binomial coefficient; exact integer arithmetic for t <= 60, log-gamma above.
double binomial(std::size_t t, std::size_t s);

} // namespace siht
