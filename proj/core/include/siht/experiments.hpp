#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "siht/config.hpp"
#include "siht/isp_model.hpp"
#include "siht/offgrid.hpp"
#include "siht/thresholding.hpp"

namespace siht {

struct ToyBoundsCase {
    double omega_r = 0.0;
    double mu = 0.0;
    std::vector<double> mu_within;
    double mu_between = 0.0;       // max over distinct set pairs
    double iht_rate = 0.0;         // 3 mu k
    double condition_value = 0.0;  // column-sum form of rho + (L-1) rho_tilde
    double aggregate_rate = 0.0;   // rho + (L-1) rho_tilde taken literally
    double sinc_estimate = 0.0;    // for neighbouring grid directions
    bool iht_bound_converges = false;
    bool siht_bound_converges = false;
    std::size_t iht_violations = 0;  // t with err > bound while the bound contracts
    std::size_t siht_violations = 0;
    std::vector<double> err_iht, err_siht, bound_iht, bound_siht; // t = 0..T
};

struct ToyBoundsSummary {
    std::vector<ToyBoundsCase> cases;
};

struct SuccessRecord {
    std::size_t k = 0;
    std::string algorithm; // "iht" or "siht_L<L>"
    double p0 = 0.0;
    double p_noise = 0.0;
    double delta_p = 0.0; // nan when p0 == 0
};

struct SuccessSummary {
    std::vector<SuccessRecord> records;
    const SuccessRecord* find(std::size_t k, const std::string& algorithm) const;
};

struct MaskedVariant {
    std::string name;
    std::size_t regions = 0;
    std::vector<std::size_t> budgets;
    bool siht_exact = false;
    bool iht_exact = false;
    double siht_a_err = 0.0;
    double iht_a_err = 0.0;
    double mask_threshold = 0.0;
    std::string failure; // stage label and message when the pipeline stopped early
};

struct MaskedSummary {
    IndexSet true_support;
    std::vector<MaskedVariant> variants;
    const MaskedVariant* find(const std::string& name) const;
};

struct Offgrid1dSummary {
    std::vector<std::size_t> sweep_n;
    std::vector<double> sweep_mu, sweep_dr_iht, sweep_dr_siht;
    std::vector<double> refine_mu, refine_dr;
    double refine_a_err = 0.0;
    double refine_theta_err = 0.0;
};

struct AdaptiveCase {
    double noise_level = 0.0;
    std::size_t recovered = 0;
    std::size_t iterations = 0;
    bool stabilized = false;
    double a_err = 0.0;
    double theta_err = 0.0;
    double final_mu_between = 0.0;
    std::string status = "ok"; // or the error name when the run aborted
    std::vector<AdaptiveRow> rows;
};

struct AdaptiveSummary {
    SourceSet truth;
    double true_angle_coherence = 0.0;
    std::vector<AdaptiveCase> cases;
};

struct CoherenceSummary {
    double mu = 0.0;
    double sinc_estimate = 0.0;
    std::vector<double> mu_within;
    std::vector<std::vector<double>> mu_between;
    double rho = 0.0;
    double rho_tilde = 0.0;
    double column_rate = 0.0;
    double aggregate_rate = 0.0;
};

ToyBoundsSummary run_toy_bounds(const ExperimentConfig& cfg);
SuccessSummary run_success_prob(const ExperimentConfig& cfg);
MaskedSummary run_masked_2d(const ExperimentConfig& cfg);
Offgrid1dSummary run_offgrid_1d(const ExperimentConfig& cfg);
AdaptiveSummary run_offgrid_adaptive(const ExperimentConfig& cfg);
CoherenceSummary run_coherence_report(const ExperimentConfig& cfg);

/// Dispatches on cfg.kind.
void run_experiment(const ExperimentConfig& cfg);

/// Scene helpers shared with the tests.
/// k distinct indices from [0, n), ascending.
IndexSet random_support(std::size_t n, std::size_t k, CounterRng& rng);
/// One source per 1/k of the circle: theta_j uniform in [2 pi j/k, 2 pi j/k + pi/k].
SourceSet equatorial_sources(std::size_t k, CounterRng& rng);
/// Sources on a 2D grid, at least `min_separation` grid steps of great-circle
/// distance apart, off the pole row; amplitudes uniform in [lo, hi].
IndexSet separated_grid_support(const AngleGrid& grid, std::size_t k, std::size_t min_separation,
                                CounterRng& rng);
/// k directions with theta, phi uniform in their ranges and pairwise direction
/// distance at least min_separation; amplitudes normal(mean, sd).
SourceSet random_sphere_sources(std::size_t k, double min_separation, double amp_mean,
                                double amp_sd, CounterRng& rng);

} // namespace siht
