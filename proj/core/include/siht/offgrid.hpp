#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "siht/isp_model.hpp"
#include "siht/numerics.hpp"
#include "siht/solvers.hpp"
#include "siht/thresholding.hpp"

namespace siht {

/// Points are d-vectors: (theta) for equatorial problems, (theta, phi) on the sphere.
using GridPoint = std::vector<double>;

/// The 3^d points point + (a_1..a_d), a_i in {0, +-h_i/alpha}, in lexicographic
/// order of the offsets (minus, zero, plus). With `spherical`, coordinate 0 is
/// wrapped into [0, 2pi) and coordinate 1 clamped to [0, pi]; exact duplicates
/// are dropped. BadAlpha unless 1 < alpha <= 2.
std::vector<GridPoint> refine_around(std::span<const double> point, std::span<const double> spacings,
                                     double alpha, bool spherical = false);

SphericalAngle to_angle(std::span<const double> point);
GridPoint to_point(const SphericalAngle& a, std::size_t dims);

/// Per-set candidate lists for grid refinement.
struct RefinementState {
    std::vector<std::vector<GridPoint>> candidates; // one list per surviving set
    std::vector<std::size_t> labels;                // original set number of each survivor
    std::vector<GridPoint> centers;                 // last winner (or seed point) per set
    std::vector<double> spacings;                   // h_1..h_d
    double alpha = 1.1;
    std::size_t iteration = 0;

    std::size_t active_count() const noexcept { return candidates.size(); }
    std::size_t dims() const noexcept { return spacings.size(); }
    std::size_t candidate_count() const noexcept;
    /// Unit directions of all candidates, set after set.
    std::vector<Vec3> directions() const;
    /// Index blocks of each set inside directions().
    std::vector<IndexSet> blocks() const;
    /// Keeps only the sets at `keep` (positions, ascending).
    RefinementState restricted(std::span<const std::size_t> keep) const;
};

/// Sets given as index lists into `grid`; centers are the first member.
RefinementState state_from_sets(const AngleGrid& grid, const std::vector<IndexSet>& sets,
                                double alpha);

/// One set per grid point, each expanded by refine_around; spacings then divided by alpha.
RefinementState state_from_grid_points(const AngleGrid& grid, double alpha);

/// Removes candidates whose direction matches (to 1e-12) a candidate of a
/// lower-numbered set or an earlier one in the same set. Sets left empty are dropped.
void remove_duplicate_candidates(RefinementState& state);

struct OffgridMetrics {
    double delta_r = std::numeric_limits<double>::quiet_NaN();
    double a_err = std::numeric_limits<double>::quiet_NaN();
    double theta_err = std::numeric_limits<double>::quiet_NaN();
    double coherence_between = 0.0; // max mu_{S,S'} over set pairs
    double coherence_within = 0.0;  // max mu_S
    double mu = 0.0;                // coherence of the whole candidate matrix
    double rho_t = 0.0;
    double rho_tilde_t = 0.0;
};

struct MonitorResult {
    double rho_t = 0.0;
    double rho_tilde_t = 0.0;
    bool contractive = false;
};

/// 3 max mu_S and 3 max mu_{S,S'} over the candidate blocks of `state`, with
/// contractive = rho + (k - 1) rho_tilde < 1 for k surviving sets.
MonitorResult contraction_monitor(const RefinementState& state, const ComplexMatrix& a_t);

struct StepResult {
    RefinementState next;
    ComplexVector x;                 // solver output over the candidates of the input state
    std::vector<GridPoint> winners;  // per set
    ComplexVector winner_amplitudes; // per set
    OffgridMetrics metrics;
};

/// One refinement: solve with one atom per set, take each set's winner, replace
/// its candidates by refine_around(winner), divide spacings by alpha.
StepResult refinement_step(const RefinementState& state, std::span<const cplx> b,
                           const DetectorArray& det, const SolveConfig& cfg);

struct RefinementRow {
    std::size_t t = 0;
    OffgridMetrics metrics;
};

struct RefinementRun {
    SourceSet recovered;
    std::vector<RefinementRow> rows;
    RefinementState final_state;
};

/// Fixed number of refinement steps with known structure.
RefinementRun refinement_solve(RefinementState state, std::span<const cplx> b,
                               const DetectorArray& det, std::size_t iterations,
                               const SolveConfig& cfg);

struct AdaptiveOptions {
    std::size_t k_floor = 1;
    double c = 0.25;
    double alpha = 1.1;
    std::size_t max_iters = 100;
    /// Stop after this many consecutive iterations with an unchanged set count
    /// and every winner moving less than displacement_tol. 0 disables.
    std::size_t stable_window = 5;
    double displacement_tol = 1e-10;
};

struct AdaptiveRow {
    std::size_t t = 0;
    OffgridMetrics metrics;
    std::size_t active_count = 0; // sets left after elimination
    std::size_t k_t = 0;          // number of sets kept by the threshold
    double mean_amplitude = 0.0;
};

struct AdaptiveRun {
    SourceSet recovered;
    std::vector<AdaptiveRow> rows;
    RefinementState final_state;
    std::size_t iterations = 0;
    bool stabilized = false;
};

/// K = max(#{l : |w_l| > c mean|w|}, k_floor), capped at w.size().
std::size_t adaptive_keep_count(std::span<const cplx> winner_amplitudes, double c,
                                std::size_t k_floor);

/// Grid refinement with set elimination: every step keeps the K largest set
/// winners and permanently drops the rest. AllSetsEliminated if nothing survives.
AdaptiveRun adaptive_offgrid_solve(const AngleGrid& initial_grid, std::span<const cplx> b,
                                   const DetectorArray& det, const AdaptiveOptions& opts,
                                   const SolveConfig& cfg);

/// Errors after an optimal assignment of recovered to true sources by total
/// direction distance. Unmatched sources add |a|^2 and 1 to the squared sums.
OffgridMetrics recovery_errors(const SourceSet& recovered, const SourceSet& truth);

/// Min-cost assignment for an r x c cost table (row-major). Returns, for each
/// row, the assigned column or -1.
std::vector<long> min_cost_assignment(std::span<const double> cost, std::size_t rows,
                                      std::size_t cols);

} // namespace siht
