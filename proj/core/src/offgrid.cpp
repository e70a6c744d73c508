#include "siht/offgrid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "siht/error.hpp"

namespace siht {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSameDirection = 1e-12;

double wrap_theta(double t)
{
    t = std::fmod(t, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    if (t >= 2.0 * kPi) t = 0.0;
    return t;
}

struct BlockCoherence {
    double within = 0.0;
    double between = 0.0;
    std::vector<double> within_per_set;
};

// Max |<a_i, a_j>| for column pairs inside one block and across blocks. Columns
// are unit norm, so no further normalization is needed.
BlockCoherence block_coherence(const ComplexMatrix& a, const std::vector<IndexSet>& blocks)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    std::vector<std::size_t> owner(n, 0);
    for (std::size_t s = 0; s < blocks.size(); ++s) {
        for (auto j : blocks[s]) owner[j] = s;
    }
    std::vector<cplx> cols(n * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) cols[j * m + i] = a(i, j);
    }
    BlockCoherence out;
    out.within_per_set.assign(blocks.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx* ci = cols.data() + i * m;
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx* cj = cols.data() + j * m;
            double re = 0.0, im = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                re += ci[r].real() * cj[r].real() + ci[r].imag() * cj[r].imag();
                im += ci[r].real() * cj[r].imag() - ci[r].imag() * cj[r].real();
            }
            const double g = std::sqrt(re * re + im * im);
            if (owner[i] == owner[j]) {
                auto& w = out.within_per_set[owner[i]];
                w = std::max(w, g);
                out.within = std::max(out.within, g);
            } else {
                out.between = std::max(out.between, g);
            }
        }
    }
    return out;
}

void check_alpha(double alpha)
{
    if (!(alpha > 1.0 && alpha <= 2.0)) {
        fail(ErrorCode::BadAlpha, "alpha must lie in (1, 2], got " + std::to_string(alpha));
    }
}

} // namespace

std::vector<GridPoint> refine_around(std::span<const double> point, std::span<const double> spacings,
                                     double alpha, bool spherical)
{
    check_alpha(alpha);
    const std::size_t d = point.size();
    if (d == 0) fail(ErrorCode::DimensionMismatch, "refine_around needs d >= 1");
    if (spacings.size() != d) fail(ErrorCode::DimensionMismatch, "spacings vs point dimension");

    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= 3;

    std::vector<GridPoint> out;
    out.reserve(total);
    for (std::size_t code = 0; code < total; ++code) {
        GridPoint p(d);
        std::size_t rest = code;
        // Most significant digit is coordinate 0, so the order is lexicographic.
        std::size_t div = total / 3;
        for (std::size_t i = 0; i < d; ++i) {
            const long digit = static_cast<long>(rest / div) - 1;
            rest %= div;
            div /= 3;
            p[i] = point[i] + static_cast<double>(digit) * spacings[i] / alpha;
        }
        if (spherical) {
            p[0] = wrap_theta(p[0]);
            if (d > 1) p[1] = std::clamp(p[1], 0.0, kPi);
        }
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
    }
    return out;
}

SphericalAngle to_angle(std::span<const double> point)
{
    if (point.empty() || point.size() > 2) fail(ErrorCode::DimensionMismatch, "grid point dimension");
    return {point[0], point.size() == 2 ? point[1] : kPi / 2};
}

GridPoint to_point(const SphericalAngle& a, std::size_t dims)
{
    if (dims == 1) return {a.theta};
    if (dims == 2) return {a.theta, a.phi};
    fail(ErrorCode::DimensionMismatch, "grid point dimension");
}

std::size_t RefinementState::candidate_count() const noexcept
{
    std::size_t n = 0;
    for (const auto& c : candidates) n += c.size();
    return n;
}

std::vector<Vec3> RefinementState::directions() const
{
    std::vector<Vec3> out;
    out.reserve(candidate_count());
    for (const auto& set : candidates) {
        for (const auto& p : set) out.push_back(direction(to_angle(p)));
    }
    return out;
}

std::vector<IndexSet> RefinementState::blocks() const
{
    std::vector<IndexSet> out;
    std::size_t next = 0;
    for (const auto& set : candidates) {
        IndexSet block(set.size());
        for (auto& j : block) j = next++;
        out.push_back(std::move(block));
    }
    return out;
}

RefinementState RefinementState::restricted(std::span<const std::size_t> keep) const
{
    RefinementState r;
    r.spacings = spacings;
    r.alpha = alpha;
    r.iteration = iteration;
    for (auto s : keep) {
        if (s >= candidates.size()) fail(ErrorCode::IndexOutOfRange, "set position");
        r.candidates.push_back(candidates[s]);
        r.labels.push_back(labels[s]);
        r.centers.push_back(centers[s]);
    }
    return r;
}

namespace {

std::vector<double> grid_spacings(const AngleGrid& grid)
{
    if (grid.n_phi > 1) return {grid.h_theta, grid.h_phi};
    return {grid.h_theta};
}

} // namespace

RefinementState state_from_sets(const AngleGrid& grid, const std::vector<IndexSet>& sets,
                                double alpha)
{
    check_alpha(alpha);
    RefinementState s;
    s.alpha = alpha;
    s.spacings = grid_spacings(grid);
    const std::size_t d = s.dims();
    for (std::size_t l = 0; l < sets.size(); ++l) {
        if (sets[l].empty()) fail(ErrorCode::EmptySet, "set " + std::to_string(l));
        std::vector<GridPoint> pts;
        for (auto j : sets[l]) {
            if (j >= grid.size()) fail(ErrorCode::IndexOutOfRange, "grid index " + std::to_string(j));
            pts.push_back(to_point(grid.coords[j], d));
        }
        s.centers.push_back(pts.front());
        s.candidates.push_back(std::move(pts));
        s.labels.push_back(l);
    }
    remove_duplicate_candidates(s);
    return s;
}

RefinementState state_from_grid_points(const AngleGrid& grid, double alpha)
{
    check_alpha(alpha);
    RefinementState s;
    s.alpha = alpha;
    s.spacings = grid_spacings(grid);
    const std::size_t d = s.dims();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const GridPoint p = to_point(grid.coords[j], d);
        s.candidates.push_back(refine_around(p, s.spacings, alpha, true));
        s.centers.push_back(p);
        s.labels.push_back(j);
    }
    for (auto& h : s.spacings) h /= alpha;
    remove_duplicate_candidates(s);
    return s;
}

void remove_duplicate_candidates(RefinementState& state)
{
    std::vector<Vec3> kept;
    std::vector<std::size_t> keep_sets;
    for (std::size_t s = 0; s < state.candidates.size(); ++s) {
        std::vector<GridPoint> unique;
        for (auto& p : state.candidates[s]) {
            const Vec3 v = direction(to_angle(p));
            bool seen = false;
            for (const auto& q : kept) {
                if (distance(v, q) < kSameDirection) {
                    seen = true;
                    break;
                }
            }
            if (!seen) {
                kept.push_back(v);
                unique.push_back(std::move(p));
            }
        }
        state.candidates[s] = std::move(unique);
        if (!state.candidates[s].empty()) keep_sets.push_back(s);
    }
    if (keep_sets.size() != state.candidates.size()) state = state.restricted(keep_sets);
}

MonitorResult contraction_monitor(const RefinementState& state, const ComplexMatrix& a_t)
{
    if (a_t.cols() != state.candidate_count()) {
        fail(ErrorCode::DimensionMismatch, "candidate matrix vs state");
    }
    const auto bc = block_coherence(a_t, state.blocks());
    MonitorResult r;
    r.rho_t = 3.0 * bc.within;
    r.rho_tilde_t = 3.0 * bc.between;
    const double k = static_cast<double>(state.active_count());
    r.contractive = r.rho_t + (k - 1.0) * r.rho_tilde_t < 1.0;
    return r;
}

StepResult refinement_step(const RefinementState& state, std::span<const cplx> b,
                           const DetectorArray& det, const SolveConfig& cfg)
{
    if (state.active_count() == 0) fail(ErrorCode::EmptySet, "no surviving sets");
    for (std::size_t s = 0; s < state.active_count(); ++s) {
        if (state.candidates[s].empty()) fail(ErrorCode::EmptySet, "set " + std::to_string(s));
    }
    const auto blocks = state.blocks();
    const ComplexMatrix a = sensing_matrix(det, state.directions());
    const SparsityStructure ss(blocks, std::vector<std::size_t>(blocks.size(), 1), a.cols());
    SolveResult sol = structured_iht_solve(a, b, ss, cfg);

    StepResult out;
    const auto bc = block_coherence(a, blocks);
    out.metrics.coherence_within = bc.within;
    out.metrics.coherence_between = bc.between;
    out.metrics.mu = std::max(bc.within, bc.between);
    out.metrics.rho_t = 3.0 * bc.within;
    out.metrics.rho_tilde_t = 3.0 * bc.between;
    const auto r = subtract(b, siht::apply(a, sol.x));
    const double bn = norm2(b);
    out.metrics.delta_r = bn > 0.0 ? norm2(r) / bn : norm2(r);

    out.next.spacings = state.spacings;
    out.next.alpha = state.alpha;
    out.next.iteration = state.iteration + 1;
    out.next.labels = state.labels;
    for (std::size_t s = 0; s < blocks.size(); ++s) {
        std::size_t best = blocks[s].size();
        double best_mag = 0.0;
        for (std::size_t i = 0; i < blocks[s].size(); ++i) {
            const double mag = std::abs(sol.x[blocks[s][i]]);
            if (mag > best_mag) {
                best_mag = mag;
                best = i;
            }
        }
        GridPoint w = best < blocks[s].size() ? state.candidates[s][best] : state.centers[s];
        out.winner_amplitudes.push_back(best < blocks[s].size() ? sol.x[blocks[s][best]] : cplx{});
        out.next.candidates.push_back(refine_around(w, state.spacings, state.alpha, true));
        out.next.centers.push_back(w);
        out.winners.push_back(std::move(w));
    }
    for (auto& h : out.next.spacings) h /= state.alpha;
    remove_duplicate_candidates(out.next);
    out.x = std::move(sol.x);
    return out;
}

namespace {

SourceSet sources_from(std::span<const GridPoint> winners, std::span<const cplx> amps)
{
    SourceSet s;
    for (std::size_t i = 0; i < winners.size(); ++i) {
        s.directions.push_back(direction(to_angle(winners[i])));
        s.amplitudes.push_back(amps[i]);
    }
    return s;
}

// Positions in `before` of the sets still present in `after` (labels are
// kept in order, so a merge pass suffices).
std::vector<std::size_t> surviving_positions(const RefinementState& before,
                                             const RefinementState& after)
{
    std::vector<std::size_t> out;
    for (std::size_t s = 0, u = 0; s < before.labels.size(); ++s) {
        if (u < after.labels.size() && after.labels[u] == before.labels[s]) {
            out.push_back(s);
            ++u;
        }
    }
    return out;
}

} // namespace

RefinementRun refinement_solve(RefinementState state, std::span<const cplx> b,
                               const DetectorArray& det, std::size_t iterations,
                               const SolveConfig& cfg)
{
    RefinementRun run;
    std::vector<GridPoint> winners;
    ComplexVector amps;
    for (std::size_t t = 1; t <= iterations; ++t) {
        StepResult step = refinement_step(state, b, det, cfg);
        run.rows.push_back({t, step.metrics});
        winners.clear();
        amps.clear();
        for (auto s : surviving_positions(state, step.next)) {
            winners.push_back(step.winners[s]);
            amps.push_back(step.winner_amplitudes[s]);
        }
        state = std::move(step.next);
    }
    run.recovered = sources_from(winners, amps);
    run.final_state = std::move(state);
    return run;
}

std::size_t adaptive_keep_count(std::span<const cplx> winner_amplitudes, double c,
                                std::size_t k_floor)
{
    const std::size_t n = winner_amplitudes.size();
    if (n == 0) return 0;
    double mean = 0.0;
    for (const auto& v : winner_amplitudes) mean += std::abs(v);
    mean /= static_cast<double>(n);
    std::size_t count = 0;
    for (const auto& v : winner_amplitudes) {
        if (std::abs(v) > c * mean) ++count;
    }
    return std::min(std::max(count, k_floor), n);
}

AdaptiveRun adaptive_offgrid_solve(const AngleGrid& initial_grid, std::span<const cplx> b,
                                   const DetectorArray& det, const AdaptiveOptions& opts,
                                   const SolveConfig& cfg)
{
    if (!(opts.c > 0.0 && opts.c < 1.0)) fail(ErrorCode::ConfigError, "c must lie in (0, 1)");
    if (opts.k_floor < 1) fail(ErrorCode::ConfigError, "k_floor must be at least 1");
    RefinementState state = state_from_grid_points(initial_grid, opts.alpha);

    AdaptiveRun run;
    std::vector<GridPoint> prev_winners;
    std::vector<std::size_t> prev_labels;
    std::vector<GridPoint> winners;
    ComplexVector amps;
    std::size_t stable = 0;
    for (std::size_t t = 1; t <= opts.max_iters; ++t) {
        StepResult step = refinement_step(state, b, det, cfg);

        // Sets dropped as duplicates during refinement count as eliminated.
        const auto present = surviving_positions(state, step.next);
        ComplexVector w;
        for (auto s : present) w.push_back(step.winner_amplitudes[s]);

        const std::size_t k_t = adaptive_keep_count(w, opts.c, opts.k_floor);
        const ComplexVector kept = hard_threshold(w, k_t);
        std::vector<std::size_t> keep_pos;
        std::vector<std::size_t> keep_state;
        for (std::size_t i = 0; i < kept.size(); ++i) {
            if (kept[i] != cplx{}) {
                keep_pos.push_back(i);
                keep_state.push_back(present[i]);
            }
        }
        if (keep_pos.empty()) {
            fail(ErrorCode::AllSetsEliminated, "iteration " + std::to_string(t));
        }

        double mean = 0.0;
        for (const auto& v : w) mean += std::abs(v);
        mean /= static_cast<double>(w.size());

        winners.clear();
        amps.clear();
        std::vector<std::size_t> labels;
        for (auto s : keep_state) {
            winners.push_back(step.winners[s]);
            amps.push_back(step.winner_amplitudes[s]);
            labels.push_back(state.labels[s]);
        }
        state = step.next.restricted(keep_pos);

        AdaptiveRow row;
        row.t = t;
        row.metrics = step.metrics;
        row.active_count = state.active_count();
        row.k_t = k_t;
        row.mean_amplitude = mean;
        run.rows.push_back(row);
        run.iterations = t;

        if (opts.stable_window > 0) {
            bool still = labels == prev_labels;
            for (std::size_t i = 0; still && i < winners.size(); ++i) {
                const Vec3 a = direction(to_angle(winners[i]));
                const Vec3 p = direction(to_angle(prev_winners[i]));
                if (distance(a, p) >= opts.displacement_tol) still = false;
            }
            stable = still ? stable + 1 : 0;
            prev_winners = winners;
            prev_labels = labels;
            if (stable >= opts.stable_window) {
                run.stabilized = true;
                break;
            }
        }
    }
    run.recovered = sources_from(winners, amps);
    run.final_state = std::move(state);
    return run;
}

std::vector<long> min_cost_assignment(std::span<const double> cost, std::size_t rows,
                                      std::size_t cols)
{
    if (cost.size() != rows * cols) fail(ErrorCode::DimensionMismatch, "cost table size");
    const std::size_t n = std::max(rows, cols);
    std::vector<long> result(rows, -1);
    if (n == 0) return result;
    auto at = [&](std::size_t i, std::size_t j) {
        return (i < rows && j < cols) ? cost[i * cols + j] : 0.0;
    };
    // Shortest augmenting path with potentials; 1-based with a sentinel column 0.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i = p[j];
        if (i >= 1 && i <= rows && j <= cols) result[i - 1] = static_cast<long>(j - 1);
    }
    return result;
}

OffgridMetrics recovery_errors(const SourceSet& recovered, const SourceSet& truth)
{
    if (recovered.directions.size() != recovered.amplitudes.size() ||
        truth.directions.size() != truth.amplitudes.size()) {
        fail(ErrorCode::DimensionMismatch, "source directions vs amplitudes");
    }
    const std::size_t r = recovered.size();
    const std::size_t c = truth.size();
    std::vector<double> cost(r * c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            cost[i * c + j] = distance(recovered.directions[i], truth.directions[j]);
        }
    }
    const auto match = min_cost_assignment(cost, r, c);

    double a2 = 0.0, t2 = 0.0;
    std::vector<char> truth_used(c, 0);
    for (std::size_t i = 0; i < r; ++i) {
        if (match[i] < 0) {
            a2 += std::norm(recovered.amplitudes[i]);
            t2 += 1.0;
            continue;
        }
        const auto j = static_cast<std::size_t>(match[i]);
        truth_used[j] = 1;
        a2 += std::norm(recovered.amplitudes[i] - truth.amplitudes[j]);
        t2 += cost[i * c + j] * cost[i * c + j];
    }
    for (std::size_t j = 0; j < c; ++j) {
        if (!truth_used[j]) {
            a2 += std::norm(truth.amplitudes[j]);
            t2 += 1.0;
        }
    }
    OffgridMetrics m;
    m.a_err = std::sqrt(a2);
    m.theta_err = std::sqrt(t2);
    return m;
}

} // namespace siht
