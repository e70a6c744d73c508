#include "siht/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "siht/coherence.hpp"
#include "siht/error.hpp"
#include "siht/io.hpp"
#include "siht/numerics.hpp"
#include "siht/preprocessing.hpp"
#include "siht/rng.hpp"
#include "siht/solvers.hpp"

namespace siht {

namespace {

constexpr double kPi = std::numbers::pi;

// Stream ids so that every experiment draws from its own counter streams.
enum Stream : std::uint64_t {
    kSceneStream = 1,
    kNoiseStream = 2,
    kTrialStream = 3,
};

std::string tag(double v)
{
    std::string s = format_number(v);
    for (auto& ch : s) {
        if (ch == '.') ch = 'p';
    }
    return s;
}

double relative_residual(const ComplexMatrix& a, std::span<const cplx> x, std::span<const cplx> b)
{
    const double bn = norm2(b);
    const double r = norm2(subtract(b, siht::apply(a, x)));
    return bn > 0.0 ? r / bn : r;
}

std::string join(const std::vector<std::size_t>& v, char sep)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(v[i]);
    }
    return s;
}

IndexSet significant_support(std::span<const cplx> x, double rel)
{
    double peak = 0.0;
    for (const auto& v : x) peak = std::max(peak, std::abs(v));
    IndexSet s;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (peak > 0.0 && std::abs(x[j]) > rel * peak) s.push_back(j);
    }
    return s;
}

std::vector<double> magnitudes(std::span<const cplx> x)
{
    std::vector<double> m(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) m[j] = std::abs(x[j]);
    return m;
}

// Rows are phi indices, columns theta indices.
void write_grid_heatmap(const std::filesystem::path& path, const AngleGrid& grid,
                        const std::vector<double>& values, const std::string& title)
{
    write_text(path, render_heatmap(values, grid.n_phi, grid.n_theta, title));
}

double great_circle(const Vec3& a, const Vec3& b)
{
    return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

} // namespace

const SuccessRecord* SuccessSummary::find(std::size_t k, const std::string& algorithm) const
{
    for (const auto& r : records) {
        if (r.k == k && r.algorithm == algorithm) return &r;
    }
    return nullptr;
}

const MaskedVariant* MaskedSummary::find(const std::string& name) const
{
    for (const auto& v : variants) {
        if (v.name == name) return &v;
    }
    return nullptr;
}

IndexSet random_support(std::size_t n, std::size_t k, CounterRng& rng)
{
    if (k > n) fail(ErrorCode::BudgetTooLarge, "support larger than the grid");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    IndexSet s(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(s.begin(), s.end());
    return s;
}

SourceSet equatorial_sources(std::size_t k, CounterRng& rng)
{
    SourceSet s;
    const double kk = static_cast<double>(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double theta = 2.0 * kPi * static_cast<double>(j) / kk + rng.uniform() * kPi / kk;
        s.directions.push_back(direction({theta, kPi / 2}));
        s.amplitudes.emplace_back(1.0, 0.0);
    }
    return s;
}

IndexSet separated_grid_support(const AngleGrid& grid, std::size_t k, std::size_t min_separation,
                                CounterRng& rng)
{
    const double min_dist = static_cast<double>(min_separation) * grid.h_phi;
    // Everything except the pole row, where all theta values coincide.
    const std::size_t usable = grid.n_phi > 1 ? grid.n_theta * (grid.n_phi - 1) : grid.size();
    for (int attempt = 0; attempt < 100000; ++attempt) {
        IndexSet picked;
        for (int draw = 0; draw < 2000 && picked.size() < k; ++draw) {
            const auto j = static_cast<std::size_t>(rng.below(usable));
            bool ok = true;
            for (auto p : picked) {
                if (great_circle(grid.directions[j], grid.directions[p]) < min_dist) {
                    ok = false;
                    break;
                }
            }
            if (ok) picked.push_back(j);
        }
        if (picked.size() == k) {
            std::sort(picked.begin(), picked.end());
            return picked;
        }
    }
    fail(ErrorCode::ConfigError, "cannot place the sources with the requested separation");
}

SourceSet random_sphere_sources(std::size_t k, double min_separation, double amp_mean,
                                double amp_sd, CounterRng& rng)
{
    SourceSet s;
    for (int draw = 0; s.size() < k; ++draw) {
        if (draw > 100000) fail(ErrorCode::ConfigError, "cannot place the sources with the requested separation");
        const double theta = rng.uniform(0.0, 2.0 * kPi);
        const double phi = rng.uniform(0.0, kPi);
        const Vec3 d = direction({theta, phi});
        bool ok = true;
        for (const auto& e : s.directions) {
            if (distance(d, e) < min_separation) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        s.directions.push_back(d);
        s.amplitudes.emplace_back(0.0, 0.0);
    }
    for (auto& a : s.amplitudes) a = cplx{rng.normal(amp_mean, amp_sd), 0.0};
    return s;
}

// --------------------------------------------------------------------------
// toy bounds

ToyBoundsSummary run_toy_bounds(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto& tc = cfg.toy;
    const std::size_t n = cfg.scene.grid[0];
    const AngleGrid grid = grid_1d(n);
    const SparsityStructure ss(tc.sets, tc.budgets, n);
    const std::size_t k = tc.support.size();
    if (ss.total_budget() != k) fail(ErrorCode::ConfigError, "toy_bounds budgets must sum to the support size");
    const ComplexVector truth =
        sparse_vector(n, tc.support, ComplexVector(k, cplx{1.0, 0.0}));

    SolveConfig scfg = cfg.solver;
    scfg.max_iters = tc.iterations;

    ToyBoundsSummary summary;
    CsvTable overview({"omega_r", "mu", "mu_between", "iht_rate", "condition_value", "aggregate_rate",
                       "sinc_estimate", "iht_bound_converges", "siht_bound_converges",
                       "iht_violations", "siht_violations"});
    for (double wr : cfg.scene.omega_r) {
        const auto det = fibonacci_sphere_detectors(cfg.scene.detectors, wr);
        const ComplexMatrix a = sensing_matrix(det, grid);
        const ComplexVector b = siht::apply(a, truth);

        const CoherenceTable table(a);
        const CoherenceReport rep = coherence_report(table, ss);

        ToyBoundsCase c;
        c.omega_r = wr;
        c.mu = table.mutual();
        c.mu_within = rep.mu_within;
        for (std::size_t i = 0; i < rep.set_count(); ++i) {
            for (std::size_t j = 0; j < rep.set_count(); ++j) {
                if (i != j) c.mu_between = std::max(c.mu_between, rep.mu_between[i][j]);
            }
        }
        c.iht_rate = 3.0 * c.mu * static_cast<double>(k);
        c.condition_value = rep.column_rate;
        c.aggregate_rate = rep.aggregate_rate();
        c.sinc_estimate = grid_sinc_estimate(wr, grid.h_theta);

        const auto iht = iht_solve(a, b, k, scfg, std::span<const cplx>(truth));
        const auto sih = structured_iht_solve(a, b, ss, scfg, std::span<const cplx>(truth));
        const double e0 = norm1(truth);
        const auto b1 = iht_error_bound(c.mu, k, e0, 0.0, tc.iterations);
        const auto b2 = structured_error_bound(rep, ss.size(), k, e0, 0.0, tc.iterations, RateForm::ColumnSum);
        c.iht_bound_converges = b1.converges;
        c.siht_bound_converges = b2.converges;

        auto errors = [&](const SolveTrace& tr) {
            std::vector<double> e{e0};
            for (double v : tr.l1_error_history) e.push_back(v);
            while (e.size() < tc.iterations + 1) e.push_back(e.back());
            return e;
        };
        c.err_iht = errors(iht.trace);
        c.err_siht = errors(sih.trace);
        c.bound_iht = b1.values;
        c.bound_siht = b2.values;

        CsvTable t({"t", "err_iht", "err_siht", "bound_iht", "bound_siht"});
        for (std::size_t s = 0; s <= tc.iterations; ++s) {
            t.cell(s).cell(c.err_iht[s]).cell(c.err_siht[s]).cell(c.bound_iht[s]).cell(c.bound_siht[s]);
            t.end_row();
            const double slack = 1e-12 * e0;
            if (b1.converges && c.err_iht[s] > c.bound_iht[s] + slack) ++c.iht_violations;
            if (b2.converges && c.err_siht[s] > c.bound_siht[s] + slack) ++c.siht_violations;
        }
        const std::string stem = "toy_bounds_wr" + tag(wr);
        t.write(cfg.out_dir / (stem + ".csv"));

        LinePlot plot;
        plot.title = "l1 error vs iteration, omega_R = " + format_number(wr);
        plot.x_label = "iteration t";
        plot.y_label = "||x_t - x*||_1";
        plot.log_y = true;
        std::vector<double> ts(tc.iterations + 1);
        std::iota(ts.begin(), ts.end(), 0.0);
        plot.series = {{"IHT", ts, c.err_iht}, {"structured IHT", ts, c.err_siht},
                       {"IHT bound", ts, c.bound_iht}, {"structured bound", ts, c.bound_siht}};
        write_text(cfg.out_dir / (stem + ".svg"), render_line_plot(plot));

        overview.cell(wr).cell(c.mu).cell(c.mu_between).cell(c.iht_rate).cell(c.condition_value)
            .cell(c.aggregate_rate).cell(c.sinc_estimate).cell(c.iht_bound_converges)
            .cell(c.siht_bound_converges).cell(c.iht_violations).cell(c.siht_violations);
        overview.end_row();
        summary.cases.push_back(std::move(c));
    }
    overview.write(cfg.out_dir / "toy_bounds_summary.csv");
    return summary;
}

// --------------------------------------------------------------------------
// success probability

SuccessSummary run_success_prob(const ExperimentConfig& cfg)
{
    cfg.validate();
    const std::size_t n = cfg.scene.grid[0];
    const auto det = fibonacci_sphere_detectors(cfg.scene.detectors, cfg.scene.omega_r.front());
    const ComplexMatrix a = sensing_matrix(det, grid_1d(n));
    const GramMatrix gram(a);

    std::vector<SparsityStructure> splits;
    for (auto l : cfg.success.splits) splits.push_back(SparsityStructure::uniform_split(n, l));
    std::vector<std::string> names{"iht"};
    for (auto l : cfg.success.splits) names.push_back("siht_L" + std::to_string(l));

    const CounterRng base(cfg.seed);
    SuccessSummary summary;
    for (auto k : cfg.success.k_values) {
        std::vector<std::size_t> ok0(names.size(), 0), okn(names.size(), 0);
        const CounterRng kstream = base.split(kTrialStream).split(k);
        for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
            CounterRng rng = kstream.split(trial);
            const IndexSet supp = random_support(n, k, rng);
            const ComplexVector truth = sparse_vector(n, supp, ComplexVector(k, cplx{1.0, 0.0}));
            const ComplexVector clean = siht::apply(a, truth);
            CounterRng noise_rng = rng.split(kNoiseStream);
            const ComplexVector eps = relative_noise(clean, cfg.noise_level, noise_rng);
            ComplexVector noisy = clean;
            for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] += eps[i];

            for (int pass = 0; pass < 2; ++pass) {
                const ComplexVector& b = pass == 0 ? clean : noisy;
                auto& ok = pass == 0 ? ok0 : okn;
                if (support(iht_solve(gram, b, k, cfg.solver).x) == supp) ++ok[0];
                for (std::size_t s = 0; s < splits.size(); ++s) {
                    const auto ss = splits[s].with_budgets_from(truth);
                    if (support(structured_iht_solve(gram, b, ss, cfg.solver).x) == supp) ++ok[s + 1];
                }
            }
        }
        for (std::size_t i = 0; i < names.size(); ++i) {
            SuccessRecord r;
            r.k = k;
            r.algorithm = names[i];
            r.p0 = static_cast<double>(ok0[i]) / static_cast<double>(cfg.trials);
            r.p_noise = static_cast<double>(okn[i]) / static_cast<double>(cfg.trials);
            r.delta_p = r.p0 > 0.0 ? (r.p_noise - r.p0) / r.p0 : std::numeric_limits<double>::quiet_NaN();
            summary.records.push_back(r);
        }
    }

    CsvTable t({"k", "alg", "P0", "Pnoise", "deltaP"});
    for (const auto& r : summary.records) {
        t.cell(r.k).cell(r.algorithm).cell(r.p0).cell(r.p_noise).cell(r.delta_p);
        t.end_row();
    }
    t.write(cfg.out_dir / "success_prob.csv");

    LinePlot p0, dp;
    p0.title = "exact support recovery, noiseless";
    p0.x_label = "k";
    p0.y_label = "P";
    dp.title = "relative change under noise";
    dp.x_label = "k";
    dp.y_label = "deltaP";
    for (const auto& name : names) {
        PlotSeries s0{name, {}, {}}, s1{name, {}, {}};
        for (const auto& r : summary.records) {
            if (r.algorithm != name) continue;
            s0.x.push_back(static_cast<double>(r.k));
            s0.y.push_back(r.p0);
            s1.x.push_back(static_cast<double>(r.k));
            s1.y.push_back(r.delta_p);
        }
        p0.series.push_back(std::move(s0));
        dp.series.push_back(std::move(s1));
    }
    write_text(cfg.out_dir / "success_prob.svg", render_line_plot(p0));
    write_text(cfg.out_dir / "success_prob_delta.svg", render_line_plot(dp));
    return summary;
}

// --------------------------------------------------------------------------
// masked 2D pipeline

namespace {

struct PipelineOutput {
    ComplexVector ls;
    IndexSet mask;
    std::vector<IndexSet> regions;
    ComplexVector x_siht;
    ComplexVector x_iht;
    MaskedVariant variant;
};

PipelineOutput masked_pipeline(const ComplexMatrix& a, const AngleGrid& grid, std::span<const cplx> b,
                               std::span<const cplx> truth, const IndexSet& true_support,
                               const ExperimentConfig& cfg, const std::string& name,
                               std::size_t inflate)
{
    const auto& mc = cfg.masked;
    PipelineOutput out;
    out.variant.name = name;
    const std::size_t k = true_support.size();
    std::string stage = "least_squares";
    try {
        out.ls = tikhonov_least_squares(a, b, mc.lambda);
        stage = "mask";
        out.mask = mask_by_mean_multiple(out.ls, mc.mask_factor);
        double mean = 0.0;
        for (const auto& v : out.ls) mean += std::abs(v);
        out.variant.mask_threshold = mc.mask_factor * mean / static_cast<double>(out.ls.size());
        stage = "regions";
        out.regions = connected_regions(out.mask, grid);
        out.variant.regions = out.regions.size();
        stage = "budgets";
        SparsityStructure ss = assign_budgets(out.ls, out.regions, k);
        if (inflate > 0) ss = ss.inflated(inflate);
        out.variant.budgets = ss.budgets();
        stage = "structured_iht";
        out.x_siht = structured_iht_solve(a, b, ss, cfg.solver).x;
        const IndexSet s = inflate > 0 ? significant_support(out.x_siht, 1e-4) : support(out.x_siht);
        out.variant.siht_exact = s == true_support;
        out.variant.siht_a_err = norm2(subtract(out.x_siht, truth));
    } catch (const Error& e) {
        out.variant.failure = stage + ": " + e.what();
    }
    out.x_iht = iht_solve(a, b, k, cfg.solver).x;
    out.variant.iht_exact = support(out.x_iht) == true_support;
    out.variant.iht_a_err = norm2(subtract(out.x_iht, truth));
    if (out.x_siht.empty()) out.x_siht.assign(truth.size(), cplx{});
    return out;
}

} // namespace

MaskedSummary run_masked_2d(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto& mc = cfg.masked;
    const AngleGrid grid = grid_2d(cfg.scene.grid[0], cfg.scene.grid[1]);
    const std::size_t n = grid.size();
    const auto det = fibonacci_sphere_detectors(cfg.scene.detectors, cfg.scene.omega_r.front());
    const ComplexMatrix a = sensing_matrix(det, grid);

    const CounterRng base(cfg.seed);
    CounterRng scene_rng = base.split(kSceneStream);
    const IndexSet supp = separated_grid_support(grid, mc.sources, mc.min_separation, scene_rng);
    ComplexVector amps;
    for (std::size_t i = 0; i < supp.size(); ++i) {
        amps.emplace_back(scene_rng.uniform(mc.amplitude_min, mc.amplitude_max), 0.0);
    }

    MaskedSummary summary;
    summary.true_support = supp;

    struct VariantSpec {
        std::string name;
        bool equal;
        std::size_t inflate;
    };
    const std::vector<VariantSpec> specs = {
        {"model", false, 0}, {"equal_amplitudes", true, 0}, {"inflated_budgets", false, mc.inflate}};

    CsvTable gridcsv({"index", "theta_index", "phi_index", "theta", "phi", "truth", "least_squares",
                      "mask", "region", "siht", "iht"});
    for (const auto& spec : specs) {
        const ComplexVector va = spec.equal ? ComplexVector(supp.size(), cplx{1.0, 0.0}) : amps;
        const ComplexVector truth = sparse_vector(n, supp, va);
        const ComplexVector clean = siht::apply(a, truth);
        CounterRng noise_rng = base.split(kNoiseStream);
        const ComplexVector eps = relative_noise(clean, cfg.noise_level, noise_rng);
        ComplexVector b = clean;
        for (std::size_t i = 0; i < b.size(); ++i) b[i] += eps[i];

        auto out = masked_pipeline(a, grid, b, truth, supp, cfg, spec.name, spec.inflate);
        if (spec.name == "model") {
            std::vector<double> region_of(n, 0.0), in_mask(n, 0.0);
            for (std::size_t r = 0; r < out.regions.size(); ++r) {
                for (auto j : out.regions[r]) region_of[j] = static_cast<double>(r + 1);
            }
            for (auto j : out.mask) in_mask[j] = 1.0;
            if (out.ls.empty()) out.ls.assign(n, cplx{});
            for (std::size_t j = 0; j < n; ++j) {
                gridcsv.cell(j).cell(grid.theta_index(j)).cell(grid.phi_index(j)).cell(grid.coords[j].theta)
                    .cell(grid.coords[j].phi).cell(std::abs(truth[j])).cell(std::abs(out.ls[j]))
                    .cell(static_cast<std::size_t>(in_mask[j])).cell(static_cast<std::size_t>(region_of[j]))
                    .cell(std::abs(out.x_siht[j])).cell(std::abs(out.x_iht[j]));
                gridcsv.end_row();
            }
            write_grid_heatmap(cfg.out_dir / "masked_2d_truth.svg", grid, magnitudes(truth), "true amplitudes");
            write_grid_heatmap(cfg.out_dir / "masked_2d_least_squares.svg", grid, magnitudes(out.ls),
                               "regularized least squares");
            write_grid_heatmap(cfg.out_dir / "masked_2d_mask.svg", grid, region_of, "mask regions");
            write_grid_heatmap(cfg.out_dir / "masked_2d_siht.svg", grid, magnitudes(out.x_siht),
                               "structured IHT");
            write_grid_heatmap(cfg.out_dir / "masked_2d_iht.svg", grid, magnitudes(out.x_iht), "IHT");
        }
        summary.variants.push_back(std::move(out.variant));
    }
    gridcsv.write(cfg.out_dir / "masked_2d_grid.csv");

    CsvTable t({"variant", "regions", "budgets", "mask_threshold", "siht_exact", "iht_exact",
                "siht_a_err", "iht_a_err", "failure"});
    for (const auto& v : summary.variants) {
        t.cell(v.name).cell(v.regions).cell(join(v.budgets, ';')).cell(v.mask_threshold)
            .cell(v.siht_exact).cell(v.iht_exact).cell(v.siht_a_err).cell(v.iht_a_err).cell(v.failure);
        t.end_row();
    }
    t.write(cfg.out_dir / "masked_2d_summary.csv");
    return summary;
}

// --------------------------------------------------------------------------
// off-grid, equatorial

Offgrid1dSummary run_offgrid_1d(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto& oc = cfg.offgrid_1d;
    const auto det = fibonacci_sphere_detectors(cfg.scene.detectors, cfg.scene.omega_r.front());
    const CounterRng base(cfg.seed);
    CounterRng scene_rng = base.split(kSceneStream);
    const SourceSet truth = equatorial_sources(oc.sources, scene_rng);
    const auto data = synthesize_data(det, truth, cfg.noise_level, base.split(kNoiseStream).key());

    Offgrid1dSummary summary;
    CsvTable sweep({"N", "mu", "delta_r_iht", "delta_r_siht"});
    for (auto n : oc.sweep) {
        const ComplexMatrix a = sensing_matrix(det, grid_1d(n));
        const double mu = mutual_coherence(a);
        const auto x1 = iht_solve(a, data.b, oc.sources, cfg.solver).x;
        const auto ss = SparsityStructure::uniform_split(n, oc.sources)
                            .with_budgets(std::vector<std::size_t>(oc.sources, 1));
        const auto x2 = structured_iht_solve(a, data.b, ss, cfg.solver).x;
        summary.sweep_n.push_back(n);
        summary.sweep_mu.push_back(mu);
        summary.sweep_dr_iht.push_back(relative_residual(a, x1, data.b));
        summary.sweep_dr_siht.push_back(relative_residual(a, x2, data.b));
        sweep.cell(n).cell(mu).cell(summary.sweep_dr_iht.back()).cell(summary.sweep_dr_siht.back());
        sweep.end_row();
    }
    sweep.write(cfg.out_dir / "offgrid_1d_sweep.csv");

    const AngleGrid coarse = grid_1d(oc.initial_points);
    const auto fifths = SparsityStructure::uniform_split(oc.initial_points, oc.sources).sets();
    const auto run = refinement_solve(state_from_sets(coarse, fifths, oc.alpha), data.b, det,
                                      oc.iterations, cfg.solver);
    CsvTable refine({"t", "mu", "delta_r", "coherence_between", "rho_t", "rho_tilde_t"});
    for (const auto& row : run.rows) {
        const auto& m = row.metrics;
        refine.cell(row.t).cell(m.mu).cell(m.delta_r).cell(m.coherence_between).cell(m.rho_t)
            .cell(m.rho_tilde_t);
        refine.end_row();
        summary.refine_mu.push_back(m.mu);
        summary.refine_dr.push_back(m.delta_r);
    }
    refine.write(cfg.out_dir / "offgrid_1d_refine.csv");
    const auto err = recovery_errors(run.recovered, truth);
    summary.refine_a_err = err.a_err;
    summary.refine_theta_err = err.theta_err;

    CsvTable fin({"a_err", "theta_err", "recovered"});
    fin.cell(err.a_err).cell(err.theta_err).cell(run.recovered.size());
    fin.end_row();
    fin.write(cfg.out_dir / "offgrid_1d_summary.csv");

    std::vector<double> ns(summary.sweep_n.begin(), summary.sweep_n.end());
    LinePlot p1;
    p1.title = "on-grid sweep";
    p1.x_label = "N";
    p1.y_label = "value";
    p1.series = {{"coherence", ns, summary.sweep_mu},
                 {"residual IHT", ns, summary.sweep_dr_iht},
                 {"residual structured IHT", ns, summary.sweep_dr_siht}};
    write_text(cfg.out_dir / "offgrid_1d_sweep.svg", render_line_plot(p1));
    std::vector<double> ts;
    for (const auto& row : run.rows) ts.push_back(static_cast<double>(row.t));
    LinePlot p2;
    p2.title = "grid refinement";
    p2.x_label = "iteration t";
    p2.y_label = "value";
    p2.series = {{"coherence", ts, summary.refine_mu}, {"residual", ts, summary.refine_dr}};
    write_text(cfg.out_dir / "offgrid_1d_refine.svg", render_line_plot(p2));
    return summary;
}

// --------------------------------------------------------------------------
// off-grid, adaptive

AdaptiveSummary run_offgrid_adaptive(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto& ac = cfg.adaptive;
    const auto det = fibonacci_sphere_detectors(cfg.scene.detectors, cfg.scene.omega_r.front());
    const AngleGrid grid = grid_2d(cfg.scene.grid[0], cfg.scene.grid[1]);
    const CounterRng base(cfg.seed);
    CounterRng scene_rng = base.split(kSceneStream);

    AdaptiveSummary summary;
    summary.truth = random_sphere_sources(ac.sources, ac.min_separation, ac.amplitude_mean,
                                          ac.amplitude_sd, scene_rng);
    summary.true_angle_coherence = ac.sources > 1
                                       ? mutual_coherence(sensing_matrix(det, summary.truth.directions))
                                       : 0.0;

    AdaptiveOptions opts;
    opts.k_floor = ac.k_floor;
    opts.c = ac.c;
    opts.alpha = ac.alpha;
    opts.max_iters = ac.iterations;
    opts.stable_window = ac.stable_window;

    CsvTable overview({"noise_level", "recovered", "iterations", "stabilized", "a_err", "theta_err",
                       "final_mu_between", "true_angle_coherence", "status"});
    for (std::size_t i = 0; i < ac.noise_levels.size(); ++i) {
        const double level = ac.noise_levels[i];
        const auto data = synthesize_data(det, summary.truth, level, base.split(kNoiseStream).split(i).key());
        AdaptiveCase c;
        c.noise_level = level;
        try {
            const auto run = adaptive_offgrid_solve(grid, data.b, det, opts, cfg.solver);
            const auto err = recovery_errors(run.recovered, summary.truth);
            c.recovered = run.recovered.size();
            c.iterations = run.iterations;
            c.stabilized = run.stabilized;
            c.a_err = err.a_err;
            c.theta_err = err.theta_err;
            c.final_mu_between = run.rows.empty() ? 0.0 : run.rows.back().metrics.coherence_between;
            c.rows = run.rows;
        } catch (const Error& e) {
            // a run that eliminates every set is a result, not a crash
            if (e.code() != ErrorCode::AllSetsEliminated) throw;
            c.status = std::string(to_string(e.code()));
            c.a_err = std::numeric_limits<double>::quiet_NaN();
            c.theta_err = std::numeric_limits<double>::quiet_NaN();
        }

        CsvTable t({"t", "mu_between", "active_count", "K", "delta_r", "rho_t", "rho_tilde_t",
                    "mean_amplitude"});
        std::vector<double> ts, mus, counts;
        for (const auto& row : c.rows) {
            t.cell(row.t).cell(row.metrics.coherence_between).cell(row.active_count).cell(row.k_t)
                .cell(row.metrics.delta_r).cell(row.metrics.rho_t).cell(row.metrics.rho_tilde_t)
                .cell(row.mean_amplitude);
            t.end_row();
            ts.push_back(static_cast<double>(row.t));
            mus.push_back(row.metrics.coherence_between);
            counts.push_back(static_cast<double>(row.active_count));
        }
        const std::string stem = "offgrid_adaptive_noise" + tag(level);
        t.write(cfg.out_dir / (stem + ".csv"));
        LinePlot p;
        p.title = "adaptive refinement, noise " + format_number(level);
        p.x_label = "iteration t";
        p.y_label = "between-set coherence";
        p.series = {{"mu between sets", ts, mus}};
        write_text(cfg.out_dir / (stem + ".svg"), render_line_plot(p));
        LinePlot pc;
        pc.title = "surviving sets, noise " + format_number(level);
        pc.x_label = "iteration t";
        pc.y_label = "sets";
        pc.log_y = true;
        pc.series = {{"active sets", ts, counts}};
        write_text(cfg.out_dir / (stem + "_sets.svg"), render_line_plot(pc));

        overview.cell(level).cell(c.recovered).cell(c.iterations).cell(c.stabilized).cell(c.a_err)
            .cell(c.theta_err).cell(c.final_mu_between).cell(summary.true_angle_coherence)
            .cell(c.status);
        overview.end_row();
        summary.cases.push_back(std::move(c));
    }
    overview.write(cfg.out_dir / "offgrid_adaptive_summary.csv");

    CsvTable truth({"theta", "phi", "amplitude"});
    for (std::size_t j = 0; j < summary.truth.size(); ++j) {
        const auto& d = summary.truth.directions[j];
        double th = std::atan2(d[1], d[0]);
        if (th < 0.0) th += 2.0 * kPi;
        truth.cell(th).cell(std::acos(std::clamp(d[2], -1.0, 1.0))).cell(summary.truth.amplitudes[j].real());
        truth.end_row();
    }
    truth.write(cfg.out_dir / "offgrid_adaptive_truth.csv");
    return summary;
}

// --------------------------------------------------------------------------
// coherence report

CoherenceSummary run_coherence_report(const ExperimentConfig& cfg)
{
    cfg.validate();
    const AngleGrid grid = cfg.scene.grid.size() == 1 ? grid_1d(cfg.scene.grid[0])
                                                      : grid_2d(cfg.scene.grid[0], cfg.scene.grid[1]);
    const std::size_t n = grid.size();
    const auto det = fibonacci_sphere_detectors(cfg.scene.detectors, cfg.scene.omega_r.front());
    const ComplexMatrix a = sensing_matrix(det, grid);
    const CoherenceTable table(a);

    CoherenceSummary summary;
    summary.mu = table.mutual();
    summary.sinc_estimate = grid_sinc_estimate(cfg.scene.omega_r.front(), grid.h_theta);

    CsvTable gram({"i", "j", "coherence"});
    std::vector<double> full(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) full[i * n + j] = i == j ? 0.0 : table(i, j);
        for (std::size_t j = i + 1; j < n; ++j) {
            gram.cell(i).cell(j).cell(table(i, j));
            gram.end_row();
        }
    }
    gram.write(cfg.out_dir / "coherence_gram.csv");
    write_text(cfg.out_dir / "coherence_gram.svg",
               render_heatmap(full, n, n, "normalized Gram magnitudes"));

    CsvTable t({"quantity", "set_a", "set_b", "value"});
    auto row = [&t](const std::string& q, std::size_t sa, std::size_t sb, double v) {
        t.cell(q).cell(sa).cell(sb).cell(v);
        t.end_row();
    };
    row("mu", 0, 0, summary.mu);
    row("sinc_estimate", 0, 0, summary.sinc_estimate);

    std::vector<IndexSet> sets = cfg.coherence.sets;
    if (sets.empty() && cfg.coherence.uniform_split > 0) {
        sets = SparsityStructure::uniform_split(n, cfg.coherence.uniform_split).sets();
    }
    if (!sets.empty()) {
        std::vector<std::size_t> ones(sets.size(), 1);
        const SparsityStructure ss(sets, ones, n);
        const auto rep = coherence_report(table, ss);
        summary.mu_within = rep.mu_within;
        summary.mu_between = rep.mu_between;
        summary.rho = rep.rho;
        summary.rho_tilde = rep.rho_tilde;
        summary.column_rate = rep.column_rate;
        summary.aggregate_rate = rep.aggregate_rate();
        for (std::size_t i = 0; i < sets.size(); ++i) row("mu_within", i + 1, i + 1, rep.mu_within[i]);
        for (std::size_t i = 0; i < sets.size(); ++i) {
            for (std::size_t j = i + 1; j < sets.size(); ++j) row("mu_between", i + 1, j + 1, rep.mu_between[i][j]);
        }
        row("rho_unit_budgets", 0, 0, rep.rho);
        row("rho_tilde_unit_budgets", 0, 0, rep.rho_tilde);
    }
    t.write(cfg.out_dir / "coherence_summary.csv");
    return summary;
}

void run_experiment(const ExperimentConfig& cfg)
{
    switch (cfg.kind) {
    case ExperimentKind::ToyBounds: run_toy_bounds(cfg); return;
    case ExperimentKind::SuccessProb: run_success_prob(cfg); return;
    case ExperimentKind::Masked2d: run_masked_2d(cfg); return;
    case ExperimentKind::Offgrid1d: run_offgrid_1d(cfg); return;
    case ExperimentKind::OffgridAdaptive: run_offgrid_adaptive(cfg); return;
    case ExperimentKind::CoherenceReport: run_coherence_report(cfg); return;
    }
}

} // namespace siht
