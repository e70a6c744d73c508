#include "siht/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "siht/error.hpp"

namespace siht {

namespace {

struct KindName {
    ExperimentKind kind;
    std::string_view name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::ToyBounds, "toy_bounds"},
    {ExperimentKind::SuccessProb, "success_prob"},
    {ExperimentKind::Masked2d, "masked_2d"},
    {ExperimentKind::Offgrid1d, "offgrid_1d"},
    {ExperimentKind::OffgridAdaptive, "offgrid_adaptive"},
    {ExperimentKind::CoherenceReport, "coherence_report"},
};

IndexSet range(std::size_t first, std::size_t last)
{
    IndexSet s;
    for (std::size_t j = first; j <= last; ++j) s.push_back(j);
    return s;
}

[[noreturn]] void config_error(const std::string& what)
{
    fail(ErrorCode::ConfigError, what);
}

void check_keys(const YAML::Node& node, const std::string& where, std::set<std::string> allowed)
{
    if (!node) return;
    if (!node.IsMap()) config_error(where + " must be a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
    }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out)
{
    if (node && node[key]) out = node[key].as<T>();
}

template <class T>
void read_list(const YAML::Node& node, const char* key, std::vector<T>& out)
{
    if (!node || !node[key]) return;
    const auto n = node[key];
    if (n.IsScalar()) {
        out = {n.as<T>()};
        return;
    }
    if (!n.IsSequence()) config_error(std::string(key) + " must be a list");
    out.clear();
    for (const auto& v : n) out.push_back(v.as<T>());
}

void read_ranges(const YAML::Node& node, const char* key, std::vector<IndexSet>& out)
{
    if (!node || !node[key]) return;
    const auto n = node[key];
    if (!n.IsSequence()) config_error(std::string(key) + " must be a list of [first, last] ranges");
    out.clear();
    for (const auto& r : n) {
        if (!r.IsSequence() || r.size() != 2) {
            config_error(std::string(key) + " entries must be [first, last]");
        }
        const auto first = r[0].as<std::size_t>();
        const auto last = r[1].as<std::size_t>();
        if (last < first) config_error(std::string(key) + " range has last < first");
        out.push_back(range(first, last));
    }
}

} // namespace

std::string_view to_string(ExperimentKind kind) noexcept
{
    for (const auto& k : kKinds) {
        if (k.kind == kind) return k.name;
    }
    return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view name) noexcept
{
    std::string s(name);
    for (auto& ch : s) {
        if (ch == '-') ch = '_';
    }
    for (const auto& k : kKinds) {
        if (k.name == s) return k.kind;
    }
    return std::nullopt;
}

ExperimentConfig default_config(ExperimentKind kind)
{
    ExperimentConfig c;
    c.kind = kind;
    c.out_dir = std::string("out/") + std::string(to_string(kind));
    c.toy.support = {103, 105, 164};
    c.toy.sets = {range(97, 111), range(158, 170)};
    c.toy.budgets = {2, 1};
    c.coherence.sets = c.toy.sets;
    for (std::size_t k = 5; k <= 100; k += 5) c.success.k_values.push_back(k);
    c.success.splits = {2, 5, 10, 20};
    for (std::size_t n = 15; n <= 400; n += 5) c.offgrid_1d.sweep.push_back(n);
    c.adaptive.noise_levels = {0.0, 0.01};
    c.solver.max_iters = 500;
    c.solver.residual_tol = 1e-12;
    c.solver.stagnation_tol = 1e-12;

    switch (kind) {
    case ExperimentKind::ToyBounds:
        c.scene = {{275.0, 88.0}, 100, {200}};
        c.solver.stagnation_tol = 0.0;
        c.solver.residual_tol = 0.0;
        break;
    case ExperimentKind::SuccessProb:
        c.scene = {{275.0}, 400, {1000}};
        c.noise_level = 0.05;
        c.solver.max_iters = 300;
        c.solver.residual_tol = 1e-10;
        c.solver.stagnation_tol = 1e-9;
        break;
    case ExperimentKind::Masked2d:
        c.scene = {{10.0}, 100, {40, 20}};
        c.solver.max_iters = 1000;
        break;
    case ExperimentKind::Offgrid1d:
        c.scene = {{40.0}, 100, {15}};
        break;
    case ExperimentKind::OffgridAdaptive:
        c.scene = {{4.0}, 100, {20, 10}};
        break;
    case ExperimentKind::CoherenceReport:
        c.scene = {{275.0}, 100, {200}};
        break;
    }
    return c;
}

void ExperimentConfig::validate() const
{
    if (trials < 1) config_error("trials must be at least 1");
    if (!(noise_level >= 0.0)) config_error("noise_level must be nonnegative");
    if (scene.omega_r.empty()) config_error("scene.omega_r is empty");
    for (double w : scene.omega_r) {
        if (!(w > 0.0)) config_error("scene.omega_r values must be positive");
    }
    if (scene.detectors < 1) config_error("scene.detectors must be at least 1");
    if (scene.grid.empty() || scene.grid.size() > 2) config_error("scene.grid must be [N] or [N1, N2]");
    for (auto g : scene.grid) {
        if (g < 2) config_error("scene.grid sizes must be at least 2");
    }
    try {
        solver.validate();
    } catch (const Error& e) {
        config_error(std::string("solver: ") + e.what());
    }

    switch (kind) {
    case ExperimentKind::ToyBounds:
        if (scene.grid.size() != 1) config_error("toy_bounds needs a 1D grid");
        if (toy.sets.size() != toy.budgets.size()) config_error("toy_bounds.sets vs budgets");
        if (toy.support.empty()) config_error("toy_bounds.support is empty");
        if (toy.iterations < 1) config_error("toy_bounds.iterations must be at least 1");
        break;
    case ExperimentKind::SuccessProb:
        if (scene.grid.size() != 1) config_error("success_prob needs a 1D grid");
        if (success.k_values.empty()) config_error("success_prob.k_values is empty");
        for (auto k : success.k_values) {
            if (k < 1 || k > scene.grid[0]) config_error("success_prob.k_values out of range");
        }
        for (auto l : success.splits) {
            if (l < 1 || scene.grid[0] % l != 0) {
                config_error("success_prob.splits must divide the grid size");
            }
        }
        break;
    case ExperimentKind::Masked2d:
        if (scene.grid.size() != 2) config_error("masked_2d needs a 2D grid");
        if (masked.sources < 1) config_error("masked_2d.sources must be at least 1");
        if (!(masked.amplitude_min > 0.0 && masked.amplitude_max >= masked.amplitude_min)) {
            config_error("masked_2d amplitude range");
        }
        if (!(masked.mask_factor > 0.0)) config_error("masked_2d.mask_factor must be positive");
        break;
    case ExperimentKind::Offgrid1d:
        if (offgrid_1d.sources < 1) config_error("offgrid_1d.sources must be at least 1");
        if (offgrid_1d.initial_points % offgrid_1d.sources != 0) {
            config_error("offgrid_1d.initial_points must be a multiple of sources");
        }
        for (auto n : offgrid_1d.sweep) {
            if (n % offgrid_1d.sources != 0) config_error("offgrid_1d.sweep values must be multiples of sources");
        }
        if (!(offgrid_1d.alpha > 1.0 && offgrid_1d.alpha <= 2.0)) config_error("offgrid_1d.alpha must lie in (1, 2]");
        break;
    case ExperimentKind::OffgridAdaptive:
        if (scene.grid.size() != 2) config_error("offgrid_adaptive needs a 2D grid");
        if (adaptive.sources < 1 || adaptive.k_floor < 1) config_error("offgrid_adaptive counts must be at least 1");
        if (!(adaptive.c > 0.0 && adaptive.c < 1.0)) config_error("offgrid_adaptive.c must lie in (0, 1)");
        if (!(adaptive.alpha > 1.0 && adaptive.alpha <= 2.0)) config_error("offgrid_adaptive.alpha must lie in (1, 2]");
        if (adaptive.noise_levels.empty()) config_error("offgrid_adaptive.noise_levels is empty");
        for (double v : adaptive.noise_levels) {
            if (!(v >= 0.0)) config_error("offgrid_adaptive.noise_levels must be nonnegative");
        }
        break;
    case ExperimentKind::CoherenceReport:
        break;
    }
}

ExperimentConfig parse_config(std::string_view text, std::optional<ExperimentKind> expected)
{
    try {
        const YAML::Node root = YAML::Load(std::string(text));
        if (root.IsNull()) {
            if (!expected) config_error("empty config and no experiment given");
            auto c = default_config(*expected);
            c.validate();
            return c;
        }
        check_keys(root, "config",
                   {"experiment", "seed", "output", "trials", "noise_level", "scene", "solver",
                    "toy_bounds", "success_prob", "masked_2d", "offgrid_1d", "offgrid_adaptive",
                    "coherence_report"});

        std::optional<ExperimentKind> kind = expected;
        if (root["experiment"]) {
            const auto name = root["experiment"].as<std::string>();
            kind = parse_kind(name);
            if (!kind) config_error("unknown experiment '" + name + "'");
            if (expected && *expected != *kind) {
                config_error("config is for '" + name + "', not '" + std::string(to_string(*expected)) + "'");
            }
        }
        if (!kind) config_error("config has no 'experiment' key");

        ExperimentConfig c = default_config(*kind);
        read(root, "seed", c.seed);
        if (root["output"]) c.out_dir = root["output"].as<std::string>();
        read(root, "trials", c.trials);
        read(root, "noise_level", c.noise_level);

        const auto scene = root["scene"];
        check_keys(scene, "scene", {"omega_r", "detectors", "grid"});
        read_list(scene, "omega_r", c.scene.omega_r);
        read(scene, "detectors", c.scene.detectors);
        read_list(scene, "grid", c.scene.grid);

        const auto solver = root["solver"];
        check_keys(solver, "solver", {"max_iters", "residual_tol", "stagnation_tol", "zero_outside",
                                      "parallel_sets"});
        read(solver, "max_iters", c.solver.max_iters);
        read(solver, "residual_tol", c.solver.residual_tol);
        read(solver, "stagnation_tol", c.solver.stagnation_tol);
        read(solver, "zero_outside", c.solver.zero_outside);
        read(solver, "parallel_sets", c.solver.parallel_sets);

        const auto toy = root["toy_bounds"];
        check_keys(toy, "toy_bounds", {"support", "sets", "budgets", "iterations"});
        read_list(toy, "support", c.toy.support);
        read_ranges(toy, "sets", c.toy.sets);
        read_list(toy, "budgets", c.toy.budgets);
        read(toy, "iterations", c.toy.iterations);

        const auto sp = root["success_prob"];
        check_keys(sp, "success_prob", {"k_values", "splits"});
        read_list(sp, "k_values", c.success.k_values);
        read_list(sp, "splits", c.success.splits);

        const auto m2 = root["masked_2d"];
        check_keys(m2, "masked_2d", {"sources", "amplitude_min", "amplitude_max", "min_separation",
                                     "mask_factor", "lambda", "inflate"});
        read(m2, "sources", c.masked.sources);
        read(m2, "amplitude_min", c.masked.amplitude_min);
        read(m2, "amplitude_max", c.masked.amplitude_max);
        read(m2, "min_separation", c.masked.min_separation);
        read(m2, "mask_factor", c.masked.mask_factor);
        if (m2 && m2["lambda"]) c.masked.lambda = m2["lambda"].as<double>();
        read(m2, "inflate", c.masked.inflate);

        const auto o1 = root["offgrid_1d"];
        check_keys(o1, "offgrid_1d", {"sweep", "sources", "initial_points", "iterations", "alpha"});
        read_list(o1, "sweep", c.offgrid_1d.sweep);
        read(o1, "sources", c.offgrid_1d.sources);
        read(o1, "initial_points", c.offgrid_1d.initial_points);
        read(o1, "iterations", c.offgrid_1d.iterations);
        read(o1, "alpha", c.offgrid_1d.alpha);

        const auto oa = root["offgrid_adaptive"];
        check_keys(oa, "offgrid_adaptive", {"sources", "k_floor", "c", "alpha", "iterations",
                                            "stable_window", "amplitude_mean", "amplitude_sd",
                                            "min_separation", "noise_levels"});
        read(oa, "sources", c.adaptive.sources);
        read(oa, "k_floor", c.adaptive.k_floor);
        read(oa, "c", c.adaptive.c);
        read(oa, "alpha", c.adaptive.alpha);
        read(oa, "iterations", c.adaptive.iterations);
        read(oa, "stable_window", c.adaptive.stable_window);
        read(oa, "amplitude_mean", c.adaptive.amplitude_mean);
        read(oa, "amplitude_sd", c.adaptive.amplitude_sd);
        read(oa, "min_separation", c.adaptive.min_separation);
        read_list(oa, "noise_levels", c.adaptive.noise_levels);

        const auto cr = root["coherence_report"];
        check_keys(cr, "coherence_report", {"sets", "uniform_split"});
        read_ranges(cr, "sets", c.coherence.sets);
        read(cr, "uniform_split", c.coherence.uniform_split);
        if (cr && cr["uniform_split"] && !cr["sets"]) c.coherence.sets.clear();

        c.validate();
        return c;
    } catch (const YAML::Exception& e) {
        config_error(std::string("YAML: ") + e.what());
    }
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentKind> expected)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) config_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), expected);
}

} // namespace siht
