#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "siht/solvers.hpp"
#include "siht/thresholding.hpp"

namespace siht {

enum class ExperimentKind {
    ToyBounds,
    SuccessProb,
    Masked2d,
    Offgrid1d,
    OffgridAdaptive,
    CoherenceReport,
};

std::string_view to_string(ExperimentKind kind) noexcept;
/// Accepts both "toy_bounds" and "toy-bounds" spellings.
std::optional<ExperimentKind> parse_kind(std::string_view name) noexcept;

struct SceneConfig {
    std::vector<double> omega_r;   // one run per value
    std::size_t detectors = 100;
    std::vector<std::size_t> grid; // {N} or {N1, N2}
};

struct ToyBoundsConfig {
    std::vector<std::size_t> support;   // 0-based grid indices
    std::vector<IndexSet> sets;
    std::vector<std::size_t> budgets;
    std::size_t iterations = 30;
};

struct SuccessProbConfig {
    std::vector<std::size_t> k_values;
    std::vector<std::size_t> splits; // L values for the structured runs
};

struct Masked2dConfig {
    std::size_t sources = 5;
    double amplitude_min = 0.4;
    double amplitude_max = 1.0;
    std::size_t min_separation = 3; // in phi spacings, great-circle distance
    double mask_factor = 7.5;
    std::optional<double> lambda;
    std::size_t inflate = 2;
};

struct Offgrid1dConfig {
    std::vector<std::size_t> sweep; // N values, each a multiple of `sources`
    std::size_t sources = 5;
    std::size_t initial_points = 15;
    std::size_t iterations = 100;
    double alpha = 1.1;
};

struct OffgridAdaptiveConfig {
    std::size_t sources = 6;
    std::size_t k_floor = 6;
    double c = 0.25;
    double alpha = 1.1;
    std::size_t iterations = 100;
    std::size_t stable_window = 5;
    double amplitude_mean = 1.0;
    double amplitude_sd = 0.2;
    double min_separation = 0.5; // direction distance between true sources
    std::vector<double> noise_levels;
};

struct CoherenceReportConfig {
    std::vector<IndexSet> sets;  // explicit structure, or
    std::size_t uniform_split = 0; // L contiguous blocks when sets is empty
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ToyBounds;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "out";
    std::size_t trials = 200;
    double noise_level = 0.0;
    SceneConfig scene;
    SolveConfig solver;

    ToyBoundsConfig toy;
    SuccessProbConfig success;
    Masked2dConfig masked;
    Offgrid1dConfig offgrid_1d;
    OffgridAdaptiveConfig adaptive;
    CoherenceReportConfig coherence;

    /// ConfigError on counts below one, negative noise, or missing fields.
    void validate() const;
};

/// Built-in defaults for each experiment.
ExperimentConfig default_config(ExperimentKind kind);

/// Parses YAML text. Keys not present keep the defaults of the selected
/// experiment. `expected` fills in the kind when the text has no `experiment` key.
ExperimentConfig parse_config(std::string_view text,
                              std::optional<ExperimentKind> expected = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<ExperimentKind> expected = std::nullopt);

} // namespace siht
