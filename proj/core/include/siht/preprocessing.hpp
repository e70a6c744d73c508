#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "siht/isp_model.hpp"
#include "siht/numerics.hpp"
#include "siht/thresholding.hpp"

namespace siht {

/// { j : |x_j| > factor * mean(|x|) }, ascending.
IndexSet mask_by_mean_multiple(std::span<const cplx> x, double factor);

enum class Adjacency { Four, Eight };

/// Connected components of `mask` on the (theta, phi) lattice of `grid`.
/// Theta wraps around, phi does not. Regions are sorted internally and ordered
/// by their lowest index.
std::vector<IndexSet> connected_regions(std::span<const std::size_t> mask, const AngleGrid& grid,
                                        Adjacency adjacency = Adjacency::Four);

/// Region mass sum_{j in r} |x_j|.
std::vector<double> region_masses(std::span<const cplx> x, const std::vector<IndexSet>& regions);

/// Budgets from region masses: one per region, then each remaining unit goes to
/// the region with the largest mass / assigned ratio (ties: lowest region).
/// Regions already at full size are skipped. TooFewSources if k_total is below
/// the region count.
std::vector<std::size_t> distribute_budgets(std::span<const double> masses,
                                            std::span<const std::size_t> capacities,
                                            std::size_t k_total);

/// Structure over `regions` with budgets from distribute_budgets.
SparsityStructure assign_budgets(std::span<const cplx> x, const std::vector<IndexSet>& regions,
                                 std::size_t k_total);

} // namespace siht
