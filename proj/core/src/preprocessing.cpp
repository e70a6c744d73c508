#include "siht/preprocessing.hpp"

#include <algorithm>
#include <string>

#include "siht/error.hpp"

namespace siht {

IndexSet mask_by_mean_multiple(std::span<const cplx> x, double factor)
{
    if (!(factor > 0.0)) fail(ErrorCode::ConfigError, "mask factor must be positive");
    IndexSet out;
    if (x.empty()) return out;
    double mean = 0.0;
    for (const auto& v : x) mean += std::abs(v);
    mean /= static_cast<double>(x.size());
    const double cut = factor * mean;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (std::abs(x[j]) > cut) out.push_back(j);
    }
    return out;
}

std::vector<IndexSet> connected_regions(std::span<const std::size_t> mask, const AngleGrid& grid,
                                        Adjacency adjacency)
{
    const std::size_t n = grid.size();
    const std::size_t n1 = grid.n_theta;
    const std::size_t n2 = grid.n_phi;
    std::vector<char> in_mask(n, 0);
    for (auto j : mask) {
        if (j >= n) fail(ErrorCode::IndexOutOfRange, "mask index " + std::to_string(j));
        in_mask[j] = 1;
    }

    std::vector<std::pair<long, long>> steps = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    if (adjacency == Adjacency::Eight) {
        steps.insert(steps.end(), {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}});
    }

    std::vector<char> seen(n, 0);
    std::vector<IndexSet> regions;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (!in_mask[start] || seen[start]) continue;
        IndexSet region;
        stack.push_back(start);
        seen[start] = 1;
        while (!stack.empty()) {
            const std::size_t j = stack.back();
            stack.pop_back();
            region.push_back(j);
            const long m = static_cast<long>(grid.theta_index(j));
            const long p = static_cast<long>(grid.phi_index(j));
            for (auto [dm, dp] : steps) {
                const long q = p + dp;
                if (q < 0 || q >= static_cast<long>(n2)) continue;
                const long nn1 = static_cast<long>(n1);
                const long mm = ((m + dm) % nn1 + nn1) % nn1;
                const std::size_t k = grid.index(static_cast<std::size_t>(mm),
                                                 static_cast<std::size_t>(q));
                if (in_mask[k] && !seen[k]) {
                    seen[k] = 1;
                    stack.push_back(k);
                }
            }
        }
        std::sort(region.begin(), region.end());
        regions.push_back(std::move(region));
    }
    return regions;
}

std::vector<double> region_masses(std::span<const cplx> x, const std::vector<IndexSet>& regions)
{
    std::vector<double> w;
    w.reserve(regions.size());
    for (const auto& r : regions) {
        double s = 0.0;
        for (auto j : r) {
            if (j >= x.size()) fail(ErrorCode::IndexOutOfRange, "region index " + std::to_string(j));
            s += std::abs(x[j]);
        }
        w.push_back(s);
    }
    return w;
}

std::vector<std::size_t> distribute_budgets(std::span<const double> masses,
                                            std::span<const std::size_t> capacities,
                                            std::size_t k_total)
{
    const std::size_t r = masses.size();
    if (capacities.size() != r) fail(ErrorCode::DimensionMismatch, "masses vs capacities");
    if (k_total < r) {
        fail(ErrorCode::TooFewSources,
             "k_total " + std::to_string(k_total) + " < " + std::to_string(r) + " regions");
    }
    std::size_t room = 0;
    for (auto c : capacities) {
        if (c == 0) fail(ErrorCode::EmptySet, "empty region");
        room += c;
    }
    if (k_total > room) fail(ErrorCode::BudgetTooLarge, "k_total exceeds the masked cells");

    std::vector<std::size_t> k(r, 1);
    for (std::size_t left = k_total - r; left > 0; --left) {
        std::size_t best = r;
        double best_ratio = -1.0;
        for (std::size_t i = 0; i < r; ++i) {
            if (k[i] >= capacities[i]) continue;
            const double ratio = masses[i] / static_cast<double>(k[i]);
            if (ratio > best_ratio) {
                best_ratio = ratio;
                best = i;
            }
        }
        ++k[best];
    }
    return k;
}

SparsityStructure assign_budgets(std::span<const cplx> x, const std::vector<IndexSet>& regions,
                                 std::size_t k_total)
{
    const auto w = region_masses(x, regions);
    std::vector<std::size_t> caps;
    caps.reserve(regions.size());
    for (const auto& r : regions) caps.push_back(r.size());
    return SparsityStructure(regions, distribute_budgets(w, caps, k_total), x.size());
}

} // namespace siht
