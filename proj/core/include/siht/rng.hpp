#pragma once

#include <cstdint>

namespace siht {

/// Counter-based generator built on the SplitMix64 finalizer.
///
/// Output i of a stream with key K is mix(K + (i + 1) * 0x9E3779B97F4A7C15),
/// where mix is the SplitMix64 finalizer. `split(id)` derives an independent
/// stream keyed by mix(K ^ mix(id + 0xD1B54A32D192ED03)). Uniform doubles take
/// the top 53 bits; normals use Box-Muller on two consecutive uniforms and
/// return both variates in order.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : key_(mix(seed)) {}

    static std::uint64_t mix(std::uint64_t z) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform in [0, 1).
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept;
    double normal() noexcept;
    double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }

    CounterRng split(std::uint64_t stream_id) const noexcept;

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    struct FromKey {};
    CounterRng(FromKey, std::uint64_t key) noexcept : key_(key) {}

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace siht
