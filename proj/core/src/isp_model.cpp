#include "siht/isp_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "siht/error.hpp"
#include "siht/rng.hpp"

namespace siht {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_theta(double theta)
{
    double t = std::fmod(theta, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    if (t >= 2.0 * kPi) t = 0.0;
    return t;
}

} // namespace

Vec3 direction(const SphericalAngle& a)
{
    // The equator is used heavily by the 1D grids; keep z exactly zero there.
    const double sp = a.phi == kPi / 2 ? 1.0 : std::sin(a.phi);
    const double cp = a.phi == kPi / 2 ? 0.0 : std::cos(a.phi);
    return {std::cos(a.theta) * sp, std::sin(a.theta) * sp, cp};
}

double dot(const Vec3& a, const Vec3& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double distance(const Vec3& a, const Vec3& b)
{
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

DetectorArray fibonacci_sphere_detectors(std::size_t m, double omega_r)
{
    if (m < 1) fail(ErrorCode::ConfigError, "need at least one detector");
    if (!(omega_r > 0.0)) fail(ErrorCode::ConfigError, "omega_R must be positive");
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    DetectorArray det;
    det.omega_r = omega_r;
    det.directions.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double fi = static_cast<double>(i);
        const double phi = std::acos(1.0 - 2.0 * (fi + 0.5) / static_cast<double>(m));
        const double theta = wrap_theta(2.0 * kPi * fi / golden);
        det.directions.push_back(direction({theta, phi}));
    }
    return det;
}

AngleGrid grid_1d(std::size_t n)
{
    if (n < 2) fail(ErrorCode::ConfigError, "1D grid needs N >= 2");
    AngleGrid g;
    g.n_theta = n;
    g.n_phi = 1;
    g.h_theta = 2.0 * kPi / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const SphericalAngle a{2.0 * kPi * static_cast<double>((j + 1) % n) / static_cast<double>(n),
                               kPi / 2};
        g.coords.push_back(a);
        g.directions.push_back(direction(a));
    }
    return g;
}

AngleGrid grid_2d(std::size_t n_theta, std::size_t n_phi)
{
    if (n_theta < 2 || n_phi < 2) fail(ErrorCode::ConfigError, "2D grid needs N1, N2 >= 2");
    AngleGrid g;
    g.n_theta = n_theta;
    g.n_phi = n_phi;
    g.h_theta = 2.0 * kPi / static_cast<double>(n_theta);
    g.h_phi = kPi / static_cast<double>(n_phi);
    for (std::size_t n = 1; n <= n_phi; ++n) {
        for (std::size_t m = 1; m <= n_theta; ++m) {
            const SphericalAngle a{
                2.0 * kPi * static_cast<double>(m % n_theta) / static_cast<double>(n_theta),
                kPi * static_cast<double>(n) / static_cast<double>(n_phi)};
            g.coords.push_back(a);
            g.directions.push_back(direction(a));
        }
    }
    return g;
}

AngleGrid grid_from_angles(std::span<const SphericalAngle> coords)
{
    AngleGrid g;
    g.n_theta = coords.size();
    g.n_phi = 1;
    for (const auto& a : coords) {
        g.coords.push_back(a);
        g.directions.push_back(direction(a));
    }
    return g;
}

ComplexMatrix sensing_matrix(const DetectorArray& det, std::span<const Vec3> directions)
{
    if (det.size() == 0 || directions.empty()) {
        fail(ErrorCode::DimensionMismatch, "sensing matrix needs detectors and directions");
    }
    const std::size_t m = det.size();
    const std::size_t n = directions.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<cplx> entries(m * n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            entries[i * n + j] = std::polar(scale, det.omega_r * dot(det.directions[i], directions[j]));
        }
    }
    ComplexMatrix a(m, n, std::move(entries));
    a.mark_normalized();
    return a;
}

ComplexMatrix sensing_matrix(const DetectorArray& det, const AngleGrid& grid)
{
    return sensing_matrix(det, grid.directions);
}

SynthesizedData synthesize_data(const DetectorArray& det, const SourceSet& sources,
                                double noise_level, std::uint64_t seed)
{
    if (sources.directions.size() != sources.amplitudes.size()) {
        fail(ErrorCode::DimensionMismatch, "source directions vs amplitudes");
    }
    if (!(noise_level >= 0.0)) fail(ErrorCode::ConfigError, "noise level must be nonnegative");
    const std::size_t m = det.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));

    SynthesizedData out;
    out.b.assign(m, cplx{});
    for (std::size_t i = 0; i < m; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < sources.size(); ++j) {
            s += std::polar(scale, det.omega_r * dot(det.directions[i], sources.directions[j])) *
                 sources.amplitudes[j];
        }
        out.b[i] = s;
    }
    CounterRng rng(seed);
    out.noise = relative_noise(out.b, noise_level, rng);
    for (std::size_t i = 0; i < m; ++i) out.b[i] += out.noise[i];
    return out;
}

ComplexVector relative_noise(std::span<const cplx> clean, double level, CounterRng& rng)
{
    if (!(level >= 0.0)) fail(ErrorCode::ConfigError, "noise level must be nonnegative");
    ComplexVector e(clean.size());
    if (level == 0.0 || clean.empty()) return e;
    for (auto& v : e) {
        const double re = rng.normal();
        const double im = rng.normal();
        v = cplx{re, im} / std::sqrt(2.0);
    }
    const double scale = level * norm2(clean) / norm2(e);
    for (auto& v : e) v *= scale;
    return e;
}

ComplexVector sparse_vector(std::size_t n, std::span<const std::size_t> grid_indices,
                            std::span<const cplx> amplitudes)
{
    if (grid_indices.size() != amplitudes.size()) {
        fail(ErrorCode::DimensionMismatch, "indices vs amplitudes");
    }
    ComplexVector x(n);
    for (std::size_t j = 0; j < grid_indices.size(); ++j) {
        if (grid_indices[j] >= n) fail(ErrorCode::IndexOutOfRange, "grid index");
        x[grid_indices[j]] += amplitudes[j];
    }
    return x;
}

} // namespace siht
