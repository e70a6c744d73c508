#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "siht/numerics.hpp"
#include "siht/rng.hpp"

namespace siht {

using Vec3 = std::array<double, 3>;

/// Polar angle theta in [0, 2pi) around z, azimuthal phi in [0, pi] from +z.
struct SphericalAngle {
    double theta = 0.0;
    double phi = 0.0;
};

/// (cos th sin ph, sin th sin ph, cos ph)
Vec3 direction(const SphericalAngle& a);
double dot(const Vec3& a, const Vec3& b);
double distance(const Vec3& a, const Vec3& b);

/// Detector directions on a sphere of radius R. Only the product omega*R enters
/// the model, so the array stores unit directions and omega_r.
struct DetectorArray {
    double omega_r = 1.0;
    std::vector<Vec3> directions;

    std::size_t size() const noexcept { return directions.size(); }
};

/// Candidate incident directions. For a 2D grid, index j = m + n_theta * n
/// (0-based m, n); a 1D grid has n_phi = 1 and phi fixed at pi/2.
struct AngleGrid {
    std::vector<Vec3> directions;
    std::vector<SphericalAngle> coords;
    double h_theta = 0.0;
    double h_phi = 0.0;
    std::size_t n_theta = 0;
    std::size_t n_phi = 1;

    std::size_t size() const noexcept { return directions.size(); }
    std::size_t index(std::size_t m, std::size_t n) const noexcept { return m + n_theta * n; }
    std::size_t theta_index(std::size_t j) const noexcept { return j % n_theta; }
    std::size_t phi_index(std::size_t j) const noexcept { return j / n_theta; }
};

/// Incident plane waves: directions and complex amplitudes.
struct SourceSet {
    std::vector<Vec3> directions;
    std::vector<cplx> amplitudes;

    std::size_t size() const noexcept { return directions.size(); }
};

/// Fibonacci lattice: phi_m = acos(1 - 2(m + 0.5)/M), theta_m = 2 pi m / golden.
DetectorArray fibonacci_sphere_detectors(std::size_t m, double omega_r);

/// N equatorial directions; grid index j carries theta = 2 pi (j + 1) / N
/// (reduced mod 2 pi), so j is the 1-based label minus one.
AngleGrid grid_1d(std::size_t n);

/// N1 x N2 grid, theta_m = 2 pi m / N1 and phi_n = pi n / N2 for 1-based m, n.
/// The last phi row sits on the pole, where all N1 directions coincide.
AngleGrid grid_2d(std::size_t n_theta, std::size_t n_phi);

/// Grid from explicit directions (spacings left at zero).
AngleGrid grid_from_angles(std::span<const SphericalAngle> coords);

/// A_mj = exp(i omega_r d_m . Phi_j) / sqrt(M); every column has unit norm.
ComplexMatrix sensing_matrix(const DetectorArray& det, const AngleGrid& grid);
ComplexMatrix sensing_matrix(const DetectorArray& det, std::span<const Vec3> directions);

struct SynthesizedData {
    ComplexVector b;     // measurements including noise
    ComplexVector noise; // the injected epsilon
};

/// b_m = sum_j a_j exp(i omega_r d_m . Theta_j) / sqrt(M) + eps_m, with eps complex
/// Gaussian rescaled so ||eps|| = noise_level * ||b_clean||.
SynthesizedData synthesize_data(const DetectorArray& det, const SourceSet& sources,
                                double noise_level, std::uint64_t seed);

/// Complex circular Gaussian draws (re + i im)/sqrt(2) rescaled so the result
/// has norm level * ||clean||. Zero vector when level is zero.
ComplexVector relative_noise(std::span<const cplx> clean, double level, CounterRng& rng);

/// Sparse vector on `grid_indices` with the given amplitudes.
ComplexVector sparse_vector(std::size_t n, std::span<const std::size_t> grid_indices,
                            std::span<const cplx> amplitudes);

} // namespace siht
