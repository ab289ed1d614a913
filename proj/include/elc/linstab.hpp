#pragma once

#include <array>
#include <complex>
#include <optional>
#include <utility>

#include "elc/coefficients.hpp"

namespace elc {

using Vec3 = std::array<double, 3>;

/// Leslie coefficients together with the perturbation parameter epsilon that places them
/// in the unstable, non-Parodi family.
struct LeslieUnstableParams {
    LeslieCoefficients mu;
    double epsilon_leslie = 0.0;
};

/// Throws DomainError naming the first violated bound (Le1, Le2, Le3a, Le3).
void validate_unstable_params(const LeslieUnstableParams& params);
/// Additionally checks Le4 and Le5 at theta0.
void validate_instability_bounds(const LeslieUnstableParams& params, double theta0);

/// Fourier plane-wave mode exp(i (m nu.x - omega t)) of the linearized system. With the
/// sign conventions used here, C is the amplitude of the pressure perturbation and D the
/// amplitude of the director tension.
struct PlaneWaveMode {
    double theta = 0.0;
    double m = 0.0;
    Vec3 nu{};
    Vec3 n{};
    Vec3 a{};
    Vec3 b{};
    std::complex<double> omega;
    std::complex<double> C;
    std::complex<double> D;
    double growth_rate = 0.0;
};

struct Gpq {
    double g = 0.0;
    double p = 0.0;
    double q = 0.0;
};

Gpq gpq(double theta, const LeslieCoefficients& mu);

/// The angle where p and q vanish together; empty unless Parodi's relation holds.
std::optional<double> solve_pq_system(const LeslieCoefficients& mu);

/// Root of q in (0, pi/2) for the unstable family.
double solve_theta0_unstable(const LeslieUnstableParams& params);

/// Both roots of lambda1 w^2 + i m^2 (lambda1 g/2 + p q/2 - 1) w + m^4 g / 2 = 0,
/// ordered by increasing imaginary part.
std::pair<std::complex<double>, std::complex<double>> dispersion_roots(double m, double theta,
                                                                      const LeslieCoefficients& mu);

/// Value of the quadratic at omega.
std::complex<double> dispersion_residual(std::complex<double> omega, double m, double theta,
                                         const LeslieCoefficients& mu);

bool is_stable(const std::pair<std::complex<double>, std::complex<double>>& roots, double tol = 1e-12);

/// nu = (cos phi, sin phi, 0) and n in the same plane with nu.n = sin(theta).
std::pair<Vec3, Vec3> in_plane_geometry(double theta, double phi);

PlaneWaveMode unstable_mode(const LeslieUnstableParams& params, double m, const Vec3& nu, const Vec3& n);

/// Relative residual of each linearized equation evaluated on the mode.
struct LinearizedResidual {
    double momentum = 0.0;
    double incompressibility = 0.0;
    double director = 0.0;
    double constraint = 0.0;
    double max() const;
};

LinearizedResidual linearized_residual(const PlaneWaveMode& mode, const LeslieCoefficients& mu);

}  // namespace elc
