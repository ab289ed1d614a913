#pragma once

#include "elc/coefficients.hpp"
#include "elc/grid.hpp"
#include "elc/spectral.hpp"

namespace elc {

/// Whether a product-forming operation removes the modes above the two-thirds cutoff
/// from its result.
enum class ProductMode { Dealiased, Pointwise };

/// Ginzburg-Landau penalty force f(d) = eps^-2 (|d|^2 - 1) d.
VectorField gl_force(const VectorField& d, double eps_penalty);

/// Penalty energy density integrated over the box: int (|d|^2 - 1)^2 / (4 eps^2).
double penalty_energy(const VectorField& d, double eps_penalty);

/// (A d)_i = A_ij d_j.
VectorField contract(const TensorField& A, const VectorField& d);
/// d_i A_ij d_j.
ScalarField quadratic_form(const TensorField& A, const VectorField& d);
/// (a (x) b)_ij = a_i b_j.
TensorField outer(const VectorField& a, const VectorField& b);

struct KinematicTerms {
    VectorField N;       // d_t + (v . grad) d - Omega d
    VectorField Adotd;   // A d
    ScalarField dTAd;    // d^T A d
};

KinematicTerms kinematic_terms(const VectorField& v, const VectorField& d, const VectorField& d_t,
                               ProductMode mode = ProductMode::Dealiased);

/// Leslie viscous stress
///   mu1 (d.Ad) d(x)d + mu2 N(x)d + mu3 d(x)N + mu4 A + mu5 Ad(x)d + mu6 d(x)Ad.
/// Throws DataError when A is asymmetric beyond 1e-10.
TensorField leslie_stress(const TensorField& A, const TensorField& Omega, const VectorField& N,
                          const VectorField& d, const LeslieCoefficients& mu,
                          ProductMode mode = ProductMode::Dealiased);

/// (grad d (.) grad d)_ij = d_i d . d_j d.
TensorField ericksen_stress(const VectorField& d, ProductMode mode = ProductMode::Dealiased);

/// Conservative stress -1/2 (1 - l2/l1) G(x)d + 1/2 (1 + l2/l1) d(x)G, G = Laplacian d - f(d).
TensorField stress_split(const VectorField& d, const VectorField& G, double lambda1, double lambda2,
                         ProductMode mode = ProductMode::Dealiased);

/// Rate of energy dissipation evaluated from stress contractions:
///   int sigma : grad v - (lambda1 N + lambda2 A d, N + Omega d).
double stress_power_dissipation(const TensorField& sigma, const StrainVorticity& sv,
                                const VectorField& N, const VectorField& d,
                                const LeslieCoefficients& mu);

/// The same quantity in the completed-square form valid under Parodi's relation:
///   mu1 ||d.Ad||^2 + mu4/2 ||grad v||^2 - l1 ||N + (l2/l1) Ad||^2 + (mu5 + mu6 + l2^2/l1) ||Ad||^2.
double parodi_dissipation(const StrainVorticity& sv, const VectorField& N, const VectorField& d,
                          const LeslieCoefficients& mu);

}  // namespace elc
