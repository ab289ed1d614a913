#pragma once

#include <array>
#include <optional>
#include <string>

namespace elc {

/// The six Leslie viscosities plus the Ginzburg-Landau penalty length.
struct LeslieCoefficients {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double mu3 = 0.0;
    double mu4 = 0.0;
    double mu5 = 0.0;
    double mu6 = 0.0;
    double eps_penalty = 1.0;

    static LeslieCoefficients from_array(const std::array<double, 6>& mu, double eps = 1.0);
    std::array<double, 6> as_array() const { return {mu1, mu2, mu3, mu4, mu5, mu6}; }

    /// Same coefficients with all six viscosities multiplied by c.
    LeslieCoefficients scaled(double c) const;

    double lambda1() const { return mu2 - mu3; }
    double lambda2() const { return mu5 - mu6; }
    double parodi_defect() const { return mu2 + mu3 - mu6 + mu5; }
    double abs_sum() const;
};

struct DerivedConstants {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    /// Jeffrey shape parameter; empty when lambda1 == 0.
    std::optional<double> alpha;
    double parodi_defect = 0.0;
};

DerivedConstants derive_constants(const LeslieCoefficients& mu);

enum class RegimeTag { CaseI, CaseII, Neither };

std::string to_string(RegimeTag tag);

struct Regime {
    RegimeTag tag = RegimeTag::Neither;
    double margin = 0.0;
};

/// Default Parodi tolerance: 1e-12 * max(1, sum |mu_i|).
double default_parodi_tolerance(const LeslieCoefficients& mu);

bool satisfies_parodi(const LeslieCoefficients& mu);
bool satisfies_parodi(const LeslieCoefficients& mu, double tol);

Regime classify_regime(const LeslieCoefficients& mu);
Regime classify_regime(const LeslieCoefficients& mu, double tol);

/// Smallest eigenvalue of the 2x2 form bounding -(lambda1|N|^2 + (lambda2-mu2-mu3) N.Ad - (mu5+mu6)|Ad|^2).
/// Throws DomainError unless lambda1 < 0 and mu5 + mu6 >= 0.
double dissipation_margin(const LeslieCoefficients& mu);

/// Throws DomainError naming the violated sign condition when the coefficients cannot
/// drive a simulation (lambda1 < 0, mu4 > 0, mu1 >= 0, eps > 0).
void require_simulation_admissible(const LeslieCoefficients& mu);

enum class MoleculeShape { RodLike, DiscLike, SphereLike };

std::string to_string(MoleculeShape kind);
MoleculeShape molecule_shape_from_string(const std::string& name);

/// Reduced coefficient set at the critical lambda2 for a molecule shape. mu4 and
/// eps_penalty are copied from `base`; mu1 is zero.
LeslieCoefficients simplified_model(MoleculeShape kind, double lambda1, const LeslieCoefficients& base);

}  // namespace elc
