#include "elc/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "elc/errors.hpp"

namespace elc {

LeslieCoefficients LeslieCoefficients::from_array(const std::array<double, 6>& mu, double eps) {
    return {mu[0], mu[1], mu[2], mu[3], mu[4], mu[5], eps};
}

LeslieCoefficients LeslieCoefficients::scaled(double c) const {
    return {c * mu1, c * mu2, c * mu3, c * mu4, c * mu5, c * mu6, eps_penalty};
}

double LeslieCoefficients::abs_sum() const {
    return std::abs(mu1) + std::abs(mu2) + std::abs(mu3) + std::abs(mu4) + std::abs(mu5) +
           std::abs(mu6);
}

DerivedConstants derive_constants(const LeslieCoefficients& mu) {
    DerivedConstants out;
    out.lambda1 = mu.lambda1();
    out.lambda2 = mu.lambda2();
    out.parodi_defect = mu.parodi_defect();
    if (out.lambda1 != 0.0) out.alpha = 0.5 * (1.0 - out.lambda2 / out.lambda1);
    return out;
}

std::string to_string(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::CaseI: return "CaseI";
        case RegimeTag::CaseII: return "CaseII";
        case RegimeTag::Neither: return "Neither";
    }
    return "Neither";
}

double default_parodi_tolerance(const LeslieCoefficients& mu) {
    return 1e-12 * std::max(1.0, mu.abs_sum());
}

bool satisfies_parodi(const LeslieCoefficients& mu) {
    return satisfies_parodi(mu, default_parodi_tolerance(mu));
}

bool satisfies_parodi(const LeslieCoefficients& mu, double tol) {
    return std::abs(mu.parodi_defect()) <= tol;
}

namespace {

bool sign_conditions(const LeslieCoefficients& mu) {
    return mu.lambda1() < 0.0 && mu.mu5 + mu.mu6 >= 0.0 && mu.mu1 >= 0.0 && mu.mu4 > 0.0;
}

// Comparisons between quadratic quantities get a relative slack so that analytically
// critical sets (lambda2^2 == -lambda1 (mu5+mu6)) survive floating-point input.
double quadratic_slack(const LeslieCoefficients& mu) {
    const double s = std::max(1.0, mu.abs_sum());
    return 1e-12 * s * s;
}

double margin_unchecked(const LeslieCoefficients& mu) {
    const double a = -mu.lambda1();
    const double b = mu.mu5 + mu.mu6;
    const double c = 0.5 * (mu.lambda2() - mu.mu2 - mu.mu3);
    const double det = a * b - c * c;
    const double half_trace = 0.5 * (a + b);
    const double lam_max = half_trace + std::hypot(0.5 * (a - b), c);
    if (lam_max <= 0.0) return half_trace - std::hypot(0.5 * (a - b), c);
    return det / lam_max;
}

}  // namespace

Regime classify_regime(const LeslieCoefficients& mu) {
    return classify_regime(mu, default_parodi_tolerance(mu));
}

Regime classify_regime(const LeslieCoefficients& mu, double tol) {
    if (tol < 0.0) throw UsageError("classify_regime: tolerance must be non-negative");
    if (!sign_conditions(mu)) return {RegimeTag::Neither, 0.0};

    const double lam1 = mu.lambda1();
    const double lam2 = mu.lambda2();
    const double margin = margin_unchecked(mu);

    if (satisfies_parodi(mu, tol) &&
        lam2 * lam2 <= -lam1 * (mu.mu5 + mu.mu6) + quadratic_slack(mu)) {
        return {RegimeTag::CaseI, margin};
    }
    const double cross = std::abs(lam2 - mu.mu2 - mu.mu3);
    if (cross < 2.0 * std::sqrt(-lam1) * std::sqrt(mu.mu5 + mu.mu6)) {
        return {RegimeTag::CaseII, margin};
    }
    return {RegimeTag::Neither, 0.0};
}

double dissipation_margin(const LeslieCoefficients& mu) {
    if (!(mu.lambda1() < 0.0)) {
        std::ostringstream os;
        os << "dissipation_margin: lambda1 = " << mu.lambda1() << " >= 0 violates (lama1a) lambda1 < 0";
        throw DomainError(os.str());
    }
    if (!(mu.mu5 + mu.mu6 >= 0.0)) {
        std::ostringstream os;
        os << "dissipation_margin: mu5 + mu6 = " << mu.mu5 + mu.mu6 << " < 0 violates (mu56)";
        throw DomainError(os.str());
    }
    return margin_unchecked(mu);
}

void require_simulation_admissible(const LeslieCoefficients& mu) {
    std::ostringstream os;
    if (!(mu.eps_penalty > 0.0)) {
        os << "eps_penalty = " << mu.eps_penalty << " must be positive";
        throw DomainError(os.str());
    }
    if (!(mu.lambda1() < 0.0)) {
        os << "lambda1 = mu2 - mu3 = " << mu.lambda1() << " >= 0 violates (lama1a) lambda1 < 0";
        throw DomainError(os.str());
    }
    if (!(mu.mu4 > 0.0)) {
        os << "mu4 = " << mu.mu4 << " <= 0 violates (mu14) mu4 > 0";
        throw DomainError(os.str());
    }
    if (!(mu.mu1 >= 0.0)) {
        os << "mu1 = " << mu.mu1 << " < 0 violates (mu14) mu1 >= 0";
        throw DomainError(os.str());
    }
}

std::string to_string(MoleculeShape kind) {
    switch (kind) {
        case MoleculeShape::RodLike: return "rod";
        case MoleculeShape::DiscLike: return "disc";
        case MoleculeShape::SphereLike: return "sphere";
    }
    return "sphere";
}

MoleculeShape molecule_shape_from_string(const std::string& name) {
    if (name == "rod" || name == "RodLike") return MoleculeShape::RodLike;
    if (name == "disc" || name == "DiscLike") return MoleculeShape::DiscLike;
    if (name == "sphere" || name == "SphereLike") return MoleculeShape::SphereLike;
    throw UsageError("unknown molecule shape '" + name + "' (expected rod, disc or sphere)");
}

LeslieCoefficients simplified_model(MoleculeShape kind, double lambda1,
                                    const LeslieCoefficients& base) {
    if (!(lambda1 < 0.0)) {
        std::ostringstream os;
        os << "simplified_model: lambda1 = " << lambda1 << " >= 0 violates (lama1a) lambda1 < 0";
        throw DomainError(os.str());
    }
    double lambda2 = 0.0;
    switch (kind) {
        case MoleculeShape::RodLike: lambda2 = -lambda1; break;
        case MoleculeShape::DiscLike: lambda2 = lambda1; break;
        case MoleculeShape::SphereLike: lambda2 = 0.0; break;
    }
    const double ratio = lambda2 * lambda2 / lambda1;
    LeslieCoefficients out;
    out.mu1 = 0.0;
    out.mu2 = 0.5 * (lambda1 - lambda2);
    out.mu3 = -0.5 * (lambda1 + lambda2);
    out.mu4 = base.mu4;
    out.mu5 = 0.5 * (lambda2 - ratio);
    out.mu6 = -0.5 * (lambda2 + ratio);
    out.eps_penalty = base.eps_penalty;
    return out;
}

}  // namespace elc
