#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "elc/coefficients.hpp"
#include "elc/solver.hpp"

namespace elc {

struct EnergyReport {
    double t = 0.0;
    double E_total = 0.0;
    double E_kin = 0.0;
    double E_grad = 0.0;
    double E_penalty = 0.0;
    /// ||grad v||^2 + ||Laplacian d - f(d)||^2
    double A = 0.0;
    double diss_mu1 = 0.0;
    double diss_mu4 = 0.0;
    /// -(1/l1) ||G||^2 under Parodi; -l1 ||N||^2 - (l2 - mu2 - mu3)(N, Ad) otherwise.
    double diss_director = 0.0;
    /// (mu5 + mu6 + l2^2/l1) ||Ad||^2 under Parodi; (mu5 + mu6) ||Ad||^2 otherwise.
    double diss_Ad = 0.0;
    /// Filled by energy_law_residual; NaN where no centered difference exists.
    double law_residual = 0.0;

    // Building blocks kept for the inequality check.
    double G_sq = 0.0;
    double N_sq = 0.0;
    double Ad_sq = 0.0;
    double N_Ad = 0.0;
    bool parodi = true;

    /// dE/dt predicted by the energy law.
    double dissipation() const { return diss_mu1 + diss_mu4 + diss_director + diss_Ad; }
};

/// G = Laplacian d - f(d).
VectorField molecular_field(const VectorField& d, double eps_penalty);
/// Director rate reconstructed from the d-equation.
VectorField director_rate(const State& s, const LeslieCoefficients& mu);

EnergyReport energy_report(const State& s, const LeslieCoefficients& mu);

/// Centered-difference dE/dt minus the predicted rate (Parodi case), or the inequality gap
/// max(0, dE/dt - bound) otherwise. Endpoints are NaN. Throws UsageError for fewer than
/// three samples or nonuniform spacing.
std::vector<double> energy_law_residual(std::span<const EnergyReport> history, const LeslieCoefficients& mu);

/// Terms of the expansion of dA/dt. I[0..13] are I1..I14 in the usual order.
struct AppendixTerms {
    std::array<double, 14> I{};
    /// Extra term present without Parodi's relation.
    double I15 = 0.0;
    /// The expansion lists -(G, v.grad f) but omits the matching +(G, f'(d) v.grad d) from the
    /// penalty derivative; the two cancel. This holds the omitted term.
    double correction = 0.0;
    /// mu1, mu4, mu5 + mu6 and lambda1 integrals on the left-hand side.
    std::array<double, 4> lhs{};
    double lhs_extra = 0.0;
    double A = 0.0;
    double closure_error = 0.0;

    double rhs_sum() const;
    /// Largest magnitude among all terms; used to normalize the closure error.
    double scale() const;
};

AppendixTerms appendix_terms(const State& s, const LeslieCoefficients& mu);

/// Terms at s0 with the closure error of the forward difference (A(s1) - A(s0)) / (t1 - t0).
AppendixTerms appendix_closure(const State& s0, const State& s1, const LeslieCoefficients& mu);

/// ||v||_H1 + ||Laplacian d - f(d)||.
double equilibrium_distance(const State& s, double eps_penalty);

struct DecaySample {
    double t = 0.0;
    double D = 0.0;
};

struct ConvergenceReport {
    std::vector<DecaySample> decay_curve;
    /// Power p in D ~ (1 + t)^(-p) fitted on the tail; empty when not applicable.
    std::optional<double> fitted_power;
    std::optional<double> r_squared;
    /// First time D(t) <= threshold * D(0); empty when never reached.
    std::optional<double> below_threshold_time;
    /// D eventually non-increasing: no increase over the second half of the samples.
    bool eventually_monotone = true;
};

ConvergenceReport convergence_monitor(std::span<const DecaySample> history, double threshold = 1e-6);

}  // namespace elc
