#include "elc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "elc/constitutive.hpp"
#include "elc/diagnostics.hpp"
#include "elc/errors.hpp"
#include "elc/io.hpp"
#include "elc/linstab.hpp"
#include "elc/solver.hpp"

namespace elc {

namespace {

struct Ctx {
    TorusGrid grid;
    int draws;
    std::mt19937_64 rng;

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    VectorField field(double amp = 1.0) {
        VectorField f = random_band_field(grid, 2, rng());
        f *= amp;
        return f;
    }
    VectorField solenoidal() { return leray_project(field()); }
    VectorField director() {
        VectorField d = field(0.3);
        for (auto& x : d.comp(0)) x += 1.0;
        return d;
    }
    /// Random coefficients obeying Parodi's relation with lambda1 < 0.
    LeslieCoefficients parodi_set() {
        LeslieCoefficients mu;
        mu.mu1 = uniform(0.0, 1.0);
        mu.mu2 = uniform(-1.0, 0.5);
        mu.mu3 = mu.mu2 + uniform(0.1, 1.0);
        mu.mu4 = uniform(0.1, 1.0);
        mu.mu5 = uniform(-0.5, 0.5);
        mu.mu6 = mu.mu2 + mu.mu3 + mu.mu5;
        return mu;
    }
};

RunSinks sampler(std::vector<EnergyReport>& reports, const LeslieCoefficients& mu) {
    RunSinks sinks;
    sinks.on_sample = [&reports, mu](const State& s, long) { reports.push_back(energy_report(s, mu)); };
    return sinks;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

template <FieldKind K>
double rel_field(const GridField<K>& a, const GridField<K>& b) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        diff = std::max(diff, std::abs(a.values()[i] - b.values()[i]));
        scale = std::max({scale, std::abs(a.values()[i]), std::abs(b.values()[i])});
    }
    return scale > 0.0 ? diff / scale : diff;
}

CheckResult parodi_cancellation(Ctx& c) {
    double worst = 0.0;
    for (int k = 0; k < c.draws; ++k) {
        const LeslieCoefficients mu = c.parodi_set();
        const double l1 = mu.lambda1(), l2 = mu.lambda2();
        const VectorField d = c.director();
        const VectorField G = c.field();
        const StrainVorticity sv = strain_vorticity(c.solenoidal());
        const VectorField Ad = contract(sv.A, d);
        VectorField N = (-1.0 / l1) * G;
        N -= (l2 / l1) * Ad;
        const double lhs = l1 * inner(N, N) + (l2 - mu.mu2 - mu.mu3) * inner(N, Ad);
        const double rhs = inner(G, G) / l1 - (l2 * l2 / l1) * inner(Ad, Ad);
        worst = std::max(worst, rel(lhs, rhs));
    }
    return {"parodi_cancellation", worst <= 1e-12, worst, 1e-12, ""};
}

CheckResult eta_identity(Ctx& c) {
    double worst = 0.0;
    for (int k = 0; k < c.draws; ++k) {
        const double l1 = -c.uniform(0.1, 2.0), l2 = c.uniform(-2.0, 2.0);
        const VectorField d = c.director();
        const VectorField N = c.field();
        const StrainVorticity sv = strain_vorticity(c.solenoidal());
        const VectorField Ad = contract(sv.A, d);
        VectorField G = (-l1) * N;
        G -= l2 * Ad;
        const TensorField split = stress_split(d, G, l1, l2, ProductMode::Pointwise);
        const double mu2 = 0.5 * (l1 - l2), mu3 = -0.5 * (l1 + l2);
        const double eta5 = 0.5 * (l2 - l2 * l2 / l1), eta6 = -0.5 * (l2 + l2 * l2 / l1);
        TensorField expect = mu2 * outer(N, d);
        expect += mu3 * outer(d, N);
        expect += eta5 * outer(Ad, d);
        expect += eta6 * outer(d, Ad);
        worst = std::max(worst, rel_field(split, expect));
    }
    return {"stress_split_eta_identity", worst <= 1e-12, worst, 1e-12, ""};
}

CheckResult simplified_model_stress(Ctx& c) {
    double worst = 0.0;
    const MoleculeShape shapes[] = {MoleculeShape::RodLike, MoleculeShape::DiscLike, MoleculeShape::SphereLike};
    for (int k = 0; k < c.draws; ++k) {
        LeslieCoefficients base;
        base.mu4 = c.uniform(0.1, 1.0);
        const double l1 = -c.uniform(0.1, 2.0);
        const LeslieCoefficients mu = simplified_model(shapes[k % 3], l1, base);
        const double l2 = mu.lambda2();
        const VectorField d = c.director();
        const VectorField G = c.field();
        const StrainVorticity sv = strain_vorticity(c.solenoidal());
        const VectorField Ad = contract(sv.A, d);
        VectorField N = G;
        N += l2 * Ad;
        N *= -1.0 / l1;
        TensorField sigma = leslie_stress(sv.A, sv.Omega, N, d, mu, ProductMode::Pointwise);
        sigma -= mu.mu4 * sv.A;
        TensorField expect = (-mu.mu2 / l1) * outer(G, d);
        expect -= (mu.mu3 / l1) * outer(d, G);
        worst = std::max(worst, rel_field(sigma, expect));
    }
    return {"simplified_model_stress", worst <= 1e-12, worst, 1e-12, ""};
}

CheckResult dissipation_functional(Ctx& c) {
    double worst = 0.0;
    for (int k = 0; k < c.draws; ++k) {
        const LeslieCoefficients mu = c.parodi_set();
        const VectorField d = c.director();
        const VectorField N = c.field();
        const StrainVorticity sv = strain_vorticity(c.solenoidal());
        const TensorField sigma = leslie_stress(sv.A, sv.Omega, N, d, mu, ProductMode::Pointwise);
        worst = std::max(worst, rel(stress_power_dissipation(sigma, sv, N, d, mu), parodi_dissipation(sv, N, d, mu)));
    }
    return {"dissipation_functional", worst <= 1e-11, worst, 1e-11, ""};
}

CheckResult gl_gradient(Ctx& c) {
    const VectorField d = c.director();
    const VectorField w = c.field();
    const double h = 1e-5;
    VectorField dp = d, dm = d;
    dp += h * w;
    dm -= h * w;
    const double fd = (penalty_energy(dp, 1.0) - penalty_energy(dm, 1.0)) / (2.0 * h);
    const double exact = inner(gl_force(d, 1.0), w);
    const double err = rel(fd, exact);
    return {"gl_force_gradient", err <= 1e-6, err, 1e-6, ""};
}

CheckResult spectral_projection(Ctx& c) {
    const VectorField v = c.field();
    const VectorField p1 = leray_project(v);
    const VectorField p2 = leray_project(p1);
    const double idem = rel_field(p1, p2);
    const double div = norm_l2(divergence(p1)) / norm_l2(v);
    const double worst = std::max(idem, div);
    return {"leray_projection", worst <= 1e-12, worst, 1e-12, "idempotence and divergence"};
}

CheckResult rest_state(Ctx& c) {
    RunConfig cfg;
    cfg.grid = c.grid;
    cfg.mu = LeslieCoefficients::from_array({0.0, -0.5, 0.5, 1.0, 0.2, 0.2});
    cfg.dt = 1e-3;
    State s(c.grid);
    std::ranges::fill(s.d.comp(0), 0.6);
    std::ranges::fill(s.d.comp(1), 0.8);
    const State out = step(s, cfg);
    double err = std::max(out.v.max_abs(), rel_field(out.d, s.d));
    return {"rest_state_fixed_point", err <= 1e-14, err, 1e-14, ""};
}

RunConfig decay_config(const TorusGrid& grid, double t_end) {
    RunConfig cfg;
    cfg.grid = grid;
    cfg.mu = LeslieCoefficients::from_array({0.0, -0.5, 0.5, 1.0, 0.2, 0.2});
    // Anisotropic stresses are explicit: dt must shrink like h^2.
    cfg.dt = 1e-3 * std::pow(16.0 / grid.n(), 2);
    cfg.t_end = t_end;
    cfg.init = init::RandomSmooth{7, 1, 0.2, 0.2, {1.0, 0.0, 0.0}};
    return cfg;
}

CheckResult energy_decay(Ctx& c) {
    const RunConfig cfg = decay_config(c.grid, 0.2);
    std::vector<EnergyReport> reports;
    simulate(cfg, sampler(reports, cfg.mu));
    double worst = 0.0;
    const double tol = 1e-8 * std::max(1.0, reports.front().E_total);
    for (std::size_t k = 1; k < reports.size(); ++k)
        worst = std::max(worst, reports[k].E_total - reports[k - 1].E_total);
    return {"energy_monotone_caseI", worst <= tol, worst, tol, "max per-step energy increase"};
}

CheckResult energy_law(Ctx& c) {
    RunConfig cfg = decay_config(c.grid, 0.05);
    cfg.dt = std::min(cfg.dt, 1e-4);
    std::vector<EnergyReport> reports;
    simulate(cfg, sampler(reports, cfg.mu));
    const auto res = energy_law_residual(reports, cfg.mu);
    double worst = 0.0;
    for (double r : res)
        if (!std::isnan(r)) worst = std::max(worst, std::abs(r));
    worst /= std::max(1.0, reports.front().dissipation());
    return {"energy_law_residual", worst <= 1e-3, worst, 1e-3, "normalized"};
}

CheckResult appendix(Ctx& c, bool small) {
    RunConfig cfg;
    cfg.grid = TorusGrid(2, small ? 16 : 32);
    cfg.mu = LeslieCoefficients::from_array({0.3, -0.5, 0.5, 1.0, 0.2, 0.2});
    cfg.dt = 1e-5;
    cfg.init = init::RandomSmooth{11, 1, 0.5, 0.3, {1.0, 0.0, 0.0}};
    (void)c;
    Solver s(cfg);
    s.set_state(initial_state(cfg));
    const State s0 = s.state();
    s.advance();
    const AppendixTerms t = appendix_closure(s0, s.state(), cfg.mu);
    return {"appendix_closure", t.closure_error <= 1e-2, t.closure_error, 1e-2, ""};
}

CheckResult dispersion(Ctx&) {
    const LeslieCoefficients lc = LeslieCoefficients::from_array({0.0, 0.5, 1.35, 0.05, 0.0, 1.0});
    const LeslieUnstableParams params{lc, 0.15};
    const double theta0 = solve_theta0_unstable(params);
    const double m = 2.0;
    const auto roots = dispersion_roots(m, theta0, lc);
    const double g = gpq(theta0, lc).g;
    const double scale = std::pow(m, 4) * std::max(1.0, std::abs(g));
    double worst = std::max(std::abs(dispersion_residual(roots.first, m, theta0, lc)),
                            std::abs(dispersion_residual(roots.second, m, theta0, lc))) / scale;
    // CaseI stability audit.
    const LeslieCoefficients sphere = LeslieCoefficients::from_array({0.0, -0.5, 0.5, 1.0, 0.2, 0.2});
    bool stable = true;
    for (int k = 0; k <= 4; ++k)
        for (double mm : {1.0, 2.0, 4.0}) stable = stable && is_stable(dispersion_roots(mm, k * std::numbers::pi / 8, sphere));
    const bool pass = worst <= 1e-12 && stable && roots.second.imag() > 0.0;
    return {"dispersion_roots", pass, worst, 1e-12, stable ? "CaseI stable" : "CaseI root with Im > 0"};
}

CheckResult unstable_mode_residual(Ctx&) {
    const LeslieCoefficients lc = LeslieCoefficients::from_array({0.0, 0.5, 1.35, 0.05, 0.0, 1.0});
    const LeslieUnstableParams params{lc, 0.15};
    const double theta0 = solve_theta0_unstable(params);
    const auto [nu, n] = in_plane_geometry(theta0, 0.3);
    const PlaneWaveMode mode = unstable_mode(params, 2.0, nu, n);
    const double r = linearized_residual(mode, lc).max();
    const bool pass = r <= 1e-10 && std::abs(mode.growth_rate - 0.4725) <= 1e-12;
    return {"unstable_mode_residual", pass, r, 1e-10, "growth rate " + std::to_string(mode.growth_rate)};
}

CheckResult determinism(Ctx& c) {
    const RunConfig cfg = decay_config(c.grid, 0.02);
    auto run = [&] {
        std::vector<EnergyReport> reports;
        simulate(cfg, sampler(reports, cfg.mu));
        const auto res = energy_law_residual(reports, cfg.mu);
        for (std::size_t k = 0; k < res.size(); ++k) reports[k].law_residual = res[k];
        return energy_csv(reports);
    };
    const bool same = run() == run();
    return {"determinism", same, same ? 0.0 : 1.0, 0.0, "repeated run CSV byte-identical"};
}

}  // namespace

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
    Ctx c{TorusGrid(2, opts.small ? 8 : 16), 50, std::mt19937_64(opts.seed)};
    Ctx run_ctx{TorusGrid(2, opts.small ? 16 : 32), 1, std::mt19937_64(opts.seed)};
    const bool small = opts.small;
    std::vector<std::pair<std::string, std::function<CheckResult()>>> checks = {
        {"parodi_cancellation", [&] { return parodi_cancellation(c); }},
        {"stress_split_eta_identity", [&] { return eta_identity(c); }},
        {"simplified_model_stress", [&] { return simplified_model_stress(c); }},
        {"dissipation_functional", [&] { return dissipation_functional(c); }},
        {"gl_force_gradient", [&] { return gl_gradient(c); }},
        {"leray_projection", [&] { return spectral_projection(c); }},
        {"rest_state_fixed_point", [&] { return rest_state(run_ctx); }},
        {"energy_monotone_caseI", [&] { return energy_decay(run_ctx); }},
        {"energy_law_residual", [&] { return energy_law(run_ctx); }},
        {"appendix_closure", [&] { return appendix(run_ctx, small); }},
        {"dispersion_roots", [&] { return dispersion(c); }},
        {"unstable_mode_residual", [&] { return unstable_mode_residual(c); }},
        {"determinism", [&] { return determinism(run_ctx); }},
    };
    std::vector<CheckResult> out;
    for (auto& [name, fn] : checks) {
        if (!opts.filter.empty() && name.find(opts.filter) == std::string::npos) continue;
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, false, NAN, 0.0, std::string("error: ") + e.what()});
        }
    }
    return out;
}

std::string format_check_table(const std::vector<CheckResult>& results) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-28s %-6s %-12s %-12s %s\n", "check", "result", "value", "tolerance", "detail");
    out += buf;
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "%-28s %-6s %-12.4g %-12.4g %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                      r.value, r.tolerance, r.detail.c_str());
        out += buf;
    }
    return out;
}

}  // namespace elc
