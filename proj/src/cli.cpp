#include "elc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>

#include "elc/diagnostics.hpp"
#include "elc/errors.hpp"
#include "elc/io.hpp"
#include "elc/linstab.hpp"
#include "elc/solver.hpp"
#include "elc/verify.hpp"

namespace elc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json optional_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<int> n;
    std::optional<int> dim;
};

/// Overrides go into the JSON before parsing so that every check sees the final values.
json apply_overrides(json j, const SimulateArgs& a) {
    if (a.dt) j["dt"] = *a.dt;
    if (a.t_end) j["t_end"] = *a.t_end;
    if (a.n) j["grid"]["n"] = *a.n;
    if (a.dim) j["grid"]["dim"] = *a.dim;
    if (a.seed) {
        if (!j.contains("init") || j["init"].value("type", "") != "random_smooth")
            throw UsageError("--seed only applies to random_smooth initial data");
        j["init"]["seed"] = *a.seed;
    }
    return j;
}

/// Residuals need uniform sample spacing; a shortened last interval is dropped.
std::vector<double> law_residuals(std::vector<EnergyReport>& reports, const LeslieCoefficients& mu) {
    std::size_t n = reports.size();
    if (n >= 4) {
        const double h0 = reports[1].t - reports[0].t;
        const double hl = reports[n - 1].t - reports[n - 2].t;
        if (std::abs(hl - h0) > 1e-9 * std::max(1.0, h0)) --n;
    }
    std::vector<double> res(reports.size(), std::numeric_limits<double>::quiet_NaN());
    if (n < 3) return res;
    const auto part = energy_law_residual(std::span(reports.data(), n), mu);
    std::copy(part.begin(), part.end(), res.begin());
    for (std::size_t k = 0; k < reports.size(); ++k) reports[k].law_residual = res[k];
    return res;
}

std::optional<double> micro_step_closure(const RunConfig& cfg, const State& s0) {
    if (cfg.freeze_director || !(cfg.mu.lambda1() < 0.0)) return std::nullopt;
    RunConfig micro = cfg;
    micro.dt = std::min(cfg.dt, 1e-5);
    Solver solver(micro);
    solver.set_state(s0);
    solver.advance();
    return appendix_closure(s0, solver.state(), cfg.mu).closure_error;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    const fs::path cfg_path(a.config);
    const json j = apply_overrides(read_json_file(cfg_path), a);
    const RunConfig cfg = run_config_from_json(j, cfg_path.parent_path());
    cfg.validate();

    const fs::path dir(a.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    std::vector<EnergyReport> reports;
    std::vector<DecaySample> decay;
    std::optional<State> first;
    RunSinks sinks;
    sinks.on_sample = [&](const State& s, long) {
        if (!first) first = s;
        reports.push_back(energy_report(s, cfg.mu));
        decay.push_back({s.t, equilibrium_distance(s, cfg.mu.eps_penalty)});
    };
    sinks.on_snapshot = [&](const State& s, long step) {
        char name[32];
        std::snprintf(name, sizeof name, "snap_%06ld.elc1", step);
        write_snapshot(dir / name, s);
    };
    sinks.on_warning = [&](const std::string& msg) { err << "warning: " << msg << "\n"; };

    State final_state(cfg.grid);
    try {
        final_state = simulate(cfg, sinks);
    } catch (const BlowupError&) {
        // Keep the partial time series for post-mortem inspection.
        write_text_file(dir / "energy.csv", energy_csv(reports));
        throw;
    }

    const bool energy_law_applies = !cfg.freeze_director && cfg.mu.lambda1() < 0.0;
    json max_residual = nullptr;
    if (energy_law_applies) {
        const auto res = law_residuals(reports, cfg.mu);
        double worst = 0.0;
        bool any = false;
        for (double r : res)
            if (!std::isnan(r)) worst = std::max(worst, std::abs(r)), any = true;
        if (any) max_residual = worst / std::max(1.0, std::abs(reports.front().dissipation()));
    } else {
        for (auto& r : reports) r.law_residual = std::numeric_limits<double>::quiet_NaN();
    }
    write_text_file(dir / "energy.csv", energy_csv(reports));

    bool monotone = true;
    const double tol = 1e-8 * std::max(1.0, reports.front().E_total);
    for (std::size_t k = 1; k < reports.size(); ++k)
        if (reports[k].E_total - reports[k - 1].E_total > tol) monotone = false;

    const ConvergenceReport conv = convergence_monitor(decay);
    const auto closure = micro_step_closure(cfg, *first);

    json summary;
    summary["regime"] = to_string(classify_regime(cfg.mu).tag);
    summary["steps"] = cfg.step_count();
    summary["t_final"] = final_state.t;
    summary["E_initial"] = reports.front().E_total;
    summary["E_final"] = reports.back().E_total;
    summary["monotone"] = monotone;
    summary["max_residual"] = max_residual;
    summary["appendix_closure"] = optional_json(closure);
    summary["decay"] = {{"D_initial", decay.front().D},
                        {"D_final", decay.back().D},
                        {"fitted_power", optional_json(conv.fitted_power)},
                        {"r_squared", optional_json(conv.r_squared)},
                        {"below_threshold_time", optional_json(conv.below_threshold_time)},
                        {"eventually_monotone", conv.eventually_monotone}};
    summary["final_molecular_field_norm"] =
        finite_or_null(norm_l2(molecular_field(final_state.d, cfg.mu.eps_penalty)));
    write_text_file(dir / "summary.json", dump(summary));
    out << dump(summary);
    return exit_code::ok;
}

// ---------------------------------------------------------------- coeffs

struct CoeffArgs {
    std::string config;
    std::vector<double> mu;
    std::optional<double> eps;
};

LeslieCoefficients coefficients_from_args(const std::string& config, const std::vector<double>& mu_list,
                                          std::optional<double> eps, json* raw = nullptr) {
    LeslieCoefficients mu;
    if (!config.empty()) {
        const json j = read_json_file(config);
        mu = coefficients_from_json(j);
        if (raw) *raw = j;
    } else if (mu_list.size() == 6) {
        mu = LeslieCoefficients::from_array({mu_list[0], mu_list[1], mu_list[2], mu_list[3], mu_list[4], mu_list[5]});
    } else {
        throw UsageError("give either --config or --mu with six comma-separated values");
    }
    if (eps) mu.eps_penalty = *eps;
    return mu;
}

int cmd_coeffs(const CoeffArgs& a, std::ostream& out) {
    const LeslieCoefficients mu = coefficients_from_args(a.config, a.mu, a.eps);
    const DerivedConstants dc = derive_constants(mu);
    const Regime regime = classify_regime(mu);
    json j;
    j["mu"] = mu.as_array();
    j["eps_penalty"] = mu.eps_penalty;
    j["lambda1"] = dc.lambda1;
    j["lambda2"] = dc.lambda2;
    j["alpha"] = optional_json(dc.alpha);
    j["parodi_defect"] = dc.parodi_defect;
    j["parodi"] = satisfies_parodi(mu);
    j["regime"] = to_string(regime.tag);
    j["margin"] = regime.margin;
    try {
        j["dissipation_margin"] = dissipation_margin(mu);
    } catch (const DomainError& e) {
        j["dissipation_margin"] = nullptr;
        j["dissipation_margin_note"] = e.what();
    }
    out << dump(j);
    return exit_code::ok;
}

// ---------------------------------------------------------------- linstab

struct LinstabArgs {
    std::string config;
    std::vector<double> mu;
    std::optional<double> epsilon_leslie;
    std::vector<double> m{1.0, 2.0, 4.0};
    int thetas = 9;
    double phi = 0.0;
    std::string csv;
};

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

int cmd_linstab(const LinstabArgs& a, std::ostream& out) {
    json raw;
    const LeslieCoefficients mu = coefficients_from_args(a.config, a.mu, std::nullopt, &raw);
    std::optional<double> eps_leslie = a.epsilon_leslie;
    if (!eps_leslie && raw.contains("epsilon_leslie")) eps_leslie = raw["epsilon_leslie"].get<double>();
    if (a.thetas < 2) throw UsageError("--thetas must be at least 2");
    if (!(mu.lambda1() < 0.0)) {
        std::ostringstream os;
        os << "lambda1 = " << mu.lambda1() << " >= 0 violates (lama1a) lambda1 < 0";
        throw DomainError(os.str());
    }

    json j;
    std::optional<double> theta0;
    if (eps_leslie) {
        const LeslieUnstableParams params{mu, *eps_leslie};
        theta0 = solve_theta0_unstable(params);
        validate_instability_bounds(params, *theta0);
        const auto [nu, n] = in_plane_geometry(*theta0, a.phi);
        json modes = json::array();
        for (double m : a.m) {
            const PlaneWaveMode pm = unstable_mode(params, m, nu, n);
            modes.push_back({{"m", m},
                             {"nu", pm.nu},
                             {"n", pm.n},
                             {"a", pm.a},
                             {"b", pm.b},
                             {"omega", complex_json(pm.omega)},
                             {"C", complex_json(pm.C)},
                             {"D", complex_json(pm.D)},
                             {"growth_rate", pm.growth_rate},
                             {"linearized_residual", linearized_residual(pm, mu).max()}});
        }
        j["mode"] = modes;
    } else {
        // The sweep below is meaningful even when no common root of p and q can exist.
        try {
            theta0 = solve_pq_system(mu);
        } catch (const DomainError& e) {
            j["theta0_note"] = e.what();
        }
    }

    j["theta0"] = optional_json(theta0);
    if (theta0) {
        const Gpq c = gpq(*theta0, mu);
        j["g"] = c.g;
        j["p"] = c.p;
        j["q"] = c.q;
    } else {
        j["g"] = j["p"] = j["q"] = nullptr;
    }

    std::vector<double> angles;
    for (int k = 0; k < a.thetas; ++k) angles.push_back(0.5 * std::numbers::pi * k / (a.thetas - 1));
    if (theta0) angles.push_back(*theta0);

    json roots = json::array();
    std::string csv = "m,theta,g,p,q,omega1_re,omega1_im,omega2_re,omega2_im\n";
    bool unstable = false;
    for (double m : a.m)
        for (double th : angles) {
            const auto r = dispersion_roots(m, th, mu);
            const Gpq c = gpq(th, mu);
            unstable = unstable || !is_stable(r);
            roots.push_back({{"m", m}, {"theta", th}, {"omega", {complex_json(r.first), complex_json(r.second)}}});
            char buf[256];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", m, th, c.g, c.p,
                          c.q, r.first.real(), r.first.imag(), r.second.real(), r.second.imag());
            csv += buf;
        }
    j["roots"] = roots;
    j["verdict"] = unstable ? "unstable" : "stable";
    if (!a.csv.empty()) write_text_file(a.csv, csv);
    out << dump(j);
    return exit_code::ok;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const VerifyOptions& opts, std::ostream& out) {
    const auto results = run_verify(opts);
    out << format_check_table(results);
    const bool ok = !results.empty() && std::ranges::all_of(results, [](const CheckResult& r) { return r.pass; });
    out << (ok ? "all checks passed\n" : "some checks FAILED\n");
    if (results.empty()) out << "no check matches the filter\n";
    return ok ? exit_code::ok : exit_code::domain;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ericksen-Leslie nematic liquid crystal simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "elc 1.0");

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run a simulation from a JSON config");
    simulate_cmd->add_option("--config", sim.config, "Run config (JSON)")->required();
    simulate_cmd->add_option("--out", sim.out, "Output directory")->capture_default_str();
    simulate_cmd->add_option("--seed", sim.seed, "Seed for random_smooth initial data");
    simulate_cmd->add_option("--dt", sim.dt, "Time step");
    simulate_cmd->add_option("--t-end", sim.t_end, "Final time");
    simulate_cmd->add_option("--n", sim.n, "Grid points per direction");
    simulate_cmd->add_option("--dim", sim.dim, "Spatial dimension")->check(CLI::IsMember({2, 3}));

    CoeffArgs co;
    auto* coeffs_cmd = app.add_subcommand("coeffs", "Derived constants and regime of a coefficient set");
    coeffs_cmd->add_option("--config", co.config, "JSON with \"mu\" (and optional \"eps_penalty\")");
    coeffs_cmd->add_option("--mu", co.mu, "mu1,...,mu6")->delimiter(',')->expected(6);
    coeffs_cmd->add_option("--eps", co.eps, "Penalty length");

    LinstabArgs ls;
    auto* linstab_cmd = app.add_subcommand("linstab", "Plane-wave stability of a constant director state");
    linstab_cmd->add_option("--config", ls.config, "JSON with \"mu\" and optional \"epsilon_leslie\"");
    linstab_cmd->add_option("--mu", ls.mu, "mu1,...,mu6")->delimiter(',')->expected(6);
    linstab_cmd->add_option("--epsilon-leslie", ls.epsilon_leslie, "Perturbation parameter of the unstable family");
    linstab_cmd->add_option("--m", ls.m, "Wavenumbers")->delimiter(',')->capture_default_str();
    linstab_cmd->add_option("--thetas", ls.thetas, "Angles sampled in [0, pi/2]")->capture_default_str();
    linstab_cmd->add_option("--phi", ls.phi, "Propagation angle of the constructed mode")->capture_default_str();
    linstab_cmd->add_option("--csv", ls.csv, "Write the sweep table here");

    VerifyOptions vo;
    auto* verify_cmd = app.add_subcommand("verify", "Run the identity and property suite");
    verify_cmd->add_flag("--small", vo.small, "Small grids for CI");
    verify_cmd->add_option("--filter", vo.filter, "Only checks whose name contains this");
    verify_cmd->add_option("--seed", vo.seed, "Seed for random draws")->capture_default_str();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::ok : exit_code::domain;
    }

    try {
        if (*simulate_cmd) return cmd_simulate(sim, out, err);
        if (*coeffs_cmd) return cmd_coeffs(co, out);
        if (*linstab_cmd) return cmd_linstab(ls, out);
        return cmd_verify(vo, out);
    } catch (const BlowupError& e) {
        err << "blowup: " << e.what() << "\n";
        return exit_code::blowup;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return exit_code::io;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::domain;
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace elc
