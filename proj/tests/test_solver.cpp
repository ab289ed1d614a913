#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "elc/errors.hpp"
#include "elc/solver.hpp"

using namespace elc;

namespace {

constexpr double pi = std::numbers::pi;

const LeslieCoefficients sphere = LeslieCoefficients::from_array({0.0, -0.5, 0.5, 1.0, 0.2, 0.2});

/// Trigonometric polynomial sum_k a_k cos(2 pi k.x) + b_k sin(2 pi k.x), evaluated exactly anywhere.
struct Trig {
    struct Term {
        int kx, ky;
        double a, b;
    };
    std::vector<Term> terms;
    double mean = 0.0;

    double operator()(double x, double y) const {
        double s = mean;
        for (const auto& t : terms) {
            const double ph = 2 * pi * (t.kx * x + t.ky * y);
            s += t.a * std::cos(ph) + t.b * std::sin(ph);
        }
        return s;
    }
    /// Partial derivative along x (axis 0) or y (axis 1).
    Trig diff(int axis) const {
        Trig out;
        for (const auto& t : terms) {
            const double k = 2 * pi * (axis == 0 ? t.kx : t.ky);
            out.terms.push_back({t.kx, t.ky, k * t.b, -k * t.a});
        }
        return out;
    }
    static Trig random(std::mt19937_64& rng, double amp, double mean = 0.0) {
        std::uniform_real_distribution<double> u(-amp, amp);
        Trig t;
        t.mean = mean;
        for (auto [kx, ky] : {std::pair{1, 0}, {0, 1}, {1, 1}, {1, -1}}) t.terms.push_back({kx, ky, u(rng), u(rng)});
        return t;
    }
};

/// Dense grid function with periodic central differences.
struct Dense {
    int m;
    std::vector<double> f;
    explicit Dense(int m_) : m(m_), f(static_cast<std::size_t>(m_) * m_, 0.0) {}
    static Dense sample(int m, const Trig& t) {
        Dense d(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) d.at(i, j) = t(double(i) / m, double(j) / m);
        return d;
    }
    double& at(int i, int j) { return f[((i + m) % m) * m + (j + m) % m]; }
    double at(int i, int j) const { return f[((i + m) % m) * m + (j + m) % m]; }
    Dense d(int axis) const {
        Dense o(m);
        const double h = 1.0 / m;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                o.at(i, j) = axis == 0 ? (at(i + 1, j) - at(i - 1, j)) / (2 * h) : (at(i, j + 1) - at(i, j - 1)) / (2 * h);
        return o;
    }
    Dense lap() const {
        Dense o(m);
        const double h2 = 1.0 / (double(m) * m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                o.at(i, j) = (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4 * at(i, j)) / h2;
        return o;
    }
    /// Fourier coefficient of mode (kx, ky).
    std::complex<double> coeff(int kx, int ky) const {
        std::complex<double> s = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) s += at(i, j) * std::polar(1.0, -2 * pi * double(kx * i + ky * j) / m);
        return s / double(m * m);
    }
};

/// Truncate a dense field to |k_a| <= kmax (optionally Leray-projecting a vector pair) and sample on an n^2 grid.
void truncate_to(const std::vector<const Dense*>& comps, int kmax, bool project, VectorField& out) {
    const TorusGrid& g = out.grid();
    for (int kx = -kmax; kx <= kmax; ++kx)
        for (int ky = -kmax; ky <= kmax; ++ky) {
            std::complex<double> c[2] = {comps[0]->coeff(kx, ky), comps[1]->coeff(kx, ky)};
            if (project && (kx != 0 || ky != 0)) {
                const double k2 = kx * kx + ky * ky;
                const std::complex<double> kc = (double(kx) * c[0] + double(ky) * c[1]) / k2;
                c[0] -= double(kx) * kc;
                c[1] -= double(ky) * kc;
            }
            for (std::size_t p = 0; p < g.points(); ++p) {
                const auto idx = g.index_of(p);
                const auto e = std::polar(1.0, 2 * pi * double(kx * idx[0] + ky * idx[1]) / g.n());
                for (int i = 0; i < 2; ++i) out.comp(i)[p] += (c[i] * e).real();
            }
        }
}

double rel_max(const VectorField& a, const VectorField& b) {
    double m = 0.0, s = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
        s = std::max(s, std::abs(b.values()[i]));
    }
    return m / s;
}

RunConfig small_config(int n = 16) {
    RunConfig cfg;
    cfg.grid = TorusGrid(2, n);
    cfg.mu = sphere;
    cfg.dt = 1e-3 * std::pow(16.0 / n, 2);
    cfg.t_end = 0.05;
    cfg.init = init::RandomSmooth{42, 1, 0.3, 0.2, {1.0, 0.0, 0.0}};
    return cfg;
}

double max_diff(const VectorField& a, const VectorField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

}  // namespace

TEST(Rhs, MatchesDenseFiniteDifferenceOracle) {
    std::mt19937_64 rng(2024);
    const auto mu = LeslieCoefficients::from_array({0.3, -0.6, 0.4, 0.8, 0.25, 0.1}, 0.7);
    const double l1 = mu.lambda1(), l2 = mu.lambda2();
    const Trig psi = Trig::random(rng, 0.05);
    const Trig vx = psi.diff(1), vy = [&] {
        Trig t = psi.diff(0);
        for (auto& term : t.terms) term.a = -term.a, term.b = -term.b;
        return t;
    }();
    const Trig dx = Trig::random(rng, 0.1, 1.0), dy = Trig::random(rng, 0.1, 0.2);

    // Dense oracle: every derivative by second-order central differences.
    const int M = 256;
    const Dense v[2] = {Dense::sample(M, vx), Dense::sample(M, vy)};
    const Dense d[2] = {Dense::sample(M, dx), Dense::sample(M, dy)};
    Dense Jv[2][2] = {{v[0].d(0), v[0].d(1)}, {v[1].d(0), v[1].d(1)}};
    Dense Jd[2][2] = {{d[0].d(0), d[0].d(1)}, {d[1].d(0), d[1].d(1)}};
    const Dense lapd[2] = {d[0].lap(), d[1].lap()};
    Dense ddt[2] = {Dense(M), Dense(M)};
    Dense T[2][2] = {{Dense(M), Dense(M)}, {Dense(M), Dense(M)}};
    const double inv_eps2 = 1.0 / (mu.eps_penalty * mu.eps_penalty);
    for (std::size_t p = 0; p < v[0].f.size(); ++p) {
        double A[2][2], W[2][2], dd[2] = {d[0].f[p], d[1].f[p]}, vv[2] = {v[0].f[p], v[1].f[p]};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                A[i][j] = 0.5 * (Jv[i][j].f[p] + Jv[j][i].f[p]);
                W[i][j] = 0.5 * (Jv[i][j].f[p] - Jv[j][i].f[p]);
            }
        const double s2 = dd[0] * dd[0] + dd[1] * dd[1];
        double Ad[2], adv[2], Wd[2], N[2];
        for (int i = 0; i < 2; ++i) {
            Ad[i] = A[i][0] * dd[0] + A[i][1] * dd[1];
            Wd[i] = W[i][0] * dd[0] + W[i][1] * dd[1];
            adv[i] = vv[0] * Jd[i][0].f[p] + vv[1] * Jd[i][1].f[p];
            const double G = lapd[i].f[p] - inv_eps2 * (s2 - 1.0) * dd[i];
            ddt[i].f[p] = -adv[i] + Wd[i] - (l2 / l1) * Ad[i] - G / l1;
            N[i] = ddt[i].f[p] + adv[i] - Wd[i];
        }
        const double dAd = dd[0] * Ad[0] + dd[1] * Ad[1];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double E = Jd[0][i].f[p] * Jd[0][j].f[p] + Jd[1][i].f[p] * Jd[1][j].f[p];
                const double sigma = mu.mu1 * dAd * dd[i] * dd[j] + mu.mu2 * N[i] * dd[j] + mu.mu3 * dd[i] * N[j] +
                                     mu.mu4 * A[i][j] + mu.mu5 * Ad[i] * dd[j] + mu.mu6 * dd[i] * Ad[j];
                T[i][j].f[p] = -vv[i] * vv[j] - E + sigma;
            }
    }
    Dense F[2] = {Dense(M), Dense(M)};
    for (int i = 0; i < 2; ++i) {
        const Dense a = T[i][0].d(0), b = T[i][1].d(1);
        for (std::size_t p = 0; p < a.f.size(); ++p) F[i].f[p] = a.f[p] + b.f[p];
    }

    TorusGrid g(2, 8);
    State s(g);
    for (std::size_t p = 0; p < g.points(); ++p) {
        const auto idx = g.index_of(p);
        const double x = g.coordinate(idx[0]), y = g.coordinate(idx[1]);
        s.v.comp(0)[p] = vx(x, y);
        s.v.comp(1)[p] = vy(x, y);
        s.d.comp(0)[p] = dx(x, y);
        s.d.comp(1)[p] = dy(x, y);
    }
    const Rhs r = rhs(s, mu);
    VectorField want_v(g), want_d(g);
    truncate_to({&F[0], &F[1]}, 2, true, want_v);
    truncate_to({&ddt[0], &ddt[1]}, 2, false, want_d);
    EXPECT_LT(rel_max(r.dv_dt, want_v), 1e-2);
    EXPECT_LT(rel_max(r.dd_dt, want_d), 1e-2);
}

TEST(Rhs, RestStateIsStationary) {
    TorusGrid g(2, 16);
    State s(g);
    std::ranges::fill(s.d.comp(0), 0.6);
    std::ranges::fill(s.d.comp(1), -0.8);
    const Rhs r = rhs(s, sphere);
    EXPECT_LT(r.dv_dt.max_abs(), 1e-14);
    EXPECT_LT(r.dd_dt.max_abs(), 1e-14);
}

TEST(Rhs, RejectsNonNegativeLambda1) {
    TorusGrid g(2, 8);
    State s(g);
    try {
        rhs(s, LeslieCoefficients::from_array({0, 0, 0, 1, 0, 0}));
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("lama1a"), std::string::npos);
    }
}

TEST(Rhs, OnlyMu4WithFrozenDirectorIsNavierStokes) {
    // Taylor-Green is a steady Euler flow, so the full rhs is the viscous term (mu4/2) Laplacian v.
    RunConfig cfg;
    cfg.grid = TorusGrid(2, 16);
    cfg.mu = LeslieCoefficients::from_array({0, 0, 0, 0.1, 0, 0});
    cfg.freeze_director = true;
    cfg.init = init::TaylorGreen{0.5, 1, {1.0, 0.0, 0.0}};
    Solver solver(cfg);
    const State s0 = initial_state(cfg);
    solver.set_state(s0);
    const Rhs r = solver.rhs();
    VectorField want = laplacian(s0.v);
    want *= 0.05;
    EXPECT_LT(max_diff(r.dv_dt, want), 1e-12);
    EXPECT_EQ(r.dd_dt.max_abs(), 0.0);
}

TEST(Step, RestStateFixedPoint) {
    RunConfig cfg = small_config();
    State s(cfg.grid);
    std::ranges::fill(s.d.comp(0), 1.0);
    const State out = step(s, cfg);
    EXPECT_LT(out.v.max_abs(), 1e-14);
    EXPECT_LT(max_diff(out.d, s.d), 1e-14);
    EXPECT_DOUBLE_EQ(out.t, cfg.dt);
}

TEST(Step, TaylorGreenViscousDecay) {
    RunConfig cfg;
    cfg.grid = TorusGrid(2, 32);
    cfg.mu = LeslieCoefficients::from_array({0, 0, 0, 0.1, 0, 0});
    cfg.freeze_director = true;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    cfg.init = init::TaylorGreen{1.0, 1, {1.0, 0.0, 0.0}};
    const State s0 = initial_state(cfg);
    const State s1 = simulate(cfg);
    const double rate = -std::log(s1.v.max_abs() / s0.v.max_abs()) / s1.t;
    EXPECT_NEAR(rate / (0.1 * 4 * pi * pi), 1.0, 1e-5);
}

TEST(Step, SecondOrderInTime) {
    RunConfig cfg = small_config();
    cfg.t_end = 0.04;
    auto run = [&](double dt) {
        RunConfig c = cfg;
        c.dt = dt;
        return simulate(c);
    };
    const State ref = run(1e-3 / 16);
    const State a = run(1e-3), b = run(5e-4);
    const double ea = max_diff(a.v, ref.v) + max_diff(a.d, ref.d);
    const double eb = max_diff(b.v, ref.v) + max_diff(b.d, ref.d);
    EXPECT_GT(std::log2(ea / eb), 1.8);
}

TEST(Step, PreservesDivergenceAndMeanVelocity) {
    RunConfig cfg = small_config();
    State s = initial_state(cfg);
    for (double& x : s.v.comp(1)) x += 0.25;
    Solver solver(cfg);
    solver.set_state(s);
    for (int k = 0; k < 20; ++k) {
        solver.advance();
        const VectorField& v = solver.state().v;
        EXPECT_LE(norm_l2(divergence(v)), 1e-10 * norm_l2(v));
    }
    double mean = 0.0;
    for (double x : solver.state().v.comp(1)) mean += x;
    EXPECT_NEAR(mean / cfg.grid.points(), 0.25, 1e-13);
    EXPECT_EQ(solver.steps_taken(), 20);
}

TEST(Step, EnergyDoesNotGrowInCaseI) {
    // Kinetic + elastic energy, evaluated directly.
    RunConfig cfg = small_config();
    cfg.t_end = 0.1;
    auto energy = [&](const State& s) {
        const TensorField J = jacobian(s.d);
        double pen = 0.0;
        for (std::size_t p = 0; p < s.d.points(); ++p) {
            const double q = s.d.comp(0)[p] * s.d.comp(0)[p] + s.d.comp(1)[p] * s.d.comp(1)[p] - 1.0;
            pen += q * q / 4.0;
        }
        return 0.5 * inner(s.v, s.v) + 0.5 * inner(J, J) + pen * s.d.grid().cell_volume();
    };
    std::vector<double> e;
    RunSinks sinks;
    sinks.on_sample = [&](const State& s, long) { e.push_back(energy(s)); };
    simulate(cfg, sinks);
    ASSERT_EQ(e.size(), static_cast<std::size_t>(cfg.step_count() + 1));
    for (std::size_t k = 1; k < e.size(); ++k) EXPECT_LE(e[k], e[k - 1] + 1e-8 * std::max(1.0, e[0]));
}

TEST(Step, BlowupIsReported) {
    RunConfig cfg = small_config();
    cfg.mu.eps_penalty = 0.01;
    cfg.dt = 0.05;
    cfg.t_end = 50.0;
    try {
        simulate(cfg);
        FAIL();
    } catch (const BlowupError& e) {
        EXPECT_GT(e.step(), 0);
        EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
    }
}

TEST(Step, CflWarningOnce) {
    RunConfig cfg = small_config();
    cfg.freeze_director = true;
    cfg.mu = LeslieCoefficients::from_array({0, 0, 0, 1.0, 0, 0});
    cfg.init = init::TaylorGreen{200.0, 1, {1.0, 0.0, 0.0}};
    cfg.dt = 2e-4;
    cfg.t_end = 10 * cfg.dt;
    int warnings = 0;
    RunSinks sinks;
    sinks.on_warning = [&](const std::string& msg) {
        ++warnings;
        EXPECT_NE(msg.find("CFL"), std::string::npos);
    };
    simulate(cfg, sinks);
    EXPECT_EQ(warnings, 1);
}

TEST(Simulate, ZeroHorizonAndCadence) {
    RunConfig cfg = small_config();
    cfg.t_end = 0.0;
    int samples = 0, snaps = 0;
    RunSinks sinks;
    sinks.on_sample = [&](const State&, long) { ++samples; };
    sinks.on_snapshot = [&](const State&, long) { ++snaps; };
    const State s = simulate(cfg, sinks);
    EXPECT_EQ(samples, 1);
    EXPECT_EQ(snaps, 1);
    EXPECT_LT(max_diff(s.v, initial_state(cfg).v), 1e-14);

    cfg.t_end = 10.5 * cfg.dt;  // rounds up to 11 steps
    cfg.output.sample_every = 4;
    cfg.output.snapshot_every = 5;
    std::vector<long> sample_steps, snap_steps;
    sinks.on_sample = [&](const State&, long k) { sample_steps.push_back(k); };
    sinks.on_snapshot = [&](const State&, long k) { snap_steps.push_back(k); };
    simulate(cfg, sinks);
    EXPECT_EQ(sample_steps, (std::vector<long>{0, 4, 8, 11}));
    EXPECT_EQ(snap_steps, (std::vector<long>{0, 5, 10, 11}));
}

TEST(Simulate, Deterministic) {
    RunConfig cfg = small_config();
    const State a = simulate(cfg), b = simulate(cfg);
    EXPECT_EQ(max_diff(a.v, b.v), 0.0);
    EXPECT_EQ(max_diff(a.d, b.d), 0.0);
}

TEST(RunConfig, Validation) {
    RunConfig cfg = small_config();
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.step_count(), 50);
    cfg.dt = 0.0;
    EXPECT_THROW(cfg.validate(), UsageError);
    cfg = small_config();
    cfg.t_end = -1.0;
    EXPECT_THROW(cfg.validate(), UsageError);
    cfg = small_config();
    cfg.mu.mu3 = cfg.mu.mu2;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg.freeze_director = true;
    EXPECT_NO_THROW(cfg.validate());
    cfg = small_config();
    cfg.mode_cutoff = 0;
    EXPECT_THROW(cfg.validate(), UsageError);
}

TEST(Init, TaylorGreenAndRandomSmooth) {
    TorusGrid g(2, 32);
    RunConfig cfg = small_config(32);
    cfg.init = init::TaylorGreen{2.0, 2, {0.0, 1.0, 0.0}};
    State tg = initial_state(cfg);
    EXPECT_LT(norm_l2(divergence(tg.v)), 1e-12);
    EXPECT_NEAR(tg.v.max_abs(), 2.0, 1e-12);
    EXPECT_EQ(tg.d.comp(1)[7], 1.0);

    cfg.init = init::RandomSmooth{5, 2, 0.3, 0.1, {1.0, 0.0, 0.0}};
    const State a = initial_state(cfg), b = initial_state(cfg);
    EXPECT_EQ(max_diff(a.v, b.v), 0.0);
    EXPECT_LT(norm_l2(divergence(a.v)), 1e-12 * norm_l2(a.v));
    EXPECT_NEAR(norm_l2(a.v), 0.3 * std::sqrt(2.0), 1e-12);  // rms taken over all components
    cfg.init = init::RandomSmooth{6, 2, 0.3, 0.1, {1.0, 0.0, 0.0}};
    EXPECT_GT(max_diff(initial_state(cfg).v, a.v), 1e-3);

    cfg.init = init::TaylorGreen{1.0, 20, {1.0, 0.0, 0.0}};
    EXPECT_THROW(initial_state(cfg), UsageError);
}

TEST(Init, PlaneWaveMustBePeriodic) {
    RunConfig cfg = small_config();
    init::ConstantDirectorPerturbed pw;
    pw.n = {0.0, 1.0, 0.0};
    pw.mode.nu = {1.0, 0.0, 0.0};
    pw.mode.b = {0.0, 1.0, 0.0};
    pw.mode.m = 2 * pi;
    cfg.init = pw;
    const State s = initial_state(cfg);
    EXPECT_NEAR(s.v.max_abs(), pw.amplitude, 1e-15);
    pw.mode.m = 2.0;
    cfg.init = pw;
    EXPECT_THROW(initial_state(cfg), UsageError);
    pw.mode.m = 2 * pi;
    pw.mode.b = {1.0, 0.0, 0.0};
    cfg.init = pw;
    EXPECT_THROW(initial_state(cfg), UsageError);
}
