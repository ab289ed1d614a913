#include "elc/solver.hpp"

#include <cmath>
#include <sstream>

#include "elc/errors.hpp"

namespace elc {

void RunConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw UsageError("dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw UsageError("t_end must be non-negative");
    if (output.sample_every < 1) throw UsageError("output.every must be >= 1");
    if (output.snapshot_every < 0) throw UsageError("output.snapshot_every must be >= 0");
    if (mode_cutoff && *mode_cutoff < 1) throw UsageError("mode_cutoff must be >= 1");
    if (freeze_director) {
        if (!(mu.eps_penalty > 0.0)) throw DomainError("eps_penalty must be positive");
        if (!(mu.mu4 > 0.0)) throw DomainError("mu4 <= 0 violates (mu14) mu4 > 0");
    } else {
        require_simulation_admissible(mu);
    }
}

long RunConfig::step_count() const {
    const double r = t_end / dt;
    const double nearest = std::round(r);
    if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, r)) return static_cast<long>(nearest);
    return static_cast<long>(std::ceil(r));
}

namespace {

/// Nonlinear and non-stiff terms in wavespace, plus the diagonal implicit rates.
class Dynamics {
public:
    Dynamics(const TorusGrid& grid, const LeslieCoefficients& mu, bool dealias, std::optional<int> cutoff,
             bool frozen)
        : grid_(grid), sp_(Spectral::for_grid(grid)), mu_(mu), dealias_(dealias), frozen_(frozen),
          rate_v_(sp_->modes()), rate_d_(sp_->modes()), keep_(sp_->modes(), 1) {
        const double l1 = mu.lambda1();
        for (std::size_t m = 0; m < sp_->modes(); ++m) {
            const double k2 = sp_->k_squared(m);
            rate_v_[m] = 0.5 * mu.mu4 * k2;
            rate_d_[m] = frozen ? 0.0 : -k2 / l1;
            if (cutoff && sp_->index_norm_sq(m) > (*cutoff) * (*cutoff)) keep_[m] = 0;
        }
        has_cutoff_ = cutoff.has_value();
    }

    const Spectral& spectral() const { return *sp_; }
    double rate_v(std::size_t m) const { return rate_v_[m]; }
    double rate_d(std::size_t m) const { return rate_d_[m]; }

    void truncate(SpectralData& s) const {
        if (!has_cutoff_) return;
        for (int c = 0; c < s.components(); ++c) {
            auto comp = s.comp(c);
            for (std::size_t m = 0; m < comp.size(); ++m)
                if (!keep_[m]) comp[m] = 0.0;
        }
    }

    void explicit_terms(const SpectralData& vh, const SpectralData& dh, SpectralData& fv, SpectralData& fd,
                        long step) const {
        const int dim = grid_.dim();
        const std::size_t np = grid_.points();
        const Spectral& sp = *sp_;
        VectorField v(grid_), d(grid_);
        sp.inverse(vh, v);
        sp.inverse(dh, d);
        check(v, d, step);

        TensorField jv(grid_), jd(grid_);
        VectorField lap(grid_);
        ComplexBuffer tmp(sp.modes());
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                sp.derivative(j, vh.comp(i), tmp);
                sp.inverse(tmp, jv(i, j));
                sp.derivative(j, dh.comp(i), tmp);
                sp.inverse(tmp, jd(i, j));
            }
            if (!frozen_) {
                const auto src = dh.comp(i);
                for (std::size_t m = 0; m < sp.modes(); ++m) tmp[m] = -sp.k_squared(m) * src[m];
                sp.inverse(tmp, lap.comp(i));
            }
        }

        const double l1 = mu_.lambda1();
        const double l2 = mu_.lambda2();
        const double inv_eps2 = 1.0 / (mu_.eps_penalty * mu_.eps_penalty);
        TensorField flux(grid_);
        VectorField ddt(grid_);
        double vv[3], dd[3], Jv[3][3], Jd[3][3], A[3][3], W[3][3], Ad[3], N[3];
        for (std::size_t p = 0; p < np; ++p) {
            for (int i = 0; i < dim; ++i) {
                vv[i] = v.comp(i)[p];
                dd[i] = d.comp(i)[p];
                for (int j = 0; j < dim; ++j) {
                    Jv[i][j] = jv(i, j)[p];
                    Jd[i][j] = jd(i, j)[p];
                }
            }
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    A[i][j] = 0.5 * (Jv[i][j] + Jv[j][i]);
                    W[i][j] = 0.5 * (Jv[i][j] - Jv[j][i]);
                }
            double dAd = 0.0, s = 0.0;
            for (int i = 0; i < dim; ++i) {
                Ad[i] = 0.0;
                for (int j = 0; j < dim; ++j) Ad[i] += A[i][j] * dd[j];
                dAd += dd[i] * Ad[i];
                s += dd[i] * dd[i];
            }
            const double w = inv_eps2 * (s - 1.0);
            for (int i = 0; i < dim; ++i) {
                double adv = 0.0, rot = 0.0;
                for (int j = 0; j < dim; ++j) {
                    adv += vv[j] * Jd[i][j];
                    rot += W[i][j] * dd[j];
                }
                if (frozen_) {
                    N[i] = adv - rot;
                    ddt.comp(i)[p] = 0.0;
                } else {
                    const double G = lap.comp(i)[p] - w * dd[i];
                    N[i] = -(G + l2 * Ad[i]) / l1;
                    ddt.comp(i)[p] = -adv + rot - (l2 / l1) * Ad[i] + (w * dd[i]) / l1;
                }
            }
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    double e = 0.0;
                    for (int k = 0; k < dim; ++k) e += Jd[k][i] * Jd[k][j];
                    flux(i, j)[p] = -vv[i] * vv[j] - e + mu_.mu1 * dAd * dd[i] * dd[j] + mu_.mu2 * N[i] * dd[j] +
                                    mu_.mu3 * dd[i] * N[j] + mu_.mu5 * Ad[i] * dd[j] + mu_.mu6 * dd[i] * Ad[j];
                }
        }

        SpectralData th = sp.forward(flux);
        for (int i = 0; i < dim; ++i) {
            auto out = fv.comp(i);
            std::fill(out.begin(), out.end(), Complex(0.0));
            for (int j = 0; j < dim; ++j) {
                sp.derivative(j, th.comp(i * dim + j), tmp);
                for (std::size_t m = 0; m < sp.modes(); ++m) out[m] += tmp[m];
            }
        }
        for (int i = 0; i < dim; ++i) sp.forward(ddt.comp(i), fd.comp(i));
        if (dealias_) {
            sp.apply_dealias(fv);
            sp.apply_dealias(fd);
        }
        sp.project(fv);
        truncate(fv);
        truncate(fd);
    }

    static void check(const VectorField& v, const VectorField& d, long step) {
        const bool finite = v.all_finite() && d.all_finite();
        const double vmax = finite ? v.max_abs() : 0.0;
        const double dmax = finite ? d.max_abs() : 0.0;
        if (!finite || vmax > blowup_threshold || dmax > blowup_threshold) {
            std::ostringstream os;
            os << "numerical blowup at step " << step << ": ";
            if (!finite)
                os << "non-finite values in the state";
            else
                os << "|v|_inf = " << vmax << ", |d|_inf = " << dmax << " exceed " << blowup_threshold;
            throw BlowupError(os.str(), step);
        }
    }

private:
    TorusGrid grid_;
    std::shared_ptr<const Spectral> sp_;
    LeslieCoefficients mu_;
    bool dealias_;
    bool frozen_;
    bool has_cutoff_ = false;
    std::vector<double> rate_v_;
    std::vector<double> rate_d_;
    std::vector<unsigned char> keep_;
};

}  // namespace

struct Solver::Impl {
    Dynamics dyn;
    SpectralData vh, dh;
};

Solver::Solver(const RunConfig& cfg) : cfg_(cfg), state_(cfg.grid) {
    cfg_.validate();
    const auto sp = Spectral::for_grid(cfg_.grid);
    impl_ = std::make_unique<Impl>(Impl{
        Dynamics(cfg_.grid, cfg_.mu, cfg_.dealias, cfg_.mode_cutoff, cfg_.freeze_director),
        SpectralData(cfg_.grid.dim(), sp->modes()), SpectralData(cfg_.grid.dim(), sp->modes())});
}

Solver::~Solver() = default;

void Solver::set_state(const State& s) {
    require_same_grid(s.grid(), cfg_.grid, "Solver::set_state");
    if (!s.v.all_finite() || !s.d.all_finite()) throw DataError("initial state contains NaN or Inf");
    const Spectral& sp = impl_->dyn.spectral();
    impl_->vh = sp.forward(s.v);
    impl_->dh = sp.forward(s.d);
    sp.project(impl_->vh);
    impl_->dyn.truncate(impl_->vh);
    impl_->dyn.truncate(impl_->dh);
    sp.inverse(impl_->vh, state_.v);
    sp.inverse(impl_->dh, state_.d);
    state_.t = s.t;
    t0_ = s.t;
    steps_ = 0;
    warned_ = false;
}

void Solver::advance() {
    const Dynamics& dyn = impl_->dyn;
    const Spectral& sp = dyn.spectral();
    const int dim = cfg_.grid.dim();
    const double dt = cfg_.dt;
    const long index = steps_ + 1;

    if (!warned_) {
        const double cfl = dt * state_.v.max_abs() / cfg_.grid.spacing();
        if (cfl > 0.5) {
            warned_ = true;
            std::ostringstream os;
            os << "advective CFL number " << cfl << " exceeds 0.5 at step " << index;
            if (on_warning) on_warning(os.str());
        }
    }

    SpectralData& vh = impl_->vh;
    SpectralData& dh = impl_->dh;
    SpectralData fv(dim, sp.modes()), fd(dim, sp.modes());
    dyn.explicit_terms(vh, dh, fv, fd, index);

    SpectralData vs(dim, sp.modes()), ds(dim, sp.modes());
    for (int c = 0; c < dim; ++c) {
        const auto v0 = vh.comp(c), d0 = dh.comp(c), f0 = fv.comp(c), g0 = fd.comp(c);
        auto v1 = vs.comp(c), d1 = ds.comp(c);
        for (std::size_t m = 0; m < sp.modes(); ++m) {
            v1[m] = (v0[m] + 0.5 * dt * f0[m]) / (1.0 + 0.5 * dt * dyn.rate_v(m));
            d1[m] = (d0[m] + 0.5 * dt * g0[m]) / (1.0 + 0.5 * dt * dyn.rate_d(m));
        }
    }
    dyn.explicit_terms(vs, ds, fv, fd, index);
    for (int c = 0; c < dim; ++c) {
        auto v0 = vh.comp(c), d0 = dh.comp(c);
        const auto v1 = vs.comp(c), d1 = ds.comp(c), f1 = fv.comp(c), g1 = fd.comp(c);
        for (std::size_t m = 0; m < sp.modes(); ++m) {
            v0[m] += dt * (f1[m] - dyn.rate_v(m) * v1[m]);
            d0[m] += dt * (g1[m] - dyn.rate_d(m) * d1[m]);
        }
    }
    sp.project(vh);

    sp.inverse(vh, state_.v);
    sp.inverse(dh, state_.d);
    Dynamics::check(state_.v, state_.d, index);
    steps_ = index;
    state_.t = t0_ + static_cast<double>(steps_) * dt;
}

Rhs Solver::rhs() const {
    const Dynamics& dyn = impl_->dyn;
    const Spectral& sp = dyn.spectral();
    const int dim = cfg_.grid.dim();
    SpectralData fv(dim, sp.modes()), fd(dim, sp.modes());
    dyn.explicit_terms(impl_->vh, impl_->dh, fv, fd, steps_);
    for (int c = 0; c < dim; ++c) {
        const auto v0 = impl_->vh.comp(c), d0 = impl_->dh.comp(c);
        auto f = fv.comp(c), g = fd.comp(c);
        for (std::size_t m = 0; m < sp.modes(); ++m) {
            f[m] -= dyn.rate_v(m) * v0[m];
            g[m] -= dyn.rate_d(m) * d0[m];
        }
    }
    Rhs out{VectorField(cfg_.grid), VectorField(cfg_.grid)};
    sp.inverse(fv, out.dv_dt);
    sp.inverse(fd, out.dd_dt);
    return out;
}

Rhs rhs(const State& state, const LeslieCoefficients& mu) {
    RunConfig cfg;
    cfg.grid = state.grid();
    cfg.mu = mu;
    Solver s(cfg);
    s.set_state(state);
    return s.rhs();
}

State step(const State& state, const RunConfig& cfg) {
    Solver s(cfg);
    s.set_state(state);
    s.advance();
    return s.state();
}

State simulate(const RunConfig& cfg, const RunSinks& sinks) {
    Solver solver(cfg);
    solver.on_warning = sinks.on_warning;
    solver.set_state(initial_state(cfg));
    const long total = cfg.step_count();
    auto emit = [&](long k) {
        if (sinks.on_sample && (k % cfg.output.sample_every == 0 || k == total)) sinks.on_sample(solver.state(), k);
        const bool snap = k == 0 || k == total || (cfg.output.snapshot_every > 0 && k % cfg.output.snapshot_every == 0);
        if (sinks.on_snapshot && snap) sinks.on_snapshot(solver.state(), k);
    };
    emit(0);
    for (long k = 1; k <= total; ++k) {
        solver.advance();
        emit(k);
    }
    return solver.state();
}

}  // namespace elc
