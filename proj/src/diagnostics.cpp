#include "elc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "elc/constitutive.hpp"
#include "elc/errors.hpp"

namespace elc {

namespace {

double optional_margin(const LeslieCoefficients& mu) {
    try {
        return std::max(0.0, dissipation_margin(mu));
    } catch (const DomainError&) {
        return 0.0;
    }
}

/// Spectral first derivatives of one real component.
class Deriv {
public:
    explicit Deriv(const TorusGrid& g) : grid_(g), sp_(Spectral::for_grid(g)), hat_(sp_->modes()), tmp_(sp_->modes()) {}

    // out[l] = d/dx_l f
    std::vector<RealBuffer> grad(std::span<const double> f) {
        sp_->forward(f, hat_);
        std::vector<RealBuffer> out(grid_.dim(), RealBuffer(grid_.points()));
        for (int l = 0; l < grid_.dim(); ++l) {
            sp_->derivative(l, hat_, tmp_);
            sp_->inverse(tmp_, out[l]);
        }
        return out;
    }
    RealBuffer lap(std::span<const double> f) {
        sp_->forward(f, hat_);
        for (std::size_t m = 0; m < hat_.size(); ++m) hat_[m] *= -sp_->k_squared(m);
        RealBuffer out(grid_.points());
        sp_->inverse(hat_, out);
        return out;
    }

private:
    TorusGrid grid_;
    std::shared_ptr<const Spectral> sp_;
    ComplexBuffer hat_, tmp_;
};

}  // namespace

VectorField molecular_field(const VectorField& d, double eps_penalty) {
    VectorField G = laplacian(d);
    G -= gl_force(d, eps_penalty);
    return G;
}

VectorField director_rate(const State& s, const LeslieCoefficients& mu) {
    const double l1 = mu.lambda1();
    if (l1 == 0.0) throw DomainError("director_rate: lambda1 = 0 violates (lama1a) lambda1 < 0");
    const double l2 = mu.lambda2();
    const StrainVorticity sv = strain_vorticity(s.v);
    const VectorField adv = contract(jacobian(s.d), s.v);
    VectorField rate = contract(sv.Omega, s.d);
    rate -= adv;
    rate -= (l2 / l1) * contract(sv.A, s.d);
    rate -= (1.0 / l1) * molecular_field(s.d, mu.eps_penalty);
    return rate;
}

EnergyReport energy_report(const State& s, const LeslieCoefficients& mu) {
    EnergyReport r;
    r.t = s.t;
    const TensorField jv = jacobian(s.v);
    const TensorField jd = jacobian(s.d);
    const VectorField G = molecular_field(s.d, mu.eps_penalty);
    r.E_kin = 0.5 * inner(s.v, s.v);
    r.E_grad = 0.5 * inner(jd, jd);
    r.E_penalty = penalty_energy(s.d, mu.eps_penalty);
    r.E_total = r.E_kin + r.E_grad + r.E_penalty;
    const double grad_v_sq = inner(jv, jv);
    r.G_sq = inner(G, G);
    r.A = grad_v_sq + r.G_sq;

    const StrainVorticity sv = strain_vorticity(s.v);
    const VectorField Ad = contract(sv.A, s.d);
    const ScalarField dAd = quadratic_form(sv.A, s.d);
    r.diss_mu1 = mu.mu1 * inner(dAd, dAd);
    r.diss_mu4 = 0.5 * mu.mu4 * grad_v_sq;
    r.Ad_sq = inner(Ad, Ad);

    const double l1 = mu.lambda1();
    const double l2 = mu.lambda2();
    r.parodi = satisfies_parodi(mu);
    if (l1 == 0.0) {
        r.diss_Ad = (mu.mu5 + mu.mu6) * r.Ad_sq;
        return r;
    }
    VectorField N = G;
    N += l2 * Ad;
    N *= -1.0 / l1;
    r.N_sq = inner(N, N);
    r.N_Ad = inner(N, Ad);
    if (r.parodi) {
        r.diss_director = -r.G_sq / l1;
        r.diss_Ad = (mu.mu5 + mu.mu6 + l2 * l2 / l1) * r.Ad_sq;
    } else {
        r.diss_director = -l1 * r.N_sq - (l2 - mu.mu2 - mu.mu3) * r.N_Ad;
        r.diss_Ad = (mu.mu5 + mu.mu6) * r.Ad_sq;
    }
    return r;
}

std::vector<double> energy_law_residual(std::span<const EnergyReport> history, const LeslieCoefficients& mu) {
    const std::size_t n = history.size();
    if (n < 3) throw UsageError("energy_law_residual: need at least 3 samples");
    const double h = history[1].t - history[0].t;
    if (!(h > 0.0)) throw UsageError("energy_law_residual: sample times must increase");
    for (std::size_t k = 1; k < n; ++k) {
        const double hk = history[k].t - history[k - 1].t;
        if (std::abs(hk - h) > 1e-9 * std::max(1.0, std::abs(h)) + 1e-6 * h)
            throw UsageError("energy_law_residual: samples are not uniformly spaced");
    }
    const bool parodi = satisfies_parodi(mu);
    const double eta = parodi ? 0.0 : optional_margin(mu);
    std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double dEdt = (history[k + 1].E_total - history[k - 1].E_total) / (history[k + 1].t - history[k - 1].t);
        const EnergyReport& r = history[k];
        if (parodi) {
            out[k] = dEdt + r.dissipation();
        } else {
            const double bound = -r.diss_mu1 - r.diss_mu4 - eta * (r.Ad_sq + r.N_sq);
            out[k] = std::max(0.0, dEdt - bound);
        }
    }
    return out;
}

double AppendixTerms::rhs_sum() const {
    double s = I15 + correction;
    for (double x : I) s += x;
    return s;
}

double AppendixTerms::scale() const {
    double s = std::abs(I15);
    for (double x : I) s = std::max(s, std::abs(x));
    for (double x : lhs) s = std::max(s, std::abs(x));
    return std::max(s, std::abs(correction));
}

AppendixTerms appendix_terms(const State& s, const LeslieCoefficients& mu) {
    const double l1 = mu.lambda1();
    if (l1 == 0.0) throw DomainError("appendix_terms: lambda1 = 0 violates (lama1a) lambda1 < 0");
    const double l2 = mu.lambda2();
    const TorusGrid& grid = s.grid();
    const int dim = grid.dim();
    const std::size_t np = grid.points();
    const double eps2 = mu.eps_penalty * mu.eps_penalty;
    Deriv D(grid);

    const StrainVorticity sv = strain_vorticity(s.v);
    const TensorField jv = jacobian(s.v);
    const TensorField jd = jacobian(s.d);
    const VectorField lap_v = laplacian(s.v);
    const VectorField lap_d = laplacian(s.d);
    const VectorField f = gl_force(s.d, mu.eps_penalty);
    VectorField G = lap_d;
    G -= f;
    const VectorField Ad = contract(sv.A, s.d);
    VectorField N = G;
    N += l2 * Ad;
    N *= -1.0 / l1;

    // Index helpers: grad_X[i*dim+j][l] = d/dx_l X_ij.
    std::vector<std::vector<RealBuffer>> gA(dim * dim), gW(dim * dim);
    std::vector<RealBuffer> lapA(dim * dim);
    for (int c = 0; c < dim * dim; ++c) {
        gA[c] = D.grad(sv.A.comp(c));
        gW[c] = D.grad(sv.Omega.comp(c));
        lapA[c] = D.lap(sv.A.comp(c));
    }
    std::vector<std::vector<RealBuffer>> gG(dim), gf(dim);
    for (int i = 0; i < dim; ++i) {
        gG[i] = D.grad(G.comp(i));
        gf[i] = D.grad(f.comp(i));
    }

    AppendixTerms t;
    auto& I = t.I;
    double L1 = 0, L2 = 0, L3 = 0, L4 = 0, I15 = 0, corr = 0;
    double dAl[3][3][3], dWl[3][3][3], gd[3][3], gg[3][3], gfl[3][3], dd[3], vv[3], A[3][3], W[3][3], Jv[3][3];
    double g[3], n[3], ad[3], ld[3], lv[3], fp[3][3], LA[3][3];
    for (std::size_t p = 0; p < np; ++p) {
        double s2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            dd[i] = s.d.comp(i)[p];
            vv[i] = s.v.comp(i)[p];
            g[i] = G.comp(i)[p];
            n[i] = N.comp(i)[p];
            ad[i] = Ad.comp(i)[p];
            ld[i] = lap_d.comp(i)[p];
            lv[i] = lap_v.comp(i)[p];
            s2 += dd[i] * dd[i];
            for (int j = 0; j < dim; ++j) {
                A[i][j] = sv.A(i, j)[p];
                W[i][j] = sv.Omega(i, j)[p];
                Jv[i][j] = jv(i, j)[p];
                gd[i][j] = jd(i, j)[p];  // d_j d_i
                LA[i][j] = lapA[i * dim + j][p];
            }
            for (int l = 0; l < dim; ++l) {
                gg[i][l] = gG[i][l][p];
                gfl[i][l] = gf[i][l][p];
            }
        }
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                fp[i][j] = ((i == j ? s2 - 1.0 : 0.0) + 2.0 * dd[i] * dd[j]) / eps2;
                for (int l = 0; l < dim; ++l) {
                    dAl[l][i][j] = gA[i * dim + j][l][p];
                    dWl[l][i][j] = gW[i * dim + j][l][p];
                }
            }
        double dAd = 0.0;
        for (int i = 0; i < dim; ++i) dAd += dd[i] * ad[i];

        double i1 = 0, i2 = 0, i3 = 0, i4 = 0, i5 = 0, i6 = 0, i7 = 0, i8 = 0, i9 = 0, i10 = 0;
        double i11 = 0, i12 = 0, i13 = 0, i14 = 0, l1s = 0, l2s = 0, l3s = 0, l4s = 0, i15 = 0, c14 = 0;
        for (int l = 0; l < dim; ++l) {
            double ddA = 0.0;   // d_k d_p d_l A_kp
            double Agdd = 0.0;  // A_kp d_l(d_k d_p)
            double gddA = 0.0;  // d_l(d_i d_j) d_l A_ij
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    const double dlddij = gd[i][l] * dd[j] + dd[i] * gd[j][l];
                    ddA += dd[i] * dd[j] * dAl[l][i][j];
                    Agdd += A[i][j] * dlddij;
                    gddA += dlddij * dAl[l][i][j];
                }
            l1s += ddA * ddA;
            i1 += Agdd * ddA;
            i2 += dAd * gddA;
            for (int i = 0; i < dim; ++i) {
                double dja = 0.0;    // d_j d_l A_ji
                double gadl = 0.0;   // d_l (A_ij d_j)
                for (int j = 0; j < dim; ++j) {
                    dja += dd[j] * dAl[l][j][i];
                    gadl += dAl[l][i][j] * dd[j] + A[i][j] * gd[j][l];
                }
                l3s += dja * dja;
                i9 += gadl * gadl;
                l4s += gg[i][l] * gg[i][l];
                for (int j = 0; j < dim; ++j) {
                    i3 += ad[i] * gd[j][l] * dAl[l][i][j];
                    double dkA = 0.0;  // d_l d_k A_ki
                    for (int k = 0; k < dim; ++k) dkA += gd[k][l] * A[k][i];
                    i4 += dd[j] * dkA * dAl[l][i][j];
                    i5 += gg[i][l] * W[i][j] * gd[j][l];
                    i6 += g[i] * dWl[l][i][j] * gd[j][l];
                    i7 += n[i] * dAl[l][i][j] * gd[j][l];
                    i13 += gg[i][j] * Jv[j][l] * gd[i][l];
                }
                i14 += g[i] * vv[l] * gfl[i][l];
                for (int k = 0; k < dim; ++k) c14 += g[i] * fp[i][k] * vv[l] * gd[k][l];
            }
        }
        double wd_l2ad[3];
        for (int i = 0; i < dim; ++i) {
            l2s += lv[i] * lv[i];
            wd_l2ad[i] = -(l2 / l1) * ad[i];
            for (int j = 0; j < dim; ++j) {
                i8 += n[i] * A[i][j] * ld[j];
                i10 += lv[i] * vv[j] * Jv[i][j];
                i15 += dd[j] * n[i] * LA[i][j];
                wd_l2ad[i] += W[i][j] * dd[j];
            }
        }
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                i11 += g[i] * fp[i][j] * g[j];
                i12 += g[i] * fp[i][j] * wd_l2ad[j];
            }
        L1 += l1s;
        L2 += l2s;
        L3 += l3s;
        L4 += l4s;
        I[0] += i1;
        I[1] += i2;
        I[2] += i3;
        I[3] += i4;
        I[4] += i5;
        I[5] += i6;
        I[6] += i7;
        I[7] += i8;
        I[8] += i9;
        I[9] += i10;
        I[10] += i11;
        I[11] += i12;
        I[12] += i13;
        I[13] += i14;
        I15 += i15;
        corr += c14;
    }
    const double h = grid.cell_volume();
    const double m56 = mu.mu5 + mu.mu6;
    const double coef[14] = {-mu.mu1, -mu.mu1, -m56, -m56, -1.0, 1.0, 2.0 * l2, l2, -l2 * l2 / l1, 1.0, 1.0 / l1, -1.0, 2.0, -1.0};
    for (int k = 0; k < 14; ++k) I[k] *= coef[k] * h;
    t.lhs = {mu.mu1 * L1 * h, 0.5 * mu.mu4 * L2 * h, m56 * L3 * h, -L4 * h / l1};
    t.lhs_extra = t.lhs[0] + t.lhs[1] + t.lhs[2] + t.lhs[3];
    t.I15 = satisfies_parodi(mu) ? 0.0 : (l2 + mu.mu2 + mu.mu3) * I15 * h;
    t.correction = corr * h;
    t.A = inner(jv, jv) + inner(G, G);
    t.closure_error = std::numeric_limits<double>::quiet_NaN();
    return t;
}

AppendixTerms appendix_closure(const State& s0, const State& s1, const LeslieCoefficients& mu) {
    const double dt = s1.t - s0.t;
    if (!(dt > 0.0)) throw UsageError("appendix_closure: states must be ordered in time");
    AppendixTerms t = appendix_terms(s0, mu);
    const TensorField jv = jacobian(s1.v);
    const VectorField G = molecular_field(s1.d, mu.eps_penalty);
    const double A1 = inner(jv, jv) + inner(G, G);
    const double half_rate = 0.5 * (A1 - t.A) / dt;
    const double scale = std::max(t.scale(), std::abs(half_rate));
    t.closure_error = scale > 0.0 ? std::abs(half_rate - (t.rhs_sum() - t.lhs_extra)) / scale : 0.0;
    return t;
}

double equilibrium_distance(const State& s, double eps_penalty) {
    return norm_h1(s.v) + norm_l2(molecular_field(s.d, eps_penalty));
}

ConvergenceReport convergence_monitor(std::span<const DecaySample> history, double threshold) {
    ConvergenceReport r;
    r.decay_curve.assign(history.begin(), history.end());
    if (history.empty()) return r;
    const double D0 = history.front().D;
    for (const auto& s : history)
        if (s.D <= threshold * D0) {
            r.below_threshold_time = s.t;
            break;
        }
    const std::size_t half = history.size() / 2;
    for (std::size_t k = half + 1; k < history.size(); ++k)
        if (history[k].D > history[k - 1].D) r.eventually_monotone = false;

    // Least squares of log D against log(1 + t) over the tail.
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::size_t cnt = 0;
    for (std::size_t k = half; k < history.size(); ++k) {
        if (!(history[k].D > 0.0)) continue;
        const double x = std::log1p(history[k].t);
        const double y = std::log(history[k].D);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++cnt;
    }
    if (cnt >= 3 && D0 > 0.0) {
        const double c = static_cast<double>(cnt);
        const double vx = sxx - sx * sx / c;
        const double vy = syy - sy * sy / c;
        const double cxy = sxy - sx * sy / c;
        if (vx > 0.0 && cxy < 0.0) {
            r.fitted_power = -cxy / vx;
            r.r_squared = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
        }
    }
    return r;
}

}  // namespace elc
