#include "elc/constitutive.hpp"

#include <cmath>
#include <sstream>

#include "elc/errors.hpp"

namespace elc {

namespace {

template <FieldKind K>
GridField<K> finish(GridField<K>&& f, ProductMode mode) {
    if (mode == ProductMode::Pointwise) return std::move(f);
    return dealias(f);
}

}  // namespace

VectorField gl_force(const VectorField& d, double eps_penalty) {
    if (!(eps_penalty > 0.0)) throw DomainError("gl_force: eps_penalty must be positive");
    const int dim = d.dim();
    const double inv_eps2 = 1.0 / (eps_penalty * eps_penalty);
    VectorField f(d.grid());
    for (std::size_t p = 0; p < d.points(); ++p) {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += d.comp(i)[p] * d.comp(i)[p];
        const double w = inv_eps2 * (s - 1.0);
        for (int i = 0; i < dim; ++i) f.comp(i)[p] = w * d.comp(i)[p];
    }
    return f;
}

double penalty_energy(const VectorField& d, double eps_penalty) {
    const int dim = d.dim();
    double sum = 0.0;
    for (std::size_t p = 0; p < d.points(); ++p) {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += d.comp(i)[p] * d.comp(i)[p];
        sum += (s - 1.0) * (s - 1.0);
    }
    return sum * d.grid().cell_volume() / (4.0 * eps_penalty * eps_penalty);
}

VectorField contract(const TensorField& A, const VectorField& d) {
    require_same_grid(A.grid(), d.grid(), "contract");
    const int dim = d.dim();
    VectorField out(d.grid());
    for (int i = 0; i < dim; ++i) {
        auto o = out.comp(i);
        for (int j = 0; j < dim; ++j) {
            const auto a = A(i, j);
            const auto dj = d.comp(j);
            for (std::size_t p = 0; p < d.points(); ++p) o[p] += a[p] * dj[p];
        }
    }
    return out;
}

ScalarField quadratic_form(const TensorField& A, const VectorField& d) {
    const VectorField Ad = contract(A, d);
    ScalarField out(d.grid());
    auto o = out.comp(0);
    for (int i = 0; i < d.dim(); ++i) {
        const auto di = d.comp(i);
        const auto adi = Ad.comp(i);
        for (std::size_t p = 0; p < d.points(); ++p) o[p] += di[p] * adi[p];
    }
    return out;
}

TensorField outer(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid(), b.grid(), "outer");
    const int dim = a.dim();
    TensorField out(a.grid());
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            auto o = out(i, j);
            const auto ai = a.comp(i);
            const auto bj = b.comp(j);
            for (std::size_t p = 0; p < a.points(); ++p) o[p] = ai[p] * bj[p];
        }
    return out;
}

KinematicTerms kinematic_terms(const VectorField& v, const VectorField& d, const VectorField& d_t,
                               ProductMode mode) {
    require_same_grid(v.grid(), d.grid(), "kinematic_terms");
    require_same_grid(v.grid(), d_t.grid(), "kinematic_terms");
    const int dim = d.dim();
    const StrainVorticity sv = strain_vorticity(v);
    const TensorField grad_d = jacobian(d);

    VectorField N = d_t;
    for (int i = 0; i < dim; ++i) {
        auto n = N.comp(i);
        for (int j = 0; j < dim; ++j) {
            const auto vj = v.comp(j);
            const auto dij = grad_d(i, j);
            const auto wij = sv.Omega(i, j);
            const auto dj = d.comp(j);
            for (std::size_t p = 0; p < d.points(); ++p) n[p] += vj[p] * dij[p] - wij[p] * dj[p];
        }
    }
    KinematicTerms out{std::move(N), contract(sv.A, d), quadratic_form(sv.A, d)};
    if (mode == ProductMode::Dealiased) {
        out.N = dealias(out.N);
        out.Adotd = dealias(out.Adotd);
        out.dTAd = dealias(out.dTAd);
    }
    return out;
}

TensorField leslie_stress(const TensorField& A, const TensorField& /*Omega*/, const VectorField& N,
                          const VectorField& d, const LeslieCoefficients& mu, ProductMode mode) {
    require_same_grid(A.grid(), d.grid(), "leslie_stress");
    require_same_grid(N.grid(), d.grid(), "leslie_stress");
    const int dim = d.dim();
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            const auto aij = A(i, j);
            const auto aji = A(j, i);
            for (std::size_t p = 0; p < d.points(); ++p)
                if (!(std::abs(aij[p] - aji[p]) <= 1e-10)) {
                    std::ostringstream os;
                    os << "leslie_stress: strain rate asymmetric at point " << p << " component (" << i
                       << "," << j << "), |A_ij - A_ji| = " << std::abs(aij[p] - aji[p]);
                    throw DataError(os.str());
                }
        }

    const VectorField Ad = contract(A, d);
    const ScalarField dAd = quadratic_form(A, d);
    const auto q = dAd.comp(0);
    TensorField s(d.grid());
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            auto o = s(i, j);
            const auto di = d.comp(i);
            const auto dj = d.comp(j);
            const auto ni = N.comp(i);
            const auto nj = N.comp(j);
            const auto adi = Ad.comp(i);
            const auto adj = Ad.comp(j);
            const auto aij = A(i, j);
            for (std::size_t p = 0; p < d.points(); ++p) {
                o[p] = mu.mu1 * q[p] * di[p] * dj[p] + mu.mu2 * ni[p] * dj[p] + mu.mu3 * di[p] * nj[p] +
                       mu.mu4 * aij[p] + mu.mu5 * adi[p] * dj[p] + mu.mu6 * di[p] * adj[p];
            }
        }
    return finish(std::move(s), mode);
}

TensorField ericksen_stress(const VectorField& d, ProductMode mode) {
    const int dim = d.dim();
    const TensorField J = jacobian(d);
    TensorField e(d.grid());
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            auto o = e(i, j);
            for (int k = 0; k < dim; ++k) {
                const auto ki = J(k, i);
                const auto kj = J(k, j);
                for (std::size_t p = 0; p < d.points(); ++p) o[p] += ki[p] * kj[p];
            }
        }
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < i; ++j) std::ranges::copy(e(j, i), e(i, j).begin());
    if (mode == ProductMode::Pointwise) return e;
    // Dealiasing each entry separately keeps the result exactly symmetric.
    return dealias(e);
}

TensorField stress_split(const VectorField& d, const VectorField& G, double lambda1, double lambda2,
                         ProductMode mode) {
    if (lambda1 == 0.0) throw DomainError("stress_split: lambda1 = 0 violates (lama1a) lambda1 < 0");
    require_same_grid(d.grid(), G.grid(), "stress_split");
    const double r = lambda2 / lambda1;
    const double cg = -0.5 * (1.0 - r);
    const double cd = 0.5 * (1.0 + r);
    const int dim = d.dim();
    TensorField s(d.grid());
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            auto o = s(i, j);
            const auto gi = G.comp(i);
            const auto gj = G.comp(j);
            const auto di = d.comp(i);
            const auto dj = d.comp(j);
            for (std::size_t p = 0; p < d.points(); ++p) o[p] = cg * gi[p] * dj[p] + cd * di[p] * gj[p];
        }
    return finish(std::move(s), mode);
}

double stress_power_dissipation(const TensorField& sigma, const StrainVorticity& sv,
                                const VectorField& N, const VectorField& d,
                                const LeslieCoefficients& mu) {
    const int dim = d.dim();
    double power = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            ScalarField gv(d.grid());
            ScalarField s(d.grid());
            std::ranges::copy(sigma(i, j), s.comp(0).begin());
            auto g = gv.comp(0);
            const auto a = sv.A(i, j);
            const auto w = sv.Omega(i, j);
            for (std::size_t p = 0; p < d.points(); ++p) g[p] = a[p] + w[p];
            power += inner(s, gv);
        }
    const VectorField Ad = contract(sv.A, d);
    const VectorField Wd = contract(sv.Omega, d);
    const double l1 = mu.lambda1();
    const double l2 = mu.lambda2();
    VectorField force = l1 * N;
    force += l2 * Ad;
    VectorField rate = N;
    rate += Wd;
    return power - inner(force, rate);
}

double parodi_dissipation(const StrainVorticity& sv, const VectorField& N, const VectorField& d,
                          const LeslieCoefficients& mu) {
    const double l1 = mu.lambda1();
    const double l2 = mu.lambda2();
    const VectorField Ad = contract(sv.A, d);
    const ScalarField dAd = quadratic_form(sv.A, d);
    VectorField shifted = N;
    shifted += (l2 / l1) * Ad;
    const double grad_v_sq = inner(sv.A, sv.A) + inner(sv.Omega, sv.Omega);
    return mu.mu1 * inner(dAd, dAd) + 0.5 * mu.mu4 * grad_v_sq - l1 * inner(shifted, shifted) +
           (mu.mu5 + mu.mu6 + l2 * l2 / l1) * inner(Ad, Ad);
}

}  // namespace elc
