#include "elc/linstab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "elc/errors.hpp"

namespace elc {

namespace {

using cplx = std::complex<double>;
constexpr cplx I(0.0, 1.0);

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

void validate_unstable_params(const LeslieUnstableParams& params) {
    const auto& mu = params.mu;
    const double eps = params.epsilon_leslie;
    if (!(mu.mu6 > 0.0 && mu.mu2 > 0.0))
        throw DomainError("unstable family requires mu6 > 0 and mu2 > 0 (Le1)");
    if (!(mu.mu5 < std::min(mu.mu2, mu.mu6)))
        throw DomainError("unstable family requires mu5 < min(mu2, mu6) (Le2)");
    const double mu3 = mu.mu6 - mu.mu5 + mu.mu2 - eps;
    if (std::abs(mu.mu3 - mu3) > 1e-12 * std::max(1.0, mu.abs_sum()))
        throw DomainError("unstable family requires mu3 = mu6 - mu5 + mu2 - epsilon (Le3a); expected " +
                          fmt(mu3) + ", got " + fmt(mu.mu3));
    const double bound = std::min({mu.mu6 - mu.mu5, 2.0 * mu.mu2,
                                   2.0 * (mu.mu6 - mu.mu5) * (mu.mu2 - mu.mu5) /
                                       (4.0 * mu.mu6 - 3.0 * mu.mu5 + 3.0 * mu.mu2)});
    if (!(eps > 0.0 && eps < bound))
        throw DomainError("epsilon = " + fmt(eps) + " outside (0, " + fmt(bound) + ") (Le3)");
}

void validate_instability_bounds(const LeslieUnstableParams& params, double theta0) {
    const auto& mu = params.mu;
    const double s = 2.0 * mu.mu6 - mu.mu5 + mu.mu2;
    if (!(mu.mu1 >= 0.0 && mu.mu1 < 0.25 * s))
        throw DomainError("mu1 = " + fmt(mu.mu1) + " outside [0, " + fmt(0.25 * s) + ") (Le4)");
    const double c = std::cos(theta0);
    const double bound = 0.5 * s * c * c;
    if (!(mu.mu4 >= 0.0 && mu.mu4 < bound))
        throw DomainError("mu4 = " + fmt(mu.mu4) + " outside [0, " + fmt(bound) +
                          ") (Le5): viscosity too large for instability");
}

Gpq gpq(double theta, const LeslieCoefficients& mu) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double c2 = c * c;
    const double s2 = s * s;
    const double l1 = mu.lambda1();
    const double l2 = mu.lambda2();
    return {2.0 * mu.mu1 * c2 * s2 + (mu.mu3 + mu.mu6) * c2 + mu.mu4 + (mu.mu5 - mu.mu2) * s2,
            mu.mu2 * s2 - mu.mu3 * c2, (l1 + l2) * c2 + (l1 - l2) * s2};
}

std::optional<double> solve_pq_system(const LeslieCoefficients& mu) {
    if (!(mu.lambda1() < 0.0)) throw DomainError("lambda1 >= 0 violates (lama1a) lambda1 < 0");
    if (!(std::abs(mu.mu5 - mu.mu6) >= mu.mu3 - mu.mu2))
        throw DomainError("|mu5 - mu6| >= mu3 - mu2 > 0 is violated");
    if (!(mu.mu2 * mu.mu3 >= 0.0)) throw DomainError("mu2 * mu3 >= 0 is violated");
    if (!satisfies_parodi(mu)) return std::nullopt;
    return std::atan2(std::sqrt(std::abs(mu.mu3)), std::sqrt(std::abs(mu.mu2)));
}

double solve_theta0_unstable(const LeslieUnstableParams& params) {
    validate_unstable_params(params);
    const auto& mu = params.mu;
    const double eps = params.epsilon_leslie;
    double theta = std::atan(std::sqrt((2.0 * (mu.mu6 - mu.mu5) - eps) / eps));
    // One Newton pass on q; kept only if it reduces the residual.
    const double l2 = mu.lambda2();
    const double q0 = gpq(theta, mu).q;
    const double dq = -2.0 * l2 * std::sin(2.0 * theta);
    if (dq != 0.0) {
        const double t1 = theta - q0 / dq;
        if (std::abs(gpq(t1, mu).q) < std::abs(q0)) theta = t1;
    }
    return theta;
}

std::complex<double> dispersion_residual(std::complex<double> omega, double m, double theta,
                                         const LeslieCoefficients& mu) {
    const Gpq c = gpq(theta, mu);
    const double l1 = mu.lambda1();
    const double m2 = m * m;
    return l1 * omega * omega + I * m2 * (l1 * c.g / 2.0 + c.p * c.q / 2.0 - 1.0) * omega +
           m2 * m2 * c.g / 2.0;
}

std::pair<std::complex<double>, std::complex<double>> dispersion_roots(double m, double theta,
                                                                      const LeslieCoefficients& mu) {
    const double l1 = mu.lambda1();
    if (l1 == 0.0) throw DomainError("dispersion_roots: lambda1 = 0 violates (lama1a) lambda1 < 0");
    if (m == 0.0) return {0.0, 0.0};
    const Gpq c = gpq(theta, mu);
    const double m2 = m * m;
    const cplx qa = l1;
    const cplx qb = I * m2 * (l1 * c.g / 2.0 + c.p * c.q / 2.0 - 1.0);
    const cplx qc = m2 * m2 * c.g / 2.0;
    cplx root = std::sqrt(qb * qb - 4.0 * qa * qc);
    if (std::real(std::conj(qb) * root) < 0.0) root = -root;
    const cplx t = -0.5 * (qb + root);
    cplx w1 = t / qa;
    cplx w2 = (t != 0.0) ? qc / t : cplx(0.0);
    if (w1.imag() > w2.imag()) std::swap(w1, w2);
    return {w1, w2};
}

bool is_stable(const std::pair<std::complex<double>, std::complex<double>>& roots, double tol) {
    return roots.first.imag() <= tol && roots.second.imag() <= tol;
}

std::pair<Vec3, Vec3> in_plane_geometry(double theta, double phi) {
    const Vec3 nu{std::cos(phi), std::sin(phi), 0.0};
    const Vec3 perp{-std::sin(phi), std::cos(phi), 0.0};
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    return {nu, {s * nu[0] + c * perp[0], s * nu[1] + c * perp[1], 0.0}};
}

PlaneWaveMode unstable_mode(const LeslieUnstableParams& params, double m, const Vec3& nu, const Vec3& n) {
    if (m == 0.0) throw UsageError("unstable_mode: wave number must be nonzero");
    const double theta0 = solve_theta0_unstable(params);
    validate_instability_bounds(params, theta0);
    const auto& mu = params.mu;
    const double s = std::sin(theta0);
    if (std::abs(dot(nu, nu) - 1.0) > 1e-10 || std::abs(dot(n, n) - 1.0) > 1e-10)
        throw UsageError("unstable_mode: nu and n must be unit vectors");
    if (std::abs(dot(nu, n) - s) > 1e-10)
        throw UsageError("unstable_mode: nu . n = " + fmt(dot(nu, n)) + " differs from sin(theta0) = " + fmt(s));

    const double g = gpq(theta0, mu).g;
    PlaneWaveMode mode;
    mode.theta = theta0;
    mode.m = m;
    mode.nu = nu;
    mode.n = n;
    mode.a = {0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i) mode.b[i] = n[i] - nu[i] * s;
    mode.omega = -I * m * m * g / 2.0;
    mode.C = (m * s / 2.0) * (g + mu.mu2 - mu.mu4 + mu.mu5 * std::cos(2.0 * theta0)) * I;
    mode.D = -((mu.lambda2() - mu.lambda1()) / 2.0) * I * m * s;
    mode.growth_rate = mode.omega.imag();
    return mode;
}

double LinearizedResidual::max() const {
    return std::max({momentum, incompressibility, director, constraint});
}

LinearizedResidual linearized_residual(const PlaneWaveMode& mode, const LeslieCoefficients& mu) {
    const auto& n = mode.n;
    const auto& nu = mode.nu;
    const cplx w = mode.omega;
    const cplx ik = I * mode.m;  // d/dx_j -> ik nu_j
    const cplx dt = -I * w;      // d/dt  -> -i omega
    const cplx pressure = mode.C;
    const cplx tension = mode.D;
    const double l1 = mu.lambda1();
    const double l2 = mu.lambda2();
    const double nnu = dot(n, nu);
    const double nb = dot(n, mode.b);
    const double na = dot(n, mode.a);
    const double nua = dot(nu, mode.a);

    LinearizedResidual r;
    for (int i = 0; i < 3; ++i) {
        const cplx terms[] = {
            dt * mode.b[i],
            ik * nu[i] * pressure,
            -mu.mu1 * n[i] * nnu * nnu * nb * ik * ik,
            -(mu.mu2 + mu.mu5) / 2.0 * nnu * nb * nu[i] * ik * ik,
            -(mu.mu3 + mu.mu6) / 2.0 * n[i] * nb * ik * ik,
            -mu.mu4 / 2.0 * mode.b[i] * ik * ik,
            -(mu.mu5 - mu.mu2) / 2.0 * nnu * nnu * mode.b[i] * ik * ik,
            -mu.mu2 * nnu * ik * dt * mode.a[i],
            -mu.mu3 * n[i] * ik * dt * nua,
        };
        cplx sum = 0.0;
        double scale = 0.0;
        for (const cplx& t : terms) {
            sum += t;
            scale = std::max(scale, std::abs(t));
        }
        r.momentum = std::max(r.momentum, scale > 0.0 ? std::abs(sum) / scale : 0.0);

        const cplx dterms[] = {
            -l1 * dt * mode.a[i],
            -tension * n[i],
            -mode.a[i] * ik * ik,
            (l1 - l2) / 2.0 * nnu * ik * mode.b[i],
            -(l1 + l2) / 2.0 * nb * ik * nu[i],
        };
        sum = 0.0;
        scale = 0.0;
        for (const cplx& t : dterms) {
            sum += t;
            scale = std::max(scale, std::abs(t));
        }
        r.director = std::max(r.director, scale > 0.0 ? std::abs(sum) / scale : 0.0);
    }
    const double bnorm = std::sqrt(dot(mode.b, mode.b));
    const double anorm = std::sqrt(dot(mode.a, mode.a));
    r.incompressibility = bnorm > 0.0 ? std::abs(dot(nu, mode.b)) / bnorm : 0.0;
    r.constraint = anorm > 0.0 ? std::abs(na) / anorm : 0.0;
    return r;
}

}  // namespace elc
