#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "elc/errors.hpp"
#include "elc/io.hpp"
#include "elc/solver.hpp"

namespace elc {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

template <class F>
void fill(VectorField& f, F&& fn) {
    const TorusGrid& g = f.grid();
    for (std::size_t p = 0; p < g.points(); ++p) {
        const auto idx = g.index_of(p);
        double x[3] = {0.0, 0.0, 0.0};
        for (int a = 0; a < g.dim(); ++a) x[a] = g.coordinate(idx[a]);
        fn(p, x);
    }
}

void set_constant(VectorField& d, const Vec3& value) {
    for (int i = 0; i < d.dim(); ++i) std::ranges::fill(d.comp(i), value[i]);
}

void require_in_plane(const Vec3& v, int dim, const char* what) {
    if (dim == 2 && v[2] != 0.0) throw UsageError(std::string(what) + " has a z component on a 2D grid");
}

State taylor_green(const TorusGrid& grid, const init::TaylorGreen& tg) {
    if (tg.wavenumber < 1) throw UsageError("taylor_green: wavenumber must be >= 1");
    if (3 * tg.wavenumber > grid.n()) throw UsageError("taylor_green: wavenumber not resolved by the grid");
    require_in_plane(tg.director, grid.dim(), "taylor_green director");
    State s(grid);
    const double k = tg.wavenumber * grid.base_wavenumber();
    const double a = tg.amplitude;
    const bool three = grid.dim() == 3;
    fill(s.v, [&](std::size_t p, const double* x) {
        const double cz = three ? std::cos(k * x[2]) : 1.0;
        s.v.comp(0)[p] = a * std::sin(k * x[0]) * std::cos(k * x[1]) * cz;
        s.v.comp(1)[p] = -a * std::cos(k * x[0]) * std::sin(k * x[1]) * cz;
    });
    set_constant(s.d, tg.director);
    return s;
}

State plane_wave(const TorusGrid& grid, const init::ConstantDirectorPerturbed& spec) {
    const PlaneWaveMode& mode = spec.mode;
    require_in_plane(spec.n, grid.dim(), "director n");
    require_in_plane(mode.nu, grid.dim(), "propagation direction nu");
    require_in_plane(mode.b, grid.dim(), "velocity amplitude b");
    require_in_plane(mode.a, grid.dim(), "director amplitude a");
    double nub = 0.0;
    for (int i = 0; i < 3; ++i) nub += mode.nu[i] * mode.b[i];
    if (std::abs(nub) > 1e-12) throw UsageError("plane wave velocity amplitude is not transverse (nu . b != 0)");
    for (int a = 0; a < grid.dim(); ++a) {
        const double periods = mode.m * mode.nu[a] * grid.length() / two_pi;
        if (std::abs(periods - std::round(periods)) > 1e-9) {
            std::ostringstream os;
            os << "plane wave m nu_" << a << " = " << mode.m * mode.nu[a]
               << " is not periodic on a box of length " << grid.length();
            throw UsageError(os.str());
        }
    }
    State s(grid);
    fill(s.v, [&](std::size_t p, const double* x) {
        double phase = 0.0;
        for (int a = 0; a < grid.dim(); ++a) phase += mode.m * mode.nu[a] * x[a];
        const double c = spec.amplitude * std::cos(phase);
        for (int i = 0; i < grid.dim(); ++i) {
            s.v.comp(i)[p] = c * mode.b[i];
            s.d.comp(i)[p] = spec.n[i] + c * mode.a[i];
        }
    });
    return s;
}

/// Sum of random Fourier modes with |k_a| <= band, k != 0; one field per component.
VectorField random_band(const TorusGrid& grid, int band, std::mt19937_64& rng) {
    const int dim = grid.dim();
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<std::array<int, 3>> ks;
    const int kz = dim == 3 ? band : 0;
    for (int i = -band; i <= band; ++i)
        for (int j = -band; j <= band; ++j)
            for (int l = -kz; l <= kz; ++l) {
                // One representative per +/- pair.
                const std::array<int, 3> k{i, j, l};
                const bool positive = i > 0 || (i == 0 && j > 0) || (i == 0 && j == 0 && l > 0);
                if (positive) ks.push_back(k);
            }
    VectorField f(grid);
    const double k0 = grid.base_wavenumber();
    for (int c = 0; c < dim; ++c) {
        for (const auto& k : ks) {
            const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            const double w = 1.0 / (1.0 + k2);
            const double ac = w * unif(rng);
            const double as = w * unif(rng);
            auto comp = f.comp(c);
            fill(f, [&](std::size_t p, const double* x) {
                const double phase = k0 * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
                comp[p] += ac * std::cos(phase) + as * std::sin(phase);
            });
        }
    }
    return f;
}

double rms(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

State random_smooth(const TorusGrid& grid, const init::RandomSmooth& spec) {
    if (spec.band < 1) throw UsageError("random_smooth: band must be >= 1");
    if (3 * spec.band > grid.n()) throw UsageError("random_smooth: band not resolved by the grid");
    require_in_plane(spec.director_base, grid.dim(), "random_smooth director_base");
    std::mt19937_64 rng(spec.seed);
    State s(grid);
    s.v = leray_project(random_band(grid, spec.band, rng));
    const double vr = rms(s.v.values());
    if (vr > 0.0) s.v *= spec.velocity_amplitude / vr;
    VectorField pert = random_band(grid, spec.band, rng);
    for (int i = 0; i < grid.dim(); ++i) {
        auto c = pert.comp(i);
        const double r = rms(c);
        const double scale = r > 0.0 ? spec.director_amplitude / r : 0.0;
        auto d = s.d.comp(i);
        for (std::size_t p = 0; p < c.size(); ++p) d[p] = spec.director_base[i] + scale * c[p];
    }
    return s;
}

}  // namespace

VectorField random_band_field(const TorusGrid& grid, int band, std::uint64_t seed) {
    if (band < 1) throw UsageError("random_band_field: band must be >= 1");
    std::mt19937_64 rng(seed);
    return random_band(grid, band, rng);
}

State initial_state(const RunConfig& cfg) {
    const TorusGrid& grid = cfg.grid;
    return std::visit(
        [&](const auto& spec) -> State {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, init::TaylorGreen>) {
                return taylor_green(grid, spec);
            } else if constexpr (std::is_same_v<T, init::ConstantDirectorPerturbed>) {
                return plane_wave(grid, spec);
            } else if constexpr (std::is_same_v<T, init::RandomSmooth>) {
                return random_smooth(grid, spec);
            } else {
                Snapshot snap = read_snapshot(spec.path);
                if (!(snap.grid == grid)) throw UsageError("snapshot " + spec.path + " does not match the configured grid");
                State s(grid);
                s.v = snap.field("v");
                s.d = snap.field("d");
                s.t = snap.t;
                return s;
            }
        },
        cfg.init);
}

}  // namespace elc
