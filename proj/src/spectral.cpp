#include "elc/spectral.hpp"

#include <fftw3.h>

#include <cstdlib>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "elc/errors.hpp"

namespace elc {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool fftw_aligned(const void* p) {
    return fftw_alignment_of(reinterpret_cast<double*>(const_cast<void*>(p))) == 0;
}

template <FieldKind K>
void require_finite(const GridField<K>& f, const char* where) {
    if (!f.all_finite()) throw DataError(std::string(where) + ": input field contains NaN or Inf");
}

}  // namespace

int fft_thread_count() {
    static const int count = [] {
        const char* env = std::getenv("ELC_THREADS");
        if (env == nullptr) return 1;
        const int v = std::atoi(env);
        return v > 0 ? v : 1;
    }();
    return count;
}

Spectral::Spectral(const TorusGrid& grid) : grid_(grid), modes_(0) {
    const int dim = grid.dim();
    const int n = grid.n();
    const int nh = n / 2 + 1;
    modes_ = (dim == 2) ? static_cast<std::size_t>(n) * nh : static_cast<std::size_t>(n) * n * nh;

    {
        std::lock_guard lock(planner_mutex());
        static const bool threads_ready = [] {
            if (fft_thread_count() > 1) {
                fftw_init_threads();
                fftw_plan_with_nthreads(fft_thread_count());
            }
            return true;
        }();
        (void)threads_ready;

        RealBuffer r(grid.points());
        ComplexBuffer c(modes_);
        const int dims[3] = {n, n, n};
        auto* cptr = reinterpret_cast<fftw_complex*>(c.data());
        plan_r2c_ = fftw_plan_dft_r2c(dim, dims, r.data(), cptr, FFTW_ESTIMATE);
        plan_c2r_ = fftw_plan_dft_c2r(dim, dims, cptr, r.data(), FFTW_ESTIMATE);
        if (plan_r2c_ == nullptr || plan_c2r_ == nullptr) throw Error("FFTW plan creation failed");
    }

    index_.assign(dim, std::vector<int>(modes_));
    kd_.assign(dim, std::vector<double>(modes_));
    k2_.assign(modes_, 0.0);
    dealias_out_.assign(modes_, 0);
    mult_.assign(modes_, 2.0);

    const double k0 = grid.base_wavenumber();
    auto signed_index = [n](int i) { return i <= n / 2 ? i : i - n; };
    for (std::size_t m = 0; m < modes_; ++m) {
        std::array<int, 3> idx{};
        std::size_t rest = m;
        idx[dim - 1] = static_cast<int>(rest % nh);
        rest /= nh;
        for (int a = dim - 2; a >= 0; --a) {
            idx[a] = signed_index(static_cast<int>(rest % n));
            rest /= n;
        }
        double k2 = 0.0;
        bool out = false;
        for (int a = 0; a < dim; ++a) {
            index_[a][m] = idx[a];
            const bool nyquist = std::abs(idx[a]) == n / 2;
            kd_[a][m] = nyquist ? 0.0 : k0 * idx[a];
            k2 += (k0 * idx[a]) * (k0 * idx[a]);
            if (3 * std::abs(idx[a]) > n) out = true;
        }
        k2_[m] = k2;
        dealias_out_[m] = out ? 1 : 0;
        if (idx[dim - 1] == 0 || idx[dim - 1] == n / 2) mult_[m] = 1.0;
    }
}

Spectral::~Spectral() {
    std::lock_guard lock(planner_mutex());
    if (plan_r2c_) fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
    if (plan_c2r_) fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
}

std::shared_ptr<const Spectral> Spectral::for_grid(const TorusGrid& grid) {
    static std::mutex cache_mutex;
    static std::map<std::tuple<int, int, double>, std::shared_ptr<const Spectral>> cache;
    std::lock_guard lock(cache_mutex);
    const auto key = std::make_tuple(grid.dim(), grid.n(), grid.length());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto sp = std::make_shared<const Spectral>(grid);
    cache.emplace(key, sp);
    return sp;
}

void Spectral::forward(std::span<const double> real, std::span<Complex> coeffs) const {
    const double scale = 1.0 / static_cast<double>(grid_.points());
    auto run = [&](const double* in, Complex* out) {
        fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_r2c_), const_cast<double*>(in),
                             reinterpret_cast<fftw_complex*>(out));
    };
    if (fftw_aligned(real.data()) && fftw_aligned(coeffs.data())) {
        run(real.data(), coeffs.data());
    } else {
        thread_local RealBuffer rin;
        thread_local ComplexBuffer cout;
        rin.assign(real.begin(), real.end());
        cout.resize(modes_);
        run(rin.data(), cout.data());
        std::copy(cout.begin(), cout.end(), coeffs.begin());
    }
    for (auto& c : coeffs) c *= scale;
}

void Spectral::inverse(std::span<const Complex> coeffs, std::span<double> real) const {
    // c2r overwrites its input, so always work on a private copy.
    thread_local ComplexBuffer scratch;
    scratch.assign(coeffs.begin(), coeffs.end());
    if (fftw_aligned(real.data())) {
        fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_),
                             reinterpret_cast<fftw_complex*>(scratch.data()), real.data());
    } else {
        thread_local RealBuffer rout;
        rout.resize(grid_.points());
        fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_),
                             reinterpret_cast<fftw_complex*>(scratch.data()), rout.data());
        std::copy(rout.begin(), rout.end(), real.begin());
    }
}

int Spectral::index_norm_sq(std::size_t mode) const noexcept {
    int s = 0;
    for (int a = 0; a < grid_.dim(); ++a) s += index_[a][mode] * index_[a][mode];
    return s;
}

void Spectral::derivative(int axis, std::span<const Complex> in, std::span<Complex> out) const {
    const auto& k = kd_[axis];
    for (std::size_t m = 0; m < modes_; ++m) out[m] = Complex(-k[m] * in[m].imag(), k[m] * in[m].real());
}

void Spectral::apply_dealias(std::span<Complex> coeffs) const {
    for (std::size_t m = 0; m < modes_; ++m)
        if (dealias_out_[m]) coeffs[m] = 0.0;
}

void Spectral::apply_dealias(SpectralData& s) const {
    for (int c = 0; c < s.components(); ++c) apply_dealias(s.comp(c));
}

void Spectral::project(SpectralData& v) const {
    const int dim = grid_.dim();
    for (std::size_t m = 0; m < modes_; ++m) {
        double kk = 0.0;
        for (int a = 0; a < dim; ++a) kk += kd_[a][m] * kd_[a][m];
        if (kk == 0.0) continue;
        Complex kv = 0.0;
        for (int a = 0; a < dim; ++a) kv += kd_[a][m] * v.comp(a)[m];
        const Complex s = kv / kk;
        for (int a = 0; a < dim; ++a) v.comp(a)[m] -= kd_[a][m] * s;
    }
}

double Spectral::parseval_sum(std::span<const Complex> coeffs) const {
    double sum = 0.0;
    for (std::size_t m = 0; m < modes_; ++m) sum += mult_[m] * std::norm(coeffs[m]);
    const double L = grid_.length();
    return sum * (grid_.dim() == 2 ? L * L : L * L * L);
}

VectorField gradient(const ScalarField& f) {
    require_finite(f, "gradient");
    const auto sp = Spectral::for_grid(f.grid());
    SpectralData s = sp->forward(f);
    VectorField out(f.grid());
    ComplexBuffer tmp(sp->modes());
    for (int a = 0; a < f.dim(); ++a) {
        sp->derivative(a, s.comp(0), tmp);
        sp->inverse(tmp, out.comp(a));
    }
    return out;
}

ScalarField divergence(const VectorField& v) {
    require_finite(v, "divergence");
    const auto sp = Spectral::for_grid(v.grid());
    SpectralData s = sp->forward(v);
    ComplexBuffer acc(sp->modes(), Complex(0.0));
    ComplexBuffer tmp(sp->modes());
    for (int a = 0; a < v.dim(); ++a) {
        sp->derivative(a, s.comp(a), tmp);
        for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += tmp[m];
    }
    ScalarField out(v.grid());
    sp->inverse(acc, out.comp(0));
    return out;
}

namespace {

template <FieldKind K>
GridField<K> laplacian_impl(const GridField<K>& f) {
    require_finite(f, "laplacian");
    const auto sp = Spectral::for_grid(f.grid());
    SpectralData s = sp->forward(f);
    for (int c = 0; c < s.components(); ++c) {
        auto comp = s.comp(c);
        for (std::size_t m = 0; m < sp->modes(); ++m) comp[m] *= -sp->k_squared(m);
    }
    GridField<K> out(f.grid());
    sp->inverse(s, out);
    return out;
}

}  // namespace

ScalarField laplacian(const ScalarField& f) { return laplacian_impl(f); }
VectorField laplacian(const VectorField& v) { return laplacian_impl(v); }

TensorField jacobian(const VectorField& v) {
    require_finite(v, "jacobian");
    const auto sp = Spectral::for_grid(v.grid());
    SpectralData s = sp->forward(v);
    TensorField out(v.grid());
    ComplexBuffer tmp(sp->modes());
    for (int i = 0; i < v.dim(); ++i)
        for (int j = 0; j < v.dim(); ++j) {
            sp->derivative(j, s.comp(i), tmp);
            sp->inverse(tmp, out(i, j));
        }
    return out;
}

VectorField divergence(const TensorField& t) {
    require_finite(t, "divergence");
    const auto sp = Spectral::for_grid(t.grid());
    SpectralData s = sp->forward(t);
    const int dim = t.dim();
    VectorField out(t.grid());
    ComplexBuffer acc(sp->modes());
    ComplexBuffer tmp(sp->modes());
    for (int i = 0; i < dim; ++i) {
        std::fill(acc.begin(), acc.end(), Complex(0.0));
        for (int j = 0; j < dim; ++j) {
            sp->derivative(j, s.comp(i * dim + j), tmp);
            for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += tmp[m];
        }
        sp->inverse(acc, out.comp(i));
    }
    return out;
}

VectorField leray_project(const VectorField& v) {
    require_finite(v, "leray_project");
    const auto sp = Spectral::for_grid(v.grid());
    SpectralData s = sp->forward(v);
    sp->project(s);
    VectorField out(v.grid());
    sp->inverse(s, out);
    return out;
}

StrainVorticity strain_vorticity(const VectorField& v) {
    const TensorField J = jacobian(v);
    const int dim = v.dim();
    StrainVorticity sv{TensorField(v.grid()), TensorField(v.grid())};
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            auto a = sv.A(i, j);
            auto w = sv.Omega(i, j);
            const auto jij = J(i, j);
            const auto jji = J(j, i);
            for (std::size_t p = 0; p < v.points(); ++p) {
                a[p] = 0.5 * (jij[p] + jji[p]);
                w[p] = 0.5 * (jij[p] - jji[p]);
            }
        }
    return sv;
}

double seminorm_h1(const ScalarField& f) { return norm_l2(gradient(f)); }

double seminorm_h1(const VectorField& v) { return norm_l2(jacobian(v)); }

double norm_h1(const ScalarField& f) {
    const double a = norm_l2(f);
    const double b = seminorm_h1(f);
    return std::sqrt(a * a + b * b);
}

double norm_h1(const VectorField& v) {
    const double a = norm_l2(v);
    const double b = seminorm_h1(v);
    return std::sqrt(a * a + b * b);
}

}  // namespace elc
