#pragma once

#include <memory>
#include <span>
#include <vector>

#include "elc/grid.hpp"

namespace elc {

/// Half-spectrum Fourier coefficients of a multi-component real field. Coefficients are
/// normalized so that mode 0 holds the spatial mean.
class SpectralData {
public:
    SpectralData() = default;
    SpectralData(int ncomp, std::size_t modes) : ncomp_(ncomp), modes_(modes), data_(ncomp * modes) {}

    int components() const noexcept { return ncomp_; }
    std::size_t modes() const noexcept { return modes_; }
    std::span<Complex> comp(int c) noexcept { return {data_.data() + c * modes_, modes_}; }
    std::span<const Complex> comp(int c) const noexcept { return {data_.data() + c * modes_, modes_}; }
    std::span<Complex> values() noexcept { return data_; }
    std::span<const Complex> values() const noexcept { return data_; }

private:
    int ncomp_ = 0;
    std::size_t modes_ = 0;
    ComplexBuffer data_;
};

/// FFT plans and wavenumber tables for one grid. Plans are created once; transforms
/// may be executed concurrently from several threads.
class Spectral {
public:
    explicit Spectral(const TorusGrid& grid);
    ~Spectral();
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    /// Shared, lazily-built instance for `grid`.
    static std::shared_ptr<const Spectral> for_grid(const TorusGrid& grid);

    const TorusGrid& grid() const noexcept { return grid_; }
    std::size_t modes() const noexcept { return modes_; }

    void forward(std::span<const double> real, std::span<Complex> coeffs) const;
    void inverse(std::span<const Complex> coeffs, std::span<double> real) const;

    template <FieldKind K>
    SpectralData forward(const GridField<K>& f) const {
        SpectralData out(f.components(), modes_);
        for (int c = 0; c < f.components(); ++c) forward(f.comp(c), out.comp(c));
        return out;
    }
    template <FieldKind K>
    void inverse(const SpectralData& s, GridField<K>& f) const {
        for (int c = 0; c < f.components(); ++c) inverse(s.comp(c), f.comp(c));
    }

    /// Signed integer wavenumber index of `mode` along `axis`.
    int index(int axis, std::size_t mode) const noexcept { return index_[axis][mode]; }
    /// Physical wavenumber used for first derivatives (Nyquist component zeroed).
    double wavenumber(int axis, std::size_t mode) const noexcept { return kd_[axis][mode]; }
    /// |k|^2 including Nyquist components; the Laplacian symbol is -k_squared.
    double k_squared(std::size_t mode) const noexcept { return k2_[mode]; }
    /// Squared integer index norm, used for Galerkin cutoffs.
    int index_norm_sq(std::size_t mode) const noexcept;
    /// True when the two-thirds rule removes this mode.
    bool dealiased_out(std::size_t mode) const noexcept { return dealias_out_[mode] != 0; }
    /// Multiplicity of `mode` in the full spectrum (1 or 2).
    double multiplicity(std::size_t mode) const noexcept { return mult_[mode]; }

    void derivative(int axis, std::span<const Complex> in, std::span<Complex> out) const;
    void apply_dealias(std::span<Complex> coeffs) const;
    void apply_dealias(SpectralData& s) const;
    /// Leray projection of a vector of component spectra, in place.
    void project(SpectralData& v) const;

    /// sum over the full spectrum of |c_k|^2 times the box volume.
    double parseval_sum(std::span<const Complex> coeffs) const;

private:
    TorusGrid grid_;
    std::size_t modes_;
    void* plan_r2c_ = nullptr;
    void* plan_c2r_ = nullptr;
    std::vector<std::vector<int>> index_;
    std::vector<std::vector<double>> kd_;
    std::vector<double> k2_;
    std::vector<unsigned char> dealias_out_;
    std::vector<double> mult_;
};

/// Caps FFT threading; read once from ELC_THREADS when the first plan is built.
int fft_thread_count();

// Differential operators. All check that inputs are finite and throw DataError otherwise.
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& v);
/// J(i, j) = d v_i / d x_j.
TensorField jacobian(const VectorField& v);
/// (div T)_i = d T_ij / d x_j.
VectorField divergence(const TensorField& t);

VectorField leray_project(const VectorField& v);

struct StrainVorticity {
    TensorField A;
    TensorField Omega;
};
/// A = (grad v + grad v^T) / 2 and Omega = (grad v - grad v^T) / 2 with (grad v)_ij = d_j v_i.
StrainVorticity strain_vorticity(const VectorField& v);

template <FieldKind K>
GridField<K> dealias(const GridField<K>& f) {
    const auto sp = Spectral::for_grid(f.grid());
    SpectralData s = sp->forward(f);
    sp->apply_dealias(s);
    GridField<K> out(f.grid());
    sp->inverse(s, out);
    return out;
}

/// Quadrature inner product h^dim * sum of pointwise products over all components.
template <FieldKind K>
double inner(const GridField<K>& f, const GridField<K>& g) {
    require_same_grid(f.grid(), g.grid(), "inner");
    const auto a = f.values();
    const auto b = g.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum * f.grid().cell_volume();
}

template <FieldKind K>
double norm_l2(const GridField<K>& f) {
    return std::sqrt(inner(f, f));
}

/// Spectral H1 seminorm ||grad f||.
double seminorm_h1(const ScalarField& f);
double seminorm_h1(const VectorField& v);
/// Full H1 norm sqrt(||f||^2 + ||grad f||^2).
double norm_h1(const ScalarField& f);
double norm_h1(const VectorField& v);

}  // namespace elc
