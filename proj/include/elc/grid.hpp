#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <new>
#include <span>
#include <vector>

namespace elc {

/// Uniform periodic grid on the box [0, length)^dim. `length` is 1 unless a run needs
/// wavenumbers that do not fit the unit torus.
class TorusGrid {
public:
    TorusGrid(int dim, int n, double length = 1.0);

    int dim() const noexcept { return dim_; }
    int n() const noexcept { return n_; }
    double length() const noexcept { return length_; }
    double spacing() const noexcept { return length_ / n_; }
    std::size_t points() const noexcept { return points_; }
    double cell_volume() const noexcept;
    /// Fundamental wavenumber 2 pi / length.
    double base_wavenumber() const noexcept;

    /// Coordinate of grid index i along any axis.
    double coordinate(int i) const noexcept { return i * spacing(); }
    /// Grid indices of a flat point index (row-major, axis 0 slowest).
    std::array<int, 3> index_of(std::size_t p) const noexcept;

    friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

private:
    int dim_;
    int n_;
    double length_;
    std::size_t points_;
};

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where);

/// Allocator returning SIMD-aligned memory so every buffer can be handed to FFTW plans.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::size_t alignment = 64;

    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t count) {
        if (count > std::numeric_limits<std::size_t>::max() / sizeof(T)) throw std::bad_alloc();
        return static_cast<T*>(::operator new(count * sizeof(T), std::align_val_t(alignment)));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t(alignment)); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using Complex = std::complex<double>;
using RealBuffer = std::vector<double, AlignedAllocator<double>>;
using ComplexBuffer = std::vector<Complex, AlignedAllocator<Complex>>;

enum class FieldKind { Scalar, Vector, Tensor };

constexpr int component_count(FieldKind kind, int dim) {
    switch (kind) {
        case FieldKind::Scalar: return 1;
        case FieldKind::Vector: return dim;
        case FieldKind::Tensor: return dim * dim;
    }
    return 1;
}

/// Real-valued field on a torus grid. Components are stored one after another
/// (component-major); tensor component (i, j) is component i * dim + j.
template <FieldKind Kind>
class GridField {
public:
    explicit GridField(const TorusGrid& grid)
        : grid_(grid),
          ncomp_(component_count(Kind, grid.dim())),
          values_(grid.points() * static_cast<std::size_t>(ncomp_), 0.0) {}

    const TorusGrid& grid() const noexcept { return grid_; }
    int dim() const noexcept { return grid_.dim(); }
    int components() const noexcept { return ncomp_; }
    std::size_t points() const noexcept { return grid_.points(); }

    std::span<double> comp(int c) noexcept {
        return {values_.data() + static_cast<std::size_t>(c) * points(), points()};
    }
    std::span<const double> comp(int c) const noexcept {
        return {values_.data() + static_cast<std::size_t>(c) * points(), points()};
    }

    std::span<double> operator()(int i, int j) noexcept
        requires(Kind == FieldKind::Tensor)
    {
        return comp(i * dim() + j);
    }
    std::span<const double> operator()(int i, int j) const noexcept
        requires(Kind == FieldKind::Tensor)
    {
        return comp(i * dim() + j);
    }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const noexcept {
        for (double x : values_)
            if (!std::isfinite(x)) return false;
        return true;
    }
    double max_abs() const noexcept {
        double m = 0.0;
        for (double x : values_) m = std::max(m, std::abs(x));
        return m;
    }

    GridField& operator+=(const GridField& o) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    GridField& operator-=(const GridField& o) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    GridField& operator*=(double s) {
        for (double& x : values_) x *= s;
        return *this;
    }
    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    friend GridField operator*(double s, GridField a) { return a *= s; }

private:
    TorusGrid grid_;
    int ncomp_;
    RealBuffer values_;
};

using ScalarField = GridField<FieldKind::Scalar>;
using VectorField = GridField<FieldKind::Vector>;
using TensorField = GridField<FieldKind::Tensor>;

}  // namespace elc
