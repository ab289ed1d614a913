#include "elc/grid.hpp"

#include <numbers>
#include <sstream>

#include "elc/errors.hpp"

namespace elc {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

TorusGrid::TorusGrid(int dim, int n, double length) : dim_(dim), n_(n), length_(length), points_(1) {
    if (dim != 2 && dim != 3) {
        std::ostringstream os;
        os << "grid dimension " << dim << " not supported (expected 2 or 3)";
        throw UsageError(os.str());
    }
    if (n < 8 || !is_power_of_two(n)) {
        std::ostringstream os;
        os << "grid size n = " << n << " must be a power of two >= 8";
        throw UsageError(os.str());
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        std::ostringstream os;
        os << "box length " << length << " must be positive and finite";
        throw UsageError(os.str());
    }
    for (int a = 0; a < dim; ++a) points_ *= static_cast<std::size_t>(n);
}

double TorusGrid::cell_volume() const noexcept {
    const double h = spacing();
    return dim_ == 2 ? h * h : h * h * h;
}

double TorusGrid::base_wavenumber() const noexcept { return 2.0 * std::numbers::pi / length_; }

std::array<int, 3> TorusGrid::index_of(std::size_t p) const noexcept {
    std::array<int, 3> idx{0, 0, 0};
    const auto nn = static_cast<std::size_t>(n_);
    for (int a = dim_ - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(p % nn);
        p /= nn;
    }
    return idx;
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where) {
    if (!(a == b)) {
        std::ostringstream os;
        os << where << ": grid mismatch (" << a.dim() << "D n=" << a.n() << " L=" << a.length()
           << " vs " << b.dim() << "D n=" << b.n() << " L=" << b.length() << ")";
        throw UsageError(os.str());
    }
}

}  // namespace elc
