#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "elc/coefficients.hpp"
#include "elc/grid.hpp"
#include "elc/linstab.hpp"
#include "elc/spectral.hpp"

namespace elc {

struct State {
    VectorField v;
    VectorField d;
    double t = 0.0;

    explicit State(const TorusGrid& grid) : v(grid), d(grid) {}
    const TorusGrid& grid() const noexcept { return v.grid(); }
};

namespace init {

/// v = amplitude (sin kx cos ky, -cos kx sin ky[, 0]) (3D: extra cos kz factor),
/// k = wavenumber * 2 pi / length; d constant.
struct TaylorGreen {
    double amplitude = 1.0;
    int wavenumber = 1;
    Vec3 director{1.0, 0.0, 0.0};
};

/// Real part of a plane wave on top of a constant director:
/// v = amplitude b cos(m nu.x), d = n + amplitude a cos(m nu.x).
struct ConstantDirectorPerturbed {
    Vec3 n{1.0, 0.0, 0.0};
    PlaneWaveMode mode;
    double amplitude = 1e-4;
};

/// Random band-limited fields: mean-free solenoidal v with rms velocity_amplitude, and
/// d = director_base + a mean-free perturbation with per-component rms director_amplitude.
struct RandomSmooth {
    std::uint64_t seed = 0;
    int band = 2;
    double velocity_amplitude = 0.1;
    double director_amplitude = 0.1;
    Vec3 director_base{1.0, 0.0, 0.0};
};

struct FromFile {
    std::string path;
};

}  // namespace init

using InitSpec = std::variant<init::TaylorGreen, init::ConstantDirectorPerturbed, init::RandomSmooth, init::FromFile>;

struct OutputCadence {
    /// Diagnostics sample every this many steps (the first and last step are always sampled).
    long sample_every = 1;
    /// Snapshots every this many steps; 0 writes only the initial and final states.
    long snapshot_every = 0;
};

struct RunConfig {
    TorusGrid grid{2, 32};
    LeslieCoefficients mu;
    double dt = 1e-3;
    double t_end = 0.0;
    InitSpec init = init::TaylorGreen{};
    OutputCadence output;
    bool dealias = true;
    /// Galerkin truncation: keep only modes with integer index norm <= mode_cutoff.
    std::optional<int> mode_cutoff;
    /// Hold d fixed and evolve only the momentum equation. Needed when lambda1 = 0.
    bool freeze_director = false;

    /// Throws DomainError/UsageError for inadmissible settings.
    void validate() const;
    /// Number of steps needed to reach t_end.
    long step_count() const;
};

State initial_state(const RunConfig& cfg);

/// Sum of random Fourier modes with |k_a| <= band (k != 0) in every component; zero mean.
VectorField random_band_field(const TorusGrid& grid, int band, std::uint64_t seed);

struct Rhs {
    VectorField dv_dt;
    VectorField dd_dt;
};

/// Full right-hand side of the evolution equations, stiff linear parts included.
Rhs rhs(const State& state, const LeslieCoefficients& mu);

/// Stateful integrator. Keeps the state in wavespace between steps.
class Solver {
public:
    explicit Solver(const RunConfig& cfg);
    ~Solver();
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    void set_state(const State& s);
    const State& state() const noexcept { return state_; }
    long steps_taken() const noexcept { return steps_; }
    const RunConfig& config() const noexcept { return cfg_; }

    /// One IMEX step. Throws BlowupError when the state leaves the admissible range.
    void advance();

    /// Right-hand side at the current state under this solver's settings.
    Rhs rhs() const;

    /// Called with a message the first time the advective CFL number exceeds 0.5.
    std::function<void(const std::string&)> on_warning;

private:
    struct Impl;
    RunConfig cfg_;
    std::unique_ptr<Impl> impl_;
    State state_;
    long steps_ = 0;
    double t0_ = 0.0;
    bool warned_ = false;
};

/// Single step starting from `state`.
State step(const State& state, const RunConfig& cfg);

struct RunSinks {
    std::function<void(const State&, long step)> on_sample;
    std::function<void(const State&, long step)> on_snapshot;
    std::function<void(const std::string&)> on_warning;
};

State simulate(const RunConfig& cfg, const RunSinks& sinks = {});

/// Blowup threshold on sup-norms of v and d.
inline constexpr double blowup_threshold = 1e6;

}  // namespace elc
