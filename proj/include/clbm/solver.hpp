#pragma once

#include "clbm/collision.hpp"
#include "clbm/detail/kernel.hpp"
#include "clbm/domain.hpp"
#include "clbm/lattice.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace clbm {

struct LatticeConfig {
    double r = 1.0;
    double s = 1.0;
    std::optional<double> cs2; ///< empty selects min(r^2, s^2)/3
};

/// Exactly one of omega_nu, nu, tau; at most one of omega_xi, xi (neither
/// means omega_xi = omega_nu).
struct ScheduleConfig {
    std::optional<double> omega_nu, nu, tau;
    std::optional<double> omega_xi, xi;
    double omega_1 = 1.0;
    double omega_high = 1.0;
};

/// F(t) = amplitude, or amplitude * cos(2 pi t / period) when period > 0.
struct ForceConfig {
    Vec3 amplitude{0.0, 0.0, 0.0};
    double period = 0.0;

    [[nodiscard]] Vec3 at(long step) const;
};

struct SimulationConfig {
    LatticeConfig lattice;
    GridDims grid;
    ScheduleConfig relaxation;
    BoundarySpec boundary;
    ForceConfig force;
    Variant variant = Variant::central;
    CorrectionMode corrections = CorrectionMode::full;
    long max_steps = 1000;
    double tolerance = 1e-9;  ///< steady-state criterion; <= 0 disables it
    long check_interval = 100;
    long output_every = 0;    ///< 0 disables periodic output
    std::string output_dir = ".";
};

struct ResolvedParameters {
    LatticeSpec spec;
    RelaxationSchedule sched;
    double nu = 0.0;
    double xi = 0.0;
};

/// Validates the config and derives lattice and relaxation rates.
[[nodiscard]] ResolvedParameters resolve_parameters(const SimulationConfig& config);

/// nu = cs2 (1/omega - 1/2)
[[nodiscard]] double omega_from_nu(double nu, double cs2);
/// xi = (2 cs2 / 3)(1/omega - 1/2)
[[nodiscard]] double omega_from_xi(double xi, double cs2);

struct PhaseTimes {
    double gradient = 0.0;
    double collide_stream = 0.0;
    double hydro = 0.0;
};

struct SimulationState {
    SimulationConfig config;
    ResolvedParameters params;
    detail::KernelParams kernel;
    PopulationField populations;
    HydroFieldSet hydro;
    long step = 0;
    HydroStats stats;
    PhaseTimes times;

    [[nodiscard]] std::size_t allocated_bytes() const;
};

/// Equilibrium at rho = 1, u = 0 (the first moment absorbs -F/2 so that the
/// velocity read back is exactly zero).
[[nodiscard]] SimulationState initialize(const SimulationConfig& config);

/// Gradient, collision, boundaries + streaming, hydrodynamic update.
/// Throws NonPositiveDensity or SingularSystem.
void step(SimulationState& state);

struct RunReport {
    long steps = 0;
    bool converged = false;
    bool blew_up = false;
    long blowup_step = -1;
    std::string blowup_reason;
    std::vector<std::pair<long, double>> convergence; ///< (step, relative max change)
    double wall_seconds = 0.0;
};

struct RunHooks {
    /// Called after every step; returning false stops the run.
    std::function<bool(const SimulationState&)> on_step;
    /// Called every output_every steps and at the end.
    std::function<void(const SimulationState&)> on_output;
};

/// Steps until max_steps, steady convergence or blow-up (reported, not thrown).
RunReport run(SimulationState& state, const RunHooks& hooks = {});
[[nodiscard]] std::pair<SimulationState, RunReport> run(const SimulationConfig& config, const RunHooks& hooks = {});

/// Sets worker count from CLBM_THREADS when present. Returns the count in use.
int configure_threads_from_env();

} // namespace clbm
