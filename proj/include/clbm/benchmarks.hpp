#pragma once

#include "clbm/cli.hpp"
#include "clbm/solver.hpp"
#include "clbm/validation.hpp"

#include <functional>
#include <string>
#include <vector>

namespace clbm {

using LogFn = std::function<void(const std::string&)>;

/// Side of the square duct in lattice units.
inline constexpr double kDuctSide = 30.0;
/// Half-width a of the pulsatile duct and the forcing used there.
inline constexpr double kPulsatileHalfWidth = 20.0;
inline constexpr double kPulsatileAmplitude = 1e-5;
inline constexpr double kPulsatilePeriod = 10000.0;

/// Center velocity of the duct solution in units of F L^2 / (rho nu).
[[nodiscard]] double duct_center_coefficient();

/// Square duct, rows 1-4 of the aspect-ratio table (3 x L/r x L/s nodes,
/// periodic in x). Row 3 uses the force that gives Re = u_c L / nu = 50.
[[nodiscard]] SimulationConfig duct_preset(int row);

/// Pulsatile duct flow on 40 x 80 x 40 nodes, (r, s) = (0.5, 1), for the given
/// Womersley number.
[[nodiscard]] SimulationConfig pulsatile_preset(double wo);

/// Re = 100 cubic cavity on 40 x 80 x 40 nodes, (r, s) = (0.5, 1).
[[nodiscard]] SimulationConfig cavity_preset();

/// Shallow cavity L/H = 4, W/H = 2, Re = U L / nu = 100 with Ny = 32.
/// The cuboid run uses (r, s) = (0.406, 1.3); the cubic run r = s = 1.
[[nodiscard]] SimulationConfig shallow_cavity_preset(bool cuboid);

/// 30 x 60 x 30 lid-driven cavity, (r, s) = (0.5, 1), cs2 = 0.08, all rates
/// other than omega_nu equal to 1, bisecting the lid speed.
[[nodiscard]] SweepRequest stability_preset();

struct DuctOutcome {
    double l2_error = 0.0;
    std::vector<double> y, z, u, exact; ///< cross-section at i = 1, centered coordinates
    RunReport report;
    RunManifest manifest;
};

/// Runs to steady state and compares u(y, z) with the series (n <= 199).
[[nodiscard]] DuctOutcome run_duct(const SimulationConfig& config, const LogFn& log = {});

struct PulsatileOutcome {
    std::vector<double> y;                     ///< centered coordinates along the z = 0 midline
    std::vector<std::vector<double>> profiles; ///< u(y) at t = m T / 8, m = 1..8, last period
    std::vector<std::vector<double>> exact;
    std::vector<double> l2_errors;             ///< cross-section errors at m = 1..8
    RunReport report;
    RunManifest manifest;
};

/// Runs `periods` forcing periods from rest and samples the last one.
[[nodiscard]] PulsatileOutcome run_pulsatile(const SimulationConfig& config, int periods = 3,
                                             const LogFn& log = {});

struct CenterlineProfiles {
    std::vector<double> y, u; ///< u / U along y through the x and z centers, y / H
    std::vector<double> x, v; ///< v / U along x through the y and z centers, x / L
};

/// Centerlines of a lid-driven cavity. A center between two node layers is
/// the average of both.
[[nodiscard]] CenterlineProfiles cavity_centerlines(const SimulationState& state);

struct CavityOutcome {
    CenterlineProfiles lines;
    RunReport report;
    RunManifest manifest;
};

[[nodiscard]] CavityOutcome run_cavity(const SimulationConfig& config, const std::string& name,
                                       const LogFn& log = {});

/// max |value - ref.at(coord)| over the samples.
[[nodiscard]] double max_deviation(const std::vector<double>& coords, const std::vector<double>& values,
                                   const ReferenceProfile& ref);

/// Directory holding the checked-in reference data: CLBM_DATA_DIR from the
/// environment, else the source tree's data/.
[[nodiscard]] std::string default_data_dir();

struct BenchmarkCheck {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool at_most = true; ///< pass iff value <= limit, else value >= limit
    [[nodiscard]] bool passed() const { return at_most ? value <= limit : value >= limit; }
};

struct BenchmarkOptions {
    std::vector<std::string> overrides; ///< `section.key=value`, applied to every run
    std::string output_dir;             ///< empty writes nothing
    std::string data_dir;               ///< empty selects default_data_dir()
    std::vector<int> duct_rows{1, 2, 3, 4};
    double wo = 3.09;
    std::vector<double> stability_points{1.8};
    LogFn log;
};

struct BenchmarkResult {
    std::string name;
    std::vector<BenchmarkCheck> checks;
    std::vector<std::string> artifacts;
    std::vector<RunManifest> manifests;

    [[nodiscard]] bool passed() const;
    /// One `name value <=|>= limit PASS|FAIL` line per check.
    [[nodiscard]] std::string summary() const;
};

/// Names accepted by run_benchmark.
[[nodiscard]] const std::vector<std::string>& benchmark_names();

/// Runs a preset, writes profiles, the summary and manifests into
/// output_dir. Throws InvalidParameter for an unknown name.
[[nodiscard]] BenchmarkResult run_benchmark(const std::string& name, const BenchmarkOptions& options = {});

} // namespace clbm
