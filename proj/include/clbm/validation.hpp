#pragma once

#include "clbm/collision.hpp"
#include "clbm/solver.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace clbm {

/// Fully developed flow in a square duct of side L, coordinates centered so
/// that |y|, |z| <= L/2. Sums odd n up to n_max.
[[nodiscard]] double duct_velocity(double y, double z, double L, double Fx, double rho, double nu,
                                   int n_max = 9999);

/// Pulsatile duct flow driven by Fx = F_m cos(omega t) in a duct of half-width
/// a, |y|, |z| <= a, unit density. Uses n_max + 1 terms (n = 0 .. n_max).
[[nodiscard]] double womersley_velocity(double y, double z, double t, double a, double F_m, double omega,
                                        double nu, int n_max = 2000);

/// sqrt(sum (c - r)^2) / sqrt(sum r^2). Throws InvalidParameter on a size
/// mismatch and ZeroReference when the reference is identically zero.
[[nodiscard]] double relative_l2_error(std::span<const double> computed, std::span<const double> reference);

enum class Provenance { analytic, external };

/// Samples of one quantity along a line, ordered by coordinate.
struct ReferenceProfile {
    std::vector<double> coords;
    std::vector<double> values;
    Provenance provenance = Provenance::external;
    std::string source; ///< free-form note, e.g. the header comment of the data file

    /// Throws InvalidParameter unless sizes agree, coordinates increase
    /// strictly and every coordinate lies in [lo, hi].
    void validate(double lo, double hi) const;
    /// Piecewise-linear interpolation; clamps outside the sampled range.
    [[nodiscard]] double at(double x) const;
};

/// Reads `coord value` lines; `#` starts a comment, and leading comment lines
/// are collected into `source`. Throws IoError or ParseError (with line).
[[nodiscard]] ReferenceProfile read_reference_profile(const std::string& path);

enum class SweepAxis {
    lid_speed, ///< bisect U at fixed omega_nu (points are omega_nu values)
    omega,     ///< bisect omega_nu at fixed U (points are U values)
    reynolds,  ///< bisect Re = U nx / nu at fixed U (points are U values)
};

struct SweepRequest {
    SimulationConfig base; ///< must have a moving lid on y_max
    SweepAxis axis = SweepAxis::lid_speed;
    std::vector<double> points;
    std::vector<Variant> variants{Variant::central, Variant::raw};
    double stable = 0.0;   ///< bracket end expected stable
    double unstable = 0.0; ///< bracket end expected unstable
    int iterations = 8;
    long budget = 20000;   ///< steps per probe
};

struct Probe {
    double value = 0.0;
    bool stable = false;
    long steps = 0;
    std::string reason; ///< blow-up description, empty when stable
};

struct SweepRow {
    double point = 0.0;
    Variant variant = Variant::central;
    double max_stable = 0.0;
    double min_unstable = 0.0;
    std::vector<Probe> probes;
    std::vector<std::string> anomalies;
};

/// Applies the sweep value to a copy of the base config.
[[nodiscard]] SimulationConfig sweep_config(const SweepRequest& req, double point, Variant variant, double value);

/// Runs one probe for the given number of steps; blow-up (including a singular
/// gradient system) means unstable.
[[nodiscard]] Probe run_probe(const SimulationConfig& config, double value, long budget);

/// Bisection between the stable and unstable ends for every (point, variant).
/// Throws BracketNotFound when the ends do not straddle the threshold.
/// Probes that contradict monotone stability are listed as anomalies.
[[nodiscard]] std::vector<SweepRow> stability_sweep(const SweepRequest& req,
                                                    const std::function<void(const std::string&)>& log = {});

} // namespace clbm
