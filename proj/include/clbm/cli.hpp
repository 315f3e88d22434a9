#pragma once

#include "clbm/solver.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace clbm {

/// Parses the sectioned `key = value` format ([lattice], [grid], [relaxation],
/// [boundary], [force], [run]); `#` and `;` start comments. All values are in
/// lattice units (dx = dt = 1). Unknown sections or keys and malformed values
/// throw ParseError with the line number; the result is validated with
/// resolve_parameters, whose errors name the violated invariant.
[[nodiscard]] SimulationConfig parse_config(const std::string& path);
[[nodiscard]] SimulationConfig parse_config_text(const std::string& text, const std::string& name = "<config>");

/// Sets one `section.key` as the parser would; a rate or viscosity replaces the
/// alternative already given. Throws ParseError (line 0).
void apply_override(SimulationConfig& config, const std::string& assignment);

/// Canonical text form; parse_config_text(format_config(c)) reproduces c.
[[nodiscard]] std::string format_config(const SimulationConfig& config);

/// Replaces `path` atomically: writes `path.tmp` and renames it. Throws IoError.
void write_file_atomic(const std::string& path, const std::string& contents);

/// One `coord value` line per sample, in the given order.
void write_profile(const std::string& path, std::span<const double> coords, std::span<const double> values,
                   const std::string& comment = "");

/// Legacy VTK structured points with SPACING 1 r s, density and velocity.
void write_vtk(const std::string& path, const SimulationState& state);

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary snapshot: magic, version, dimensions, step, buffer index, config
/// text and both population buffers.
void write_checkpoint(const std::string& path, const SimulationState& state);

/// Rebuilds a state that continues exactly where the checkpoint left off.
[[nodiscard]] SimulationState read_checkpoint(const std::string& path);

/// Bytes for both population buffers plus the per-node hydrodynamic fields.
[[nodiscard]] std::size_t estimate_memory(const GridDims& dims, bool per_node_force = false);

struct RunManifest {
    std::string name;
    std::string config_text;
    std::string version;
    long steps = 0;
    double wall_seconds = 0.0;
    PhaseTimes phases;
    std::size_t memory_estimate = 0;
    std::size_t allocated_bytes = 0;
    int threads = 1;
    std::map<std::string, double> metrics;
    std::vector<std::string> notes;

    [[nodiscard]] std::string to_json() const;
};

[[nodiscard]] RunManifest make_manifest(const std::string& name, const SimulationState& state,
                                        const RunReport& report);

/// Library version string.
[[nodiscard]] const char* version();

} // namespace clbm
