#pragma once

#include "clbm/collision.hpp"
#include "clbm/lattice.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace clbm {

namespace detail {
struct KernelParams;
}

struct GridDims {
    int nx = 1, ny = 1, nz = 1;

    [[nodiscard]] std::size_t nodes() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
    }
    [[nodiscard]] std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j)) *
                   static_cast<std::size_t>(nx) +
               static_cast<std::size_t>(i);
    }
    bool operator==(const GridDims&) const = default;
};

/// Structure-of-arrays population storage: value (direction a, node n) lives at
/// a * nodes + n. Two buffers; collision and streaming read `current` and write `next`.
class PopulationField {
public:
    PopulationField() = default;
    explicit PopulationField(GridDims dims);

    [[nodiscard]] const GridDims& dims() const { return dims_; }
    [[nodiscard]] std::size_t nodes() const { return nodes_; }

    [[nodiscard]] double* current(int a) { return buf_[cur_].data() + static_cast<std::size_t>(a) * nodes_; }
    [[nodiscard]] const double* current(int a) const {
        return buf_[cur_].data() + static_cast<std::size_t>(a) * nodes_;
    }
    [[nodiscard]] double* next(int a) { return buf_[1 - cur_].data() + static_cast<std::size_t>(a) * nodes_; }
    [[nodiscard]] const double* next(int a) const {
        return buf_[1 - cur_].data() + static_cast<std::size_t>(a) * nodes_;
    }

    [[nodiscard]] std::vector<double>& buffer(int which) { return buf_[which]; }
    [[nodiscard]] const std::vector<double>& buffer(int which) const { return buf_[which]; }
    [[nodiscard]] int current_index() const { return cur_; }
    void set_current_index(int which) { cur_ = which; }

    void swap() { cur_ = 1 - cur_; }

    [[nodiscard]] Populations node(std::size_t n) const;
    void set_node(std::size_t n, const Populations& f);

    [[nodiscard]] std::size_t allocated_bytes() const;

private:
    GridDims dims_{};
    std::size_t nodes_ = 0;
    std::array<std::vector<double>, 2> buf_;
    int cur_ = 0;
};

struct HydroFieldSet {
    GridDims dims{};
    std::vector<double> rho, ux, uy, uz;
    std::vector<double> grad_x, grad_y, grad_z;
    Vec3 force{0.0, 0.0, 0.0};
    /// Optional per-node force; used instead of `force` when non-empty.
    std::vector<double> force_x, force_y, force_z;

    HydroFieldSet() = default;
    explicit HydroFieldSet(GridDims d);

    [[nodiscard]] Vec3 force_at(std::size_t n) const {
        if (force_x.empty()) return force;
        return {force_x[n], force_y[n], force_z[n]};
    }
    [[nodiscard]] NodeState node_state(std::size_t n) const {
        return {rho[n], {ux[n], uy[n], uz[n]}, {grad_x[n], grad_y[n], grad_z[n]}, force_at(n)};
    }
    [[nodiscard]] std::size_t allocated_bytes() const;
};

enum class FaceKind { periodic, wall_rest, wall_moving };

enum Face : int { x_min = 0, x_max = 1, y_min = 2, y_max = 3, z_min = 4, z_max = 5 };

struct FaceCondition {
    FaceKind kind = FaceKind::periodic;
    double lid_velocity = 0.0; ///< x-velocity of a moving wall
};

struct BoundarySpec {
    std::array<FaceCondition, 6> faces{};

    /// Throws ConfigurationError for mixed periodic/wall pairs or a moving wall
    /// on any face other than y_max.
    void validate() const;
    [[nodiscard]] bool periodic(int axis) const { return faces[2 * axis].kind == FaceKind::periodic; }

    [[nodiscard]] static BoundarySpec all_periodic() { return {}; }
    /// Periodic in x; rest walls on the y and z faces.
    [[nodiscard]] static BoundarySpec duct();
    /// Rest walls everywhere except a lid on y_max moving with velocity U.
    [[nodiscard]] static BoundarySpec cavity(double U);
};

/// Coefficient c such that the population reflected from outgoing direction a
/// at the +y moving wall receives c * rho * U (zero for directions not leaving
/// through +y).
[[nodiscard]] std::array<double, Q> moving_wall_coefficients(const LatticeSpec& spec);

/// next[x + e_a][a] = current[x][a] for every link whose target is a fluid node
/// (periodic wrap included). Wall links are left to the boundary operations.
void stream(PopulationField& field, const BoundarySpec& boundary);

/// Reflects links that leave through a rest wall: next[x][opp a] = current[x][a].
/// Links crossing a moving wall are skipped.
void apply_halfway_bounce_back(PopulationField& field, const BoundarySpec& boundary);

/// Momentum-augmented reflection for links leaving through `face`, which must be
/// y_max; rho supplies the wall-adjacent fluid density per node.
void apply_moving_wall(PopulationField& field, std::span<const double> rho, double U, const LatticeSpec& spec,
                       Face face = Face::y_max);

struct HydroStats {
    double max_speed = 0.0;
    double min_rho = 0.0;
    double max_rho = 0.0;
};

/// rho = sum f, rho u = sum f e + F/2 from the current buffer. Throws
/// NonPositiveDensity if some rho <= 0 or is not finite.
HydroStats update_hydrodynamics(const PopulationField& field, HydroFieldSet& hydro, const LatticeSpec& spec);

/// Central differences with spacings (1, r, s); one-sided second order at walls.
void density_gradient(HydroFieldSet& hydro, const LatticeSpec& spec, const BoundarySpec& boundary);

/// Collides every node in place (current buffer). Returns the number of nodes
/// whose gradient system was singular.
std::size_t collide_field(PopulationField& field, const HydroFieldSet& hydro, const detail::KernelParams& kp);

/// Fused collision, boundary treatment and streaming into the next buffer.
/// Equivalent to collide_field followed by stream, apply_halfway_bounce_back and
/// apply_moving_wall. Returns the number of singular nodes.
std::size_t collide_and_stream(PopulationField& field, const HydroFieldSet& hydro, const LatticeSpec& spec,
                               const BoundarySpec& boundary, const detail::KernelParams& kp);

/// Sum of all populations in the current buffer.
[[nodiscard]] double total_mass(const PopulationField& field);

} // namespace clbm
