#pragma once

#include "clbm/central_moments.hpp"
#include "clbm/lattice.hpp"

#include <array>
#include <span>

namespace clbm {

struct RelaxationSchedule {
    double omega_nu = 1.0;   ///< shear: off-diagonal and deviatoric second order
    double omega_xi = 1.0;   ///< bulk: trace of second order
    double omega_1 = 1.0;    ///< first order
    double omega_high = 1.0; ///< every third-, fourth- and sixth-order group
};

/// Throws InvalidParameter unless every rate lies in (0, 2).
void validate_schedule(const RelaxationSchedule& sched);

enum class Variant { central, raw };

/// full: complete coefficients; low_mach: drops the u^2 and density-gradient
/// terms; off: plain equilibria, no gradient recovery.
enum class CorrectionMode { full, low_mach, off };

struct CorrectionCoefficients {
    double theta_sx = 0, theta_sy = 0, theta_sz = 0;
    double theta_bx = 0, theta_by = 0, theta_bz = 0;
    double lambda_sx = 0, lambda_sy = 0, lambda_sz = 0;
    double lambda_bx = 0, lambda_by = 0, lambda_bz = 0;
};

struct NodeState {
    double rho = 1.0;
    FrameVelocity u{};
    Vec3 grad_rho{0.0, 0.0, 0.0};
    Vec3 force{0.0, 0.0, 0.0};
};

[[nodiscard]] MomentVector central_equilibria(double rho, double cs2);
[[nodiscard]] MomentVector raw_equilibria(double rho, const FrameVelocity& u, double cs2);
[[nodiscard]] MomentVector source_central_moments(const Vec3& force);
/// Raw-frame source moments (binomial transform of the central ones).
[[nodiscard]] MomentVector source_raw_moments(const Vec3& force, const FrameVelocity& u);

[[nodiscard]] CorrectionCoefficients correction_coefficients(const NodeState& node,
                                                             const RelaxationSchedule& sched,
                                                             const LatticeSpec& spec,
                                                             CorrectionMode mode = CorrectionMode::full);

/// Recovers (du_x/dx, du_y/dy, du_z/dz) from central second-order moments.
/// Throws SingularSystem when the elimination denominator is below 1e-12 rho cs2.
[[nodiscard]] Vec3 diagonal_velocity_gradients(const MomentVector& mc, const NodeState& node,
                                               const RelaxationSchedule& sched,
                                               const LatticeSpec& spec,
                                               CorrectionMode mode = CorrectionMode::full);

/// Returns (S_xy, S_xz, S_yz).
[[nodiscard]] Vec3 off_diagonal_strain(const MomentVector& mc, double rho, double omega_nu, double cs2);

/// Returns (k2s_eq, k2d1_eq, k2d2_eq) in the central frame.
[[nodiscard]] std::array<double, 3> extended_second_order_equilibria(const NodeState& node,
                                                                     const Vec3& gradients,
                                                                     const CorrectionCoefficients& coeffs,
                                                                     const LatticeSpec& spec,
                                                                     double dt = 1.0);

[[nodiscard]] MomentVector relax_central(const MomentVector& mc, const NodeState& node,
                                         const RelaxationSchedule& sched, const LatticeSpec& spec,
                                         double dt = 1.0, CorrectionMode mode = CorrectionMode::full);

/// Raw-moment counterpart of relax_central (input and output in the scaled raw frame).
[[nodiscard]] MomentVector relax_raw(const MomentVector& m, const NodeState& node,
                                     const RelaxationSchedule& sched, const LatticeSpec& spec,
                                     double dt = 1.0, CorrectionMode mode = CorrectionMode::full);

[[nodiscard]] Populations collide_node(std::span<const double, Q> f, const NodeState& node,
                                       const RelaxationSchedule& sched, const LatticeSpec& spec,
                                       Variant variant = Variant::central,
                                       CorrectionMode mode = CorrectionMode::full);

} // namespace clbm
