#include "clbm/collision.hpp"

#include "clbm/detail/kernel.hpp"
#include "clbm/errors.hpp"

#include <sstream>

namespace clbm {

namespace {

using detail::T;

void to_tensor(const MomentVector& m, double* t) {
    for (int i = 0; i < Q; ++i) t[detail::kCanonToTensor[i]] = m.v[i];
}

MomentVector from_tensor(const double* t, Frame frame) {
    MomentVector m;
    m.frame = frame;
    for (int i = 0; i < Q; ++i) m.v[i] = t[detail::kCanonToTensor[i]];
    return m;
}

void check_rate(double w, const char* name) {
    if (!(w > 0.0 && w < 2.0)) {
        std::ostringstream os;
        os << name << " in (0, 2) violated: " << w;
        throw InvalidParameter(os.str());
    }
}

} // namespace

void validate_schedule(const RelaxationSchedule& sched) {
    check_rate(sched.omega_nu, "omega_nu");
    check_rate(sched.omega_xi, "omega_xi");
    check_rate(sched.omega_1, "omega_1");
    check_rate(sched.omega_high, "omega_high");
}

MomentVector central_equilibria(double rho, double cs2) {
    MomentVector m;
    m.frame = Frame::central;
    const double cs4 = cs2 * cs2;
    m.at(0, 0, 0) = rho;
    m.at(2, 0, 0) = m.at(0, 2, 0) = m.at(0, 0, 2) = cs2 * rho;
    m.at(2, 2, 0) = m.at(2, 0, 2) = m.at(0, 2, 2) = cs4 * rho;
    m.at(2, 2, 2) = cs4 * cs2 * rho;
    return m;
}

MomentVector raw_equilibria(double rho, const FrameVelocity& u, double cs2) {
    MomentVector m;
    m.frame = Frame::raw;
    const double ux = u.ux, uy = u.uy, uz = u.uz;
    const double ux2 = ux * ux, uy2 = uy * uy, uz2 = uz * uz;
    const double cs4 = cs2 * cs2;
    m.at(0, 0, 0) = rho;
    m.at(1, 0, 0) = rho * ux;
    m.at(0, 1, 0) = rho * uy;
    m.at(0, 0, 1) = rho * uz;
    m.at(1, 1, 0) = rho * ux * uy;
    m.at(1, 0, 1) = rho * ux * uz;
    m.at(0, 1, 1) = rho * uy * uz;
    m.at(2, 0, 0) = cs2 * rho + rho * ux2;
    m.at(0, 2, 0) = cs2 * rho + rho * uy2;
    m.at(0, 0, 2) = cs2 * rho + rho * uz2;
    m.at(1, 2, 0) = cs2 * rho * ux + rho * ux * uy2;
    m.at(1, 0, 2) = cs2 * rho * ux + rho * ux * uz2;
    m.at(2, 1, 0) = cs2 * rho * uy + rho * ux2 * uy;
    m.at(0, 1, 2) = cs2 * rho * uy + rho * uy * uz2;
    m.at(2, 0, 1) = cs2 * rho * uz + rho * ux2 * uz;
    m.at(0, 2, 1) = cs2 * rho * uz + rho * uy2 * uz;
    m.at(1, 1, 1) = rho * ux * uy * uz;
    m.at(2, 2, 0) = cs4 * rho + rho * cs2 * (ux2 + uy2) + rho * ux2 * uy2;
    m.at(2, 0, 2) = cs4 * rho + rho * cs2 * (ux2 + uz2) + rho * ux2 * uz2;
    m.at(0, 2, 2) = cs4 * rho + rho * cs2 * (uy2 + uz2) + rho * uy2 * uz2;
    m.at(2, 1, 1) = rho * (cs2 + ux2) * uy * uz;
    m.at(1, 2, 1) = rho * (cs2 + uy2) * ux * uz;
    m.at(1, 1, 2) = rho * (cs2 + uz2) * ux * uy;
    m.at(1, 2, 2) = cs4 * rho * ux + rho * cs2 * ux * (uy2 + uz2) + rho * ux * uy2 * uz2;
    m.at(2, 1, 2) = cs4 * rho * uy + rho * cs2 * uy * (ux2 + uz2) + rho * ux2 * uy * uz2;
    m.at(2, 2, 1) = cs4 * rho * uz + rho * cs2 * uz * (ux2 + uy2) + rho * ux2 * uy2 * uz;
    m.at(2, 2, 2) = cs4 * cs2 * rho + rho * cs4 * (ux2 + uy2 + uz2) +
                    rho * cs2 * (ux2 * uy2 + uy2 * uz2 + ux2 * uz2) + rho * ux2 * uy2 * uz2;
    return m;
}

MomentVector source_central_moments(const Vec3& force) {
    MomentVector m;
    m.frame = Frame::central;
    m.at(1, 0, 0) = force[0];
    m.at(0, 1, 0) = force[1];
    m.at(0, 0, 1) = force[2];
    return m;
}

MomentVector source_raw_moments(const Vec3& force, const FrameVelocity& u) {
    MomentVector m;
    m.frame = Frame::raw;
    const double Fx = force[0], Fy = force[1], Fz = force[2];
    m.at(1, 0, 0) = Fx;
    m.at(0, 1, 0) = Fy;
    m.at(0, 0, 1) = Fz;
    m.at(1, 1, 0) = Fx * u.uy + Fy * u.ux;
    m.at(1, 0, 1) = Fx * u.uz + Fz * u.ux;
    m.at(0, 1, 1) = Fy * u.uz + Fz * u.uy;
    m.at(2, 0, 0) = 2.0 * Fx * u.ux;
    m.at(0, 2, 0) = 2.0 * Fy * u.uy;
    m.at(0, 0, 2) = 2.0 * Fz * u.uz;
    return m;
}

CorrectionCoefficients correction_coefficients(const NodeState& node, const RelaxationSchedule& sched,
                                               const LatticeSpec& spec, CorrectionMode mode) {
    const auto c = detail::coefficients(detail::to_node(node),
                                        detail::make_kernel_params(sched, spec, Variant::central, mode));
    return {c.theta_sx,  c.theta_sy,  c.theta_sz,  c.theta_bx,  c.theta_by,  c.theta_bz,
            c.lambda_sx, c.lambda_sy, c.lambda_sz, c.lambda_bx, c.lambda_by, c.lambda_bz};
}

Vec3 diagonal_velocity_gradients(const MomentVector& mc, const NodeState& node,
                                 const RelaxationSchedule& sched, const LatticeSpec& spec,
                                 CorrectionMode mode) {
    if (mc.frame != Frame::central) throw InvalidParameter("diagonal_velocity_gradients expects central moments");
    // The recovery formulas are the same in every mode except for the low-Mach
    // simplification; "off" uses the full ones since it has no coefficients.
    const auto kp = detail::make_kernel_params(
        sched, spec, Variant::central, mode == CorrectionMode::off ? CorrectionMode::full : mode);
    const double k200 = mc.at(2, 0, 0), k020 = mc.at(0, 2, 0), k002 = mc.at(0, 0, 2);
    double g[3];
    if (detail::recover_gradients(k200 + k020 + k002 - 3.0 * spec.cs2 * node.rho, k200 - k020, k200 - k002,
                                  detail::to_node(node), kp, g) != 0) {
        throw SingularSystem("gradient system denominator below 1e-12 rho cs2");
    }
    return {g[0], g[1], g[2]};
}

Vec3 off_diagonal_strain(const MomentVector& mc, double rho, double omega_nu, double cs2) {
    const double f = -omega_nu / (2.0 * rho * cs2);
    return {f * mc.at(1, 1, 0), f * mc.at(1, 0, 1), f * mc.at(0, 1, 1)};
}

std::array<double, 3> extended_second_order_equilibria(const NodeState& node, const Vec3& gradients,
                                                       const CorrectionCoefficients& coeffs,
                                                       const LatticeSpec& spec, double dt) {
    const detail::Coeffs<double> k{coeffs.theta_sx,  coeffs.theta_sy,  coeffs.theta_sz,  coeffs.theta_bx,
                                   coeffs.theta_by,  coeffs.theta_bz,  coeffs.lambda_sx, coeffs.lambda_sy,
                                   coeffs.lambda_sz, coeffs.lambda_bx, coeffs.lambda_by, coeffs.lambda_bz};
    const double g[3] = {gradients[0], gradients[1], gradients[2]};
    double c[3];
    detail::correction_terms(k, g, node.grad_rho[0], node.grad_rho[1], node.grad_rho[2], dt, c);
    return {3.0 * spec.cs2 * node.rho + c[0], c[1], c[2]};
}

MomentVector relax_central(const MomentVector& mc, const NodeState& node, const RelaxationSchedule& sched,
                           const LatticeSpec& spec, double dt, CorrectionMode mode) {
    if (mc.frame != Frame::central) throw InvalidParameter("relax_central expects central moments");
    const auto kp = detail::make_kernel_params(sched, spec, Variant::central, mode);
    double t[Q];
    to_tensor(mc, t);
    if (detail::relax_central_tensor(t, detail::to_node(node), kp, dt) != 0) {
        throw SingularSystem("gradient system denominator below 1e-12 rho cs2");
    }
    return from_tensor(t, Frame::central);
}

MomentVector relax_raw(const MomentVector& m, const NodeState& node, const RelaxationSchedule& sched,
                       const LatticeSpec& spec, double dt, CorrectionMode mode) {
    if (m.frame != Frame::raw) throw InvalidParameter("relax_raw expects raw moments");
    const auto kp = detail::make_kernel_params(sched, spec, Variant::raw, mode);
    double t[Q];
    to_tensor(m, t);
    if (detail::relax_raw_tensor(t, detail::to_node(node), kp, dt) != 0) {
        throw SingularSystem("gradient system denominator below 1e-12 rho cs2");
    }
    return from_tensor(t, Frame::raw);
}

Populations collide_node(std::span<const double, Q> f, const NodeState& node, const RelaxationSchedule& sched,
                         const LatticeSpec& spec, Variant variant, CorrectionMode mode) {
    const auto kp = detail::make_kernel_params(sched, spec, variant, mode);
    double t[Q];
    for (int a = 0; a < Q; ++a) t[detail::kDirToTensor[a]] = f[a];
    if (detail::collide_tensor(t, detail::to_node(node), kp) != 0) {
        throw SingularSystem("gradient system denominator below 1e-12 rho cs2");
    }
    Populations out{};
    for (int a = 0; a < Q; ++a) out[a] = t[detail::kDirToTensor[a]];
    return out;
}

} // namespace clbm
