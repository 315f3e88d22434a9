#pragma once

// Per-node collision on a 3x3x3 tensor layout. Index t = 9*a + 3*b + c, where
// (a, b, c) are either direction codes (0 rest, 1 positive, 2 negative) for
// populations or moment orders for moments. Every transform between the two
// factorizes into independent 3-point line transforms along x, y and z.

#include "clbm/collision.hpp"

#include <array>
#include <cmath>
#include <type_traits>

namespace clbm::detail {

[[nodiscard]] constexpr int tcode(int c) { return c == 0 ? 0 : (c > 0 ? 1 : 2); }

[[nodiscard]] constexpr int T(int m, int n, int p) { return 9 * m + 3 * n + p; }

inline constexpr std::array<int, Q> kDirToTensor = [] {
    std::array<int, Q> map{};
    for (int a = 0; a < Q; ++a) {
        map[a] = 9 * tcode(kCx[a]) + 3 * tcode(kCy[a]) + tcode(kCz[a]);
    }
    return map;
}();

inline constexpr std::array<int, Q> kCanonToTensor = [] {
    std::array<int, Q> map{};
    for (int i = 0; i < Q; ++i) {
        map[i] = T(kMomentOrder[i].m, kMomentOrder[i].n, kMomentOrder[i].p);
    }
    return map;
}();

struct KernelParams {
    double r = 1, s = 1, r2 = 1, s2 = 1;
    double inv_r = 1, inv_s = 1, inv_r2 = 1, inv_s2 = 1;
    double cs2 = 1.0 / 3.0, cs4 = 1.0 / 9.0, cs6 = 1.0 / 27.0;
    double w_nu = 1, w_xi = 1, w_1 = 1, w_high = 1;
    double t_nu = 0.5; ///< 1/w_nu - 1/2
    double t_xi = 0.5; ///< 1/w_xi - 1/2
    Variant variant = Variant::central;
    CorrectionMode corrections = CorrectionMode::full;
};

[[nodiscard]] inline KernelParams make_kernel_params(const RelaxationSchedule& sched,
                                                     const LatticeSpec& spec, Variant variant,
                                                     CorrectionMode mode) {
    KernelParams kp;
    kp.r = spec.r;
    kp.s = spec.s;
    kp.r2 = spec.r * spec.r;
    kp.s2 = spec.s * spec.s;
    kp.inv_r = 1.0 / spec.r;
    kp.inv_s = 1.0 / spec.s;
    kp.inv_r2 = 1.0 / kp.r2;
    kp.inv_s2 = 1.0 / kp.s2;
    kp.cs2 = spec.cs2;
    kp.cs4 = spec.cs2 * spec.cs2;
    kp.cs6 = kp.cs4 * spec.cs2;
    kp.w_nu = sched.omega_nu;
    kp.w_xi = sched.omega_xi;
    kp.w_1 = sched.omega_1;
    kp.w_high = sched.omega_high;
    kp.t_nu = 1.0 / sched.omega_nu - 0.5;
    kp.t_xi = 1.0 / sched.omega_xi - 0.5;
    kp.variant = variant;
    kp.corrections = mode;
    return kp;
}


// ---------------------------------------------------------------------------
// Arithmetic is templated on R, either double or Pack (kLanes nodes at once).

inline constexpr int kLanes = 8;
using Pack = double __attribute__((vector_size(kLanes * sizeof(double))));

template <class R>
[[nodiscard]] inline R splat(double v) {
    if constexpr (std::is_same_v<R, double>) {
        return v;
    } else {
        return R{} + v;
    }
}

[[nodiscard]] inline double vabs(double x) { return std::abs(x); }
[[nodiscard]] inline Pack vabs(Pack x) { return x < Pack{} ? -x : x; }

/// Bit w set when lane w satisfies a < b.
[[nodiscard]] inline unsigned lanes_below(double a, double b) { return a < b ? 1u : 0u; }
[[nodiscard]] inline unsigned lanes_below(Pack a, Pack b) {
    const auto m = a < b;
    unsigned bits = 0;
    for (int w = 0; w < kLanes; ++w) bits |= (m[w] != 0 ? 1u : 0u) << w;
    return bits;
}

template <class R>
struct Node {
    R rho, ux, uy, uz;
    R dx, dy, dz; ///< density gradient
    R fx, fy, fz; ///< body force
};

[[nodiscard]] inline Node<double> to_node(const NodeState& s) {
    return {s.rho, s.u.ux, s.u.uy, s.u.uz, s.grad_rho[0], s.grad_rho[1], s.grad_rho[2],
            s.force[0], s.force[1], s.force[2]};
}

// ---------------------------------------------------------------------------
// Line transforms. Values (a0, a+, a-) on velocities (0, +h, -h) map to the
// moments sum (e - u)^n a, n = 0, 1, 2; the inverse undoes it.

template <int St, class R>
inline void fwd_line(R* t, int b, double h, double h2, R u) {
    const R a0 = t[b];
    const R ap = t[b + St];
    const R am = t[b + 2 * St];
    const R m0 = a0 + ap + am;
    const R m1 = h * (ap - am);
    const R m2 = h2 * (ap + am);
    t[b] = m0;
    t[b + St] = m1 - u * m0;
    t[b + 2 * St] = m2 - u * (2.0 * m1 - u * m0);
}

template <int St, class R>
inline void inv_line(R* t, int b, double inv_h, double inv_h2, R u) {
    const R k0 = t[b];
    const R k1 = t[b + St];
    const R k2 = t[b + 2 * St];
    const R q1 = (k1 + u * k0) * inv_h;
    const R q2 = (k2 + u * (2.0 * k1 + u * k0)) * inv_h2;
    t[b] = k0 - q2;
    t[b + St] = 0.5 * (q2 + q1);
    t[b + 2 * St] = 0.5 * (q2 - q1);
}

template <int St, class R>
inline void shift_line(R* t, int b, R u) {
    const R m0 = t[b];
    const R m1 = t[b + St];
    t[b + St] = m1 - u * m0;
    t[b + 2 * St] = t[b + 2 * St] - u * (2.0 * m1 - u * m0);
}

template <int St, class R>
inline void unshift_line(R* t, int b, R u) {
    const R k0 = t[b];
    const R k1 = t[b + St];
    t[b + St] = k1 + u * k0;
    t[b + 2 * St] = t[b + 2 * St] + u * (2.0 * k1 + u * k0);
}

template <class R>
inline void forward_moments(R* t, double r, double r2, double s, double s2, R ux, R uy, R uz) {
    for (int b = 0; b < 9; ++b) fwd_line<9>(t, b, 1.0, 1.0, ux);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) fwd_line<3>(t, 9 * i + k, r, r2, uy);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) fwd_line<1>(t, 9 * i + 3 * j, s, s2, uz);
}

template <class R>
inline void inverse_moments(R* t, double inv_r, double inv_r2, double inv_s, double inv_s2, R ux, R uy, R uz) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) inv_line<1>(t, 9 * i + 3 * j, inv_s, inv_s2, uz);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) inv_line<3>(t, 9 * i + k, inv_r, inv_r2, uy);
    for (int b = 0; b < 9; ++b) inv_line<9>(t, b, 1.0, 1.0, ux);
}

template <class R>
inline void shift_moments(R* t, R ux, R uy, R uz) {
    for (int b = 0; b < 9; ++b) shift_line<9>(t, b, ux);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) shift_line<3>(t, 9 * i + k, uy);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) shift_line<1>(t, 9 * i + 3 * j, uz);
}

template <class R>
inline void unshift_moments(R* t, R ux, R uy, R uz) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) unshift_line<1>(t, 9 * i + 3 * j, uz);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) unshift_line<3>(t, 9 * i + k, uy);
    for (int b = 0; b < 9; ++b) unshift_line<9>(t, b, ux);
}

// ---------------------------------------------------------------------------
// Corrections and gradient recovery.

template <class R>
struct Coeffs {
    R theta_sx{}, theta_sy{}, theta_sz{};
    R theta_bx{}, theta_by{}, theta_bz{};
    R lambda_sx{}, lambda_sy{}, lambda_sz{};
    R lambda_bx{}, lambda_by{}, lambda_bz{};
};

template <class R>
[[nodiscard]] inline Coeffs<R> coefficients(const Node<R>& nd, const KernelParams& kp) {
    Coeffs<R> c;
    if (kp.corrections == CorrectionMode::off) return c;
    const bool full = kp.corrections == CorrectionMode::full;
    const R rho = nd.rho;
    const double qx = 3.0 * kp.cs2 - 1.0;
    const double qy = 3.0 * kp.cs2 - kp.r2;
    const double qz = 3.0 * kp.cs2 - kp.s2;
    const R vx = full ? 3.0 * nd.ux * nd.ux : R{};
    const R vy = full ? 3.0 * nd.uy * nd.uy : R{};
    const R vz = full ? 3.0 * nd.uz * nd.uz : R{};
    c.theta_sx = -rho * (vx + qx) * kp.t_nu;
    c.theta_sy = -rho * (vy + qy) * kp.t_nu;
    c.theta_sz = -rho * (vz + qz) * kp.t_nu;
    c.theta_bx = -rho * (vx + qx) * kp.t_xi;
    c.theta_by = -rho * (vy + qy) * kp.t_xi;
    c.theta_bz = -rho * (vz + qz) * kp.t_xi;
    if (full) {
        c.lambda_sx = -qx * kp.t_nu * nd.ux;
        c.lambda_sy = qy * kp.t_nu * nd.uy;
        c.lambda_sz = qz * kp.t_nu * nd.uz;
        c.lambda_bx = -qx * kp.t_xi * nd.ux;
        c.lambda_by = -qy * kp.t_xi * nd.uy;
        c.lambda_bz = -qz * kp.t_xi * nd.uz;
    }
    return c;
}

/// Solves for the diagonal velocity gradients given the non-equilibrium parts
/// n2s = k2s - 3 cs2 rho, n2d1 = k2d1, n2d2 = k2d2. Returns the lanes found
/// singular (0 when all are fine).
template <class R>
[[nodiscard]] inline unsigned recover_gradients(R n2s, R n2d1, R n2d2, const Node<R>& nd, const KernelParams& kp,
                                                R g[3]) {
    const bool full = kp.corrections == CorrectionMode::full;
    const R rho = nd.rho;
    const double qx = 3.0 * kp.cs2 - 1.0;
    const double qy = 3.0 * kp.cs2 - kp.r2;
    const double qz = 3.0 * kp.cs2 - kp.s2;
    const R hx = full ? 1.5 * nd.ux * nd.ux : R{};
    const R hy = full ? 1.5 * nd.uy * nd.uy : R{};
    const R hz = full ? 1.5 * nd.uz * nd.uz : R{};

    R esr1{}, esr2{}, ebr{};
    if (full) {
        const R A = 0.5 * qx * nd.ux;
        const R B = 0.5 * qy * nd.uy;
        const R C = 0.5 * qz * nd.uz;
        esr1 = -A * nd.dx + B * nd.dy;
        esr2 = -A * nd.dx + C * nd.dz;
        ebr = -A * nd.dx - B * nd.dy - C * nd.dz;
    }
    const R Rb = n2s + ebr;
    const R Rs1 = n2d1 + esr1;
    const R Rs2 = n2d2 + esr2;

    const double a_nu = 2.0 * kp.cs2 / kp.w_nu;
    const double a_xi = 2.0 * kp.cs2 / kp.w_xi;
    const R Csx = (-a_nu + 0.5 * qx + hx) * rho;
    const R Csy = (a_nu - 0.5 * qy - hy) * rho;
    const R Csz = (a_nu - 0.5 * qz - hz) * rho;
    const R Cbx = (-a_xi + 0.5 * qx + hx) * rho;
    const R Cby = (-a_xi + 0.5 * qy + hy) * rho;
    const R Cbz = (-a_xi + 0.5 * qz + hz) * rho;

    const R den = -Csx * Csz * Cby - Csy * (Csx * Cbz - Csz * Cbx);
    const R thr = 1e-12 * kp.cs2 * rho;
    const unsigned bad = lanes_below(vabs(den), thr) | lanes_below(vabs(Csy), thr) | lanes_below(vabs(Csz), thr);
    const R gx = (-Csz * Cby * Rs1 - Csy * (Cbz * Rs2 - Csz * Rb)) / den;
    g[0] = gx;
    g[1] = (Rs1 - Csx * gx) / Csy;
    g[2] = (Rs2 - Csx * gx) / Csz;
    return bad;
}

/// Correction parts of (k2s_eq, k2d1_eq, k2d2_eq), without the 3 cs2 rho base.
template <class R>
inline void correction_terms(const Coeffs<R>& c, const R g[3], R dx, R dy, R dz, double dt, R out[3]) {
    out[0] = (c.theta_bx * g[0] + c.theta_by * g[1] + c.theta_bz * g[2] + c.lambda_bx * dx + c.lambda_by * dy +
              c.lambda_bz * dz) * dt;
    out[1] = (c.theta_sx * g[0] - c.theta_sy * g[1] + c.lambda_sx * dx + c.lambda_sy * dy) * dt;
    out[2] = (c.theta_sx * g[0] - c.theta_sz * g[2] + c.lambda_sx * dx + c.lambda_sz * dz) * dt;
}

// ---------------------------------------------------------------------------
// Relaxation in the central frame (input/output: central moments).

template <class R>
[[nodiscard]] inline unsigned relax_central_tensor(R* k, const Node<R>& nd, const KernelParams& kp, double dt = 1.0) {
    const R rho = nd.rho;
    const double w1 = kp.w_1;
    const double src1 = (1.0 - 0.5 * w1) * dt;
    k[T(1, 0, 0)] += -w1 * k[T(1, 0, 0)] + src1 * nd.fx;
    k[T(0, 1, 0)] += -w1 * k[T(0, 1, 0)] + src1 * nd.fy;
    k[T(0, 0, 1)] += -w1 * k[T(0, 0, 1)] + src1 * nd.fz;

    const double cnu = 1.0 - kp.w_nu;
    k[T(1, 1, 0)] *= cnu;
    k[T(1, 0, 1)] *= cnu;
    k[T(0, 1, 1)] *= cnu;

    const R k200 = k[T(2, 0, 0)], k020 = k[T(0, 2, 0)], k002 = k[T(0, 0, 2)];
    const R k2s = k200 + k020 + k002;
    const R k2d1 = k200 - k020;
    const R k2d2 = k200 - k002;
    const R base = 3.0 * kp.cs2 * rho;
    R corr[3] = {R{}, R{}, R{}};
    unsigned bad = 0;
    if (kp.corrections != CorrectionMode::off) {
        R g[3];
        bad = recover_gradients(k2s - base, k2d1, k2d2, nd, kp, g);
        correction_terms(coefficients(nd, kp), g, nd.dx, nd.dy, nd.dz, dt, corr);
    }
    const R p2s = k2s + kp.w_xi * (base + corr[0] - k2s);
    const R p2d1 = k2d1 + kp.w_nu * (corr[1] - k2d1);
    const R p2d2 = k2d2 + kp.w_nu * (corr[2] - k2d2);
    constexpr double third = 1.0 / 3.0;
    k[T(2, 0, 0)] = (p2s + p2d1 + p2d2) * third;
    k[T(0, 2, 0)] = (p2s - 2.0 * p2d1 + p2d2) * third;
    k[T(0, 0, 2)] = (p2s + p2d1 - 2.0 * p2d2) * third;

    const double wh = kp.w_high;
    const double ch = 1.0 - wh;
    auto pair_to_zero = [&](int ia, int ib) {
        const R sum = ch * (k[ia] + k[ib]);
        const R dif = ch * (k[ia] - k[ib]);
        k[ia] = 0.5 * (sum + dif);
        k[ib] = 0.5 * (sum - dif);
    };
    pair_to_zero(T(1, 2, 0), T(1, 0, 2));
    pair_to_zero(T(2, 1, 0), T(0, 1, 2));
    pair_to_zero(T(2, 0, 1), T(0, 2, 1));
    k[T(1, 1, 1)] *= ch;

    const R k220 = k[T(2, 2, 0)], k202 = k[T(2, 0, 2)], k022 = k[T(0, 2, 2)];
    const R k4s = k220 + k202 + k022;
    const R k4d1 = k220 + k202 - k022;
    const R k4d2 = k220 - k202;
    const R c4 = kp.cs4 * rho;
    const R p4s = k4s + wh * (3.0 * c4 - k4s);
    const R p4d1 = k4d1 + wh * (c4 - k4d1);
    const R p4d2 = ch * k4d2;
    k[T(2, 2, 0)] = 0.25 * (p4s + p4d1 + 2.0 * p4d2);
    k[T(2, 0, 2)] = 0.25 * (p4s + p4d1 - 2.0 * p4d2);
    k[T(0, 2, 2)] = 0.5 * (p4s - p4d1);

    k[T(2, 1, 1)] *= ch;
    k[T(1, 2, 1)] *= ch;
    k[T(1, 1, 2)] *= ch;
    k[T(1, 2, 2)] *= ch;
    k[T(2, 1, 2)] *= ch;
    k[T(2, 2, 1)] *= ch;
    k[T(2, 2, 2)] += wh * (kp.cs6 * rho - k[T(2, 2, 2)]);
    return bad;
}

// ---------------------------------------------------------------------------
// Relaxation in the raw frame (input/output: scaled raw moments).

template <class R>
[[nodiscard]] inline unsigned relax_raw_tensor(R* k, const Node<R>& nd, const KernelParams& kp, double dt = 1.0) {
    const R rho = nd.rho;
    const R ux = nd.ux, uy = nd.uy, uz = nd.uz;
    const R Fx = nd.fx, Fy = nd.fy, Fz = nd.fz;
    const double cs2 = kp.cs2, cs4 = kp.cs4;
    const R ux2 = ux * ux, uy2 = uy * uy, uz2 = uz * uz;

    const double w1 = kp.w_1;
    const double src1 = (1.0 - 0.5 * w1) * dt;
    k[T(1, 0, 0)] += w1 * (rho * ux - k[T(1, 0, 0)]) + src1 * Fx;
    k[T(0, 1, 0)] += w1 * (rho * uy - k[T(0, 1, 0)]) + src1 * Fy;
    k[T(0, 0, 1)] += w1 * (rho * uz - k[T(0, 0, 1)]) + src1 * Fz;

    const double wn = kp.w_nu;
    const double srcn = (1.0 - 0.5 * wn) * dt;
    k[T(1, 1, 0)] += wn * (rho * ux * uy - k[T(1, 1, 0)]) + srcn * (Fx * uy + Fy * ux);
    k[T(1, 0, 1)] += wn * (rho * ux * uz - k[T(1, 0, 1)]) + srcn * (Fx * uz + Fz * ux);
    k[T(0, 1, 1)] += wn * (rho * uy * uz - k[T(0, 1, 1)]) + srcn * (Fy * uz + Fz * uy);

    const R e200 = cs2 * rho + rho * ux2;
    const R e020 = cs2 * rho + rho * uy2;
    const R e002 = cs2 * rho + rho * uz2;
    const R k200 = k[T(2, 0, 0)], k020 = k[T(0, 2, 0)], k002 = k[T(0, 0, 2)];
    const R k2s = k200 + k020 + k002;
    const R k2d1 = k200 - k020;
    const R k2d2 = k200 - k002;
    const R e2s = e200 + e020 + e002;
    const R e2d1 = e200 - e020;
    const R e2d2 = e200 - e002;
    const R fux = Fx * ux, fuy = Fy * uy, fuz = Fz * uz;
    R corr[3] = {R{}, R{}, R{}};
    unsigned bad = 0;
    if (kp.corrections != CorrectionMode::off) {
        // Central-frame non-equilibrium parts expressed through raw moments.
        R g[3];
        bad = recover_gradients<R>(k2s - e2s + fux + fuy + fuz, k2d1 - e2d1 + fux - fuy, k2d2 - e2d2 + fux - fuz,
                                   nd, kp, g);
        correction_terms(coefficients(nd, kp), g, nd.dx, nd.dy, nd.dz, dt, corr);
    }
    const double wx = kp.w_xi;
    const R p2s = k2s + wx * (e2s + corr[0] - k2s) + (1.0 - 0.5 * wx) * dt * 2.0 * (fux + fuy + fuz);
    const R p2d1 = k2d1 + wn * (e2d1 + corr[1] - k2d1) + srcn * 2.0 * (fux - fuy);
    const R p2d2 = k2d2 + wn * (e2d2 + corr[2] - k2d2) + srcn * 2.0 * (fux - fuz);
    constexpr double third = 1.0 / 3.0;
    k[T(2, 0, 0)] = (p2s + p2d1 + p2d2) * third;
    k[T(0, 2, 0)] = (p2s - 2.0 * p2d1 + p2d2) * third;
    k[T(0, 0, 2)] = (p2s + p2d1 - 2.0 * p2d2) * third;

    const double wh = kp.w_high;
    auto pair = [&](int ia, int ib, R ea, R eb) {
        const R s0 = k[ia] + k[ib];
        const R d0 = k[ia] - k[ib];
        const R sum = s0 + wh * (ea + eb - s0);
        const R dif = d0 + wh * (ea - eb - d0);
        k[ia] = 0.5 * (sum + dif);
        k[ib] = 0.5 * (sum - dif);
    };
    pair(T(1, 2, 0), T(1, 0, 2), cs2 * rho * ux + rho * ux * uy2, cs2 * rho * ux + rho * ux * uz2);
    pair(T(2, 1, 0), T(0, 1, 2), cs2 * rho * uy + rho * ux2 * uy, cs2 * rho * uy + rho * uy * uz2);
    pair(T(2, 0, 1), T(0, 2, 1), cs2 * rho * uz + rho * ux2 * uz, cs2 * rho * uz + rho * uy2 * uz);
    k[T(1, 1, 1)] += wh * (rho * ux * uy * uz - k[T(1, 1, 1)]);

    const R e220 = cs4 * rho + rho * cs2 * (ux2 + uy2) + rho * ux2 * uy2;
    const R e202 = cs4 * rho + rho * cs2 * (ux2 + uz2) + rho * ux2 * uz2;
    const R e022 = cs4 * rho + rho * cs2 * (uy2 + uz2) + rho * uy2 * uz2;
    const R k220 = k[T(2, 2, 0)], k202 = k[T(2, 0, 2)], k022 = k[T(0, 2, 2)];
    const R k4s = k220 + k202 + k022;
    const R k4d1 = k220 + k202 - k022;
    const R k4d2 = k220 - k202;
    const R p4s = k4s + wh * (e220 + e202 + e022 - k4s);
    const R p4d1 = k4d1 + wh * (e220 + e202 - e022 - k4d1);
    const R p4d2 = k4d2 + wh * (e220 - e202 - k4d2);
    k[T(2, 2, 0)] = 0.25 * (p4s + p4d1 + 2.0 * p4d2);
    k[T(2, 0, 2)] = 0.25 * (p4s + p4d1 - 2.0 * p4d2);
    k[T(0, 2, 2)] = 0.5 * (p4s - p4d1);

    k[T(2, 1, 1)] += wh * (rho * (cs2 + ux2) * uy * uz - k[T(2, 1, 1)]);
    k[T(1, 2, 1)] += wh * (rho * (cs2 + uy2) * ux * uz - k[T(1, 2, 1)]);
    k[T(1, 1, 2)] += wh * (rho * (cs2 + uz2) * ux * uy - k[T(1, 1, 2)]);
    k[T(1, 2, 2)] += wh * (cs4 * rho * ux + rho * cs2 * ux * (uy2 + uz2) + rho * ux * uy2 * uz2 - k[T(1, 2, 2)]);
    k[T(2, 1, 2)] += wh * (cs4 * rho * uy + rho * cs2 * uy * (ux2 + uz2) + rho * ux2 * uy * uz2 - k[T(2, 1, 2)]);
    k[T(2, 2, 1)] += wh * (cs4 * rho * uz + rho * cs2 * uz * (ux2 + uy2) + rho * ux2 * uy2 * uz - k[T(2, 2, 1)]);
    const R e222 = kp.cs6 * rho + rho * cs4 * (ux2 + uy2 + uz2) + rho * cs2 * (ux2 * uy2 + uy2 * uz2 + ux2 * uz2) +
                   rho * ux2 * uy2 * uz2;
    k[T(2, 2, 2)] += wh * (e222 - k[T(2, 2, 2)]);
    return bad;
}

/// Full collision on populations stored in tensor layout, in place. Returns
/// the lanes whose gradient system was singular.
template <class R>
[[nodiscard]] inline unsigned collide_tensor(R* t, const Node<R>& nd, const KernelParams& kp) {
    if (kp.variant == Variant::central) {
        forward_moments(t, kp.r, kp.r2, kp.s, kp.s2, nd.ux, nd.uy, nd.uz);
        const unsigned bad = relax_central_tensor(t, nd, kp);
        inverse_moments(t, kp.inv_r, kp.inv_r2, kp.inv_s, kp.inv_s2, nd.ux, nd.uy, nd.uz);
        return bad;
    }
    const R zero{};
    forward_moments(t, kp.r, kp.r2, kp.s, kp.s2, zero, zero, zero);
    const unsigned bad = relax_raw_tensor(t, nd, kp);
    inverse_moments(t, kp.inv_r, kp.inv_r2, kp.inv_s, kp.inv_s2, zero, zero, zero);
    return bad;
}

} // namespace clbm::detail
