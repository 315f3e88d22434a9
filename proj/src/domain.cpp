#include "clbm/domain.hpp"

#include "clbm/detail/kernel.hpp"
#include "clbm/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <limits>
#include <sstream>

namespace clbm {

namespace {

constexpr std::size_t kBlock = 64;

// Reads up to kLanes values; missing lanes repeat the last one.
inline detail::Pack load_pack(const double* p, std::size_t len) {
    detail::Pack v;
    if (len >= static_cast<std::size_t>(detail::kLanes)) {
        std::memcpy(&v, p, sizeof(v));
    } else {
        for (int w = 0; w < detail::kLanes; ++w) v[w] = p[std::min<std::size_t>(w, len - 1)];
    }
    return v;
}


struct Link {
    bool wall = false;
    bool lid = false;
    std::size_t target = 0;
};

// Where does direction a go from node (i, j, k)?
struct LinkResolver {
    GridDims d;
    bool per[3];
    bool lid_moving;

    [[nodiscard]] Link operator()(int i, int j, int k, int a) const {
        Link l;
        int ti = i + kCx[a];
        int tj = j + kCy[a];
        int tk = k + kCz[a];
        if (ti < 0 || ti >= d.nx) {
            if (per[0]) ti = (ti + d.nx) % d.nx;
            else l.wall = true;
        }
        if (tj < 0 || tj >= d.ny) {
            if (per[1]) {
                tj = (tj + d.ny) % d.ny;
            } else {
                l.wall = true;
                if (tj >= d.ny && lid_moving) l.lid = true;
            }
        }
        if (tk < 0 || tk >= d.nz) {
            if (per[2]) tk = (tk + d.nz) % d.nz;
            else l.wall = true;
        }
        if (!l.wall) l.target = d.index(ti, tj, tk);
        return l;
    }
};

LinkResolver make_resolver(const GridDims& d, const BoundarySpec& b) {
    return {d, {b.periodic(0), b.periodic(1), b.periodic(2)}, b.faces[Face::y_max].kind == FaceKind::wall_moving};
}

const char* face_name(int f) {
    static const char* names[] = {"x_min", "x_max", "y_min", "y_max", "z_min", "z_max"};
    return names[f];
}

} // namespace

PopulationField::PopulationField(GridDims dims) : dims_(dims), nodes_(dims.nodes()) {
    if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1) throw InvalidParameter("grid dimensions must be >= 1");
    buf_[0].assign(Q * nodes_, 0.0);
    buf_[1].assign(Q * nodes_, 0.0);
}

Populations PopulationField::node(std::size_t n) const {
    Populations f{};
    for (int a = 0; a < Q; ++a) f[a] = current(a)[n];
    return f;
}

void PopulationField::set_node(std::size_t n, const Populations& f) {
    for (int a = 0; a < Q; ++a) current(a)[n] = f[a];
}

std::size_t PopulationField::allocated_bytes() const {
    return (buf_[0].capacity() + buf_[1].capacity()) * sizeof(double);
}

HydroFieldSet::HydroFieldSet(GridDims d) : dims(d) {
    const std::size_t n = d.nodes();
    rho.assign(n, 1.0);
    ux.assign(n, 0.0);
    uy.assign(n, 0.0);
    uz.assign(n, 0.0);
    grad_x.assign(n, 0.0);
    grad_y.assign(n, 0.0);
    grad_z.assign(n, 0.0);
}

std::size_t HydroFieldSet::allocated_bytes() const {
    std::size_t c = 0;
    for (const auto* v : {&rho, &ux, &uy, &uz, &grad_x, &grad_y, &grad_z, &force_x, &force_y, &force_z}) {
        c += v->capacity();
    }
    return c * sizeof(double);
}

void BoundarySpec::validate() const {
    for (int axis = 0; axis < 3; ++axis) {
        const bool p0 = faces[2 * axis].kind == FaceKind::periodic;
        const bool p1 = faces[2 * axis + 1].kind == FaceKind::periodic;
        if (p0 != p1) {
            std::ostringstream os;
            os << "faces " << face_name(2 * axis) << " and " << face_name(2 * axis + 1)
               << " must both be periodic or both be walls";
            throw ConfigurationError(os.str());
        }
    }
    for (int f = 0; f < 6; ++f) {
        if (faces[f].kind == FaceKind::wall_moving && f != Face::y_max) {
            std::ostringstream os;
            os << "moving wall is only supported on y_max, not " << face_name(f);
            throw ConfigurationError(os.str());
        }
    }
}

BoundarySpec BoundarySpec::duct() {
    BoundarySpec b;
    for (int f : {Face::y_min, Face::y_max, Face::z_min, Face::z_max}) b.faces[f].kind = FaceKind::wall_rest;
    return b;
}

BoundarySpec BoundarySpec::cavity(double U) {
    BoundarySpec b;
    for (auto& f : b.faces) f.kind = FaceKind::wall_rest;
    b.faces[Face::y_max] = {FaceKind::wall_moving, U};
    return b;
}

std::array<double, Q> moving_wall_coefficients(const LatticeSpec& spec) {
    const double r2 = spec.r * spec.r;
    const double s2 = spec.s * spec.s;
    const double cs2 = spec.cs2;
    const double edge = (cs2 - s2) * cs2 / (2.0 * r2 * s2);
    const double corner = cs2 * cs2 / (4.0 * r2 * s2);
    std::array<double, Q> c{};
    // Indexed by the outgoing direction; the reflected one is its opposite.
    c[8] = -edge;   // -> 9
    c[7] = edge;    // -> 10
    c[24] = corner; // -> 21
    c[23] = -corner; // -> 22
    c[20] = corner; // -> 25
    c[19] = -corner; // -> 26
    return c;
}

void stream(PopulationField& field, const BoundarySpec& boundary) {
    const GridDims d = field.dims();
    const auto resolve = make_resolver(d, boundary);
    for (int a = 0; a < Q; ++a) {
        const double* src = field.current(a);
        double* dst = field.next(a);
#pragma omp parallel for collapse(2) schedule(static)
        for (int k = 0; k < d.nz; ++k) {
            for (int j = 0; j < d.ny; ++j) {
                for (int i = 0; i < d.nx; ++i) {
                    const Link l = resolve(i, j, k, a);
                    if (!l.wall) dst[l.target] = src[d.index(i, j, k)];
                }
            }
        }
    }
}

void apply_halfway_bounce_back(PopulationField& field, const BoundarySpec& boundary) {
    const GridDims d = field.dims();
    const auto resolve = make_resolver(d, boundary);
    for (int a = 0; a < Q; ++a) {
        const double* src = field.current(a);
        double* dst = field.next(kOpposite[a]);
#pragma omp parallel for collapse(2) schedule(static)
        for (int k = 0; k < d.nz; ++k) {
            for (int j = 0; j < d.ny; ++j) {
                for (int i = 0; i < d.nx; ++i) {
                    const Link l = resolve(i, j, k, a);
                    if (l.wall && !l.lid) {
                        const std::size_t n = d.index(i, j, k);
                        dst[n] = src[n];
                    }
                }
            }
        }
    }
}

void apply_moving_wall(PopulationField& field, std::span<const double> rho, double U, const LatticeSpec& spec,
                       Face face) {
    if (face != Face::y_max) {
        throw ConfigurationError(std::string("moving wall is only supported on y_max, not ") + face_name(face));
    }
    const GridDims d = field.dims();
    const auto aug = moving_wall_coefficients(spec);
    const int j = d.ny - 1;
    for (int a = 0; a < Q; ++a) {
        if (kCy[a] != 1) continue;
        const double* src = field.current(a);
        double* dst = field.next(kOpposite[a]);
        for (int k = 0; k < d.nz; ++k) {
            for (int i = 0; i < d.nx; ++i) {
                const std::size_t n = d.index(i, j, k);
                dst[n] = src[n] + aug[a] * (rho[n] * U);
            }
        }
    }
}

HydroStats update_hydrodynamics(const PopulationField& field, HydroFieldSet& hydro, const LatticeSpec& spec) {
    const std::size_t N = field.nodes();
    const double* f[Q];
    for (int a = 0; a < Q; ++a) f[a] = field.current(a);
    const double r = spec.r, s = spec.s;
    const bool uniform = hydro.force_x.empty();
    const Vec3 F = hydro.force;
    double max_speed = 0.0;
    double min_rho = std::numeric_limits<double>::infinity();
    double max_rho = -std::numeric_limits<double>::infinity();
    std::size_t bad = N;
    const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>((N + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static) reduction(max : max_speed, max_rho) reduction(min : min_rho, bad)
    for (std::ptrdiff_t bi = 0; bi < blocks; ++bi) {
        const std::size_t n0 = static_cast<std::size_t>(bi) * kBlock;
        const std::size_t len = std::min(kBlock, N - n0);
        alignas(64) double rho[kBlock], jx[kBlock], jy[kBlock], jz[kBlock];
        for (std::size_t p = 0; p < len; p += detail::kLanes) {
            const std::size_t m = len - p;
            detail::Pack sr{}, sx{}, sy{}, sz{};
            for (int a = 0; a < Q; ++a) {
                const detail::Pack v = load_pack(f[a] + n0 + p, m);
                sr += v;
                if (kCx[a] > 0) sx += v;
                if (kCx[a] < 0) sx -= v;
                if (kCy[a] > 0) sy += v;
                if (kCy[a] < 0) sy -= v;
                if (kCz[a] > 0) sz += v;
                if (kCz[a] < 0) sz -= v;
            }
            std::memcpy(rho + p, &sr, sizeof(sr));
            std::memcpy(jx + p, &sx, sizeof(sx));
            std::memcpy(jy + p, &sy, sizeof(sy));
            std::memcpy(jz + p, &sz, sizeof(sz));
        }
        for (std::size_t w = 0; w < len; ++w) {
            const std::size_t n = n0 + w;
            const double fx = uniform ? F[0] : hydro.force_x[n];
            const double fy = uniform ? F[1] : hydro.force_y[n];
            const double fz = uniform ? F[2] : hydro.force_z[n];
            const double inv = 1.0 / rho[w];
            const double ux = (jx[w] + 0.5 * fx) * inv;
            const double uy = (r * jy[w] + 0.5 * fy) * inv;
            const double uz = (s * jz[w] + 0.5 * fz) * inv;
            hydro.rho[n] = rho[w];
            hydro.ux[n] = ux;
            hydro.uy[n] = uy;
            hydro.uz[n] = uz;
            const double sp = std::sqrt(ux * ux + uy * uy + uz * uz);
            if (!(rho[w] > 0.0) || !std::isfinite(rho[w]) || !std::isfinite(sp)) bad = std::min(bad, n);
            max_speed = std::max(max_speed, sp);
            min_rho = std::min(min_rho, rho[w]);
            max_rho = std::max(max_rho, rho[w]);
        }
    }
    if (bad != N) {
        std::ostringstream os;
        os << "nonpositive or non-finite density at node " << bad << " (rho = " << hydro.rho[bad] << ")";
        throw NonPositiveDensity(os.str(), bad);
    }
    return {max_speed, min_rho, max_rho};
}

namespace {

// Derivative along one axis at position p of n samples read through `at`.
template <class At>
double axis_derivative(int p, int n, bool periodic, double h, At at) {
    if (n == 1) return 0.0;
    if (periodic) {
        const int pp = (p + 1) % n;
        const int pm = (p - 1 + n) % n;
        return (at(pp) - at(pm)) / (2.0 * h);
    }
    if (n == 2) return (at(1) - at(0)) / h;
    if (p == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (p == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    return (at(p + 1) - at(p - 1)) / (2.0 * h);
}

} // namespace

void density_gradient(HydroFieldSet& hydro, const LatticeSpec& spec, const BoundarySpec& boundary) {
    const GridDims d = hydro.dims;
    const bool px = boundary.periodic(0), py = boundary.periodic(1), pz = boundary.periodic(2);
    const double* rho = hydro.rho.data();
#pragma omp parallel for collapse(2) schedule(static)
    for (int k = 0; k < d.nz; ++k) {
        for (int j = 0; j < d.ny; ++j) {
            for (int i = 0; i < d.nx; ++i) {
                const std::size_t n = d.index(i, j, k);
                hydro.grad_x[n] = axis_derivative(i, d.nx, px, 1.0, [&](int q) { return rho[d.index(q, j, k)]; });
                hydro.grad_y[n] = axis_derivative(j, d.ny, py, spec.r, [&](int q) { return rho[d.index(i, q, k)]; });
                hydro.grad_z[n] = axis_derivative(k, d.nz, pz, spec.s, [&](int q) { return rho[d.index(i, j, q)]; });
            }
        }
    }
}

namespace {

using detail::Pack;
using detail::kLanes;

inline void store(double* p, const Pack& v, std::size_t len) {
    if (len >= static_cast<std::size_t>(kLanes)) {
        std::memcpy(p, &v, sizeof(Pack));
    } else {
        for (std::size_t w = 0; w < len; ++w) p[w] = v[w];
    }
}

// Collides nodes [n0, n0 + len) read from src; post-collision values go to
// out[a * kBlock + w]. Lanes past len repeat the last node and are discarded.
std::size_t collide_block(const double* const* src, const HydroFieldSet& hydro, const detail::KernelParams& kp,
                          std::size_t n0, std::size_t len, double* out, std::size_t prefetch_limit) {
    const bool gradients = kp.corrections == CorrectionMode::full;
    const bool uniform = hydro.force_x.empty();
    std::size_t bad = 0;
    // Far more streams than the hardware prefetcher tracks; fetch the next block by hand.
    if (n0 + 2 * kBlock <= prefetch_limit) {
        for (int a = 0; a < Q; ++a) {
            for (std::size_t c = 0; c < kBlock; c += 8) __builtin_prefetch(src[a] + n0 + kBlock + c, 0, 0);
        }
    }
    for (std::size_t p = 0; p < len; p += kLanes) {
        const std::size_t n = n0 + p;
        const std::size_t m = len - p;
        detail::Node<Pack> nd;
        nd.rho = load_pack(hydro.rho.data() + n, m);
        nd.ux = load_pack(hydro.ux.data() + n, m);
        nd.uy = load_pack(hydro.uy.data() + n, m);
        nd.uz = load_pack(hydro.uz.data() + n, m);
        if (gradients) {
            nd.dx = load_pack(hydro.grad_x.data() + n, m);
            nd.dy = load_pack(hydro.grad_y.data() + n, m);
            nd.dz = load_pack(hydro.grad_z.data() + n, m);
        } else {
            nd.dx = nd.dy = nd.dz = Pack{};
        }
        if (uniform) {
            nd.fx = detail::splat<Pack>(hydro.force[0]);
            nd.fy = detail::splat<Pack>(hydro.force[1]);
            nd.fz = detail::splat<Pack>(hydro.force[2]);
        } else {
            nd.fx = load_pack(hydro.force_x.data() + n, m);
            nd.fy = load_pack(hydro.force_y.data() + n, m);
            nd.fz = load_pack(hydro.force_z.data() + n, m);
        }
        Pack t[Q];
        for (int a = 0; a < Q; ++a) t[detail::kDirToTensor[a]] = load_pack(src[a] + n, m);
        unsigned lanes = detail::collide_tensor(t, nd, kp);
        if (m < static_cast<std::size_t>(kLanes)) lanes &= (1u << m) - 1u;
        bad += static_cast<std::size_t>(std::popcount(lanes));
        for (int a = 0; a < Q; ++a) store(out + a * kBlock + p, t[detail::kDirToTensor[a]], m);
    }
    return bad;
}

} // namespace

std::size_t collide_field(PopulationField& field, const HydroFieldSet& hydro, const detail::KernelParams& kp) {
    const std::size_t N = field.nodes();
    double* f[Q];
    for (int a = 0; a < Q; ++a) f[a] = field.current(a);
    std::size_t bad = 0;
    const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>((N + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static) reduction(+ : bad)
    for (std::ptrdiff_t bi = 0; bi < blocks; ++bi) {
        const std::size_t n0 = static_cast<std::size_t>(bi) * kBlock;
        const std::size_t len = std::min(kBlock, N - n0);
        alignas(64) double buf[Q * kBlock];
        bad += collide_block(f, hydro, kp, n0, len, buf, N);
        for (int a = 0; a < Q; ++a) std::copy_n(buf + a * kBlock, len, f[a] + n0);
    }
    return bad;
}

std::size_t collide_and_stream(PopulationField& field, const HydroFieldSet& hydro, const LatticeSpec& spec,
                               const BoundarySpec& boundary, const detail::KernelParams& kp) {
    const GridDims d = field.dims();
    const auto resolve = make_resolver(d, boundary);
    const double U = boundary.faces[Face::y_max].lid_velocity;
    const auto aug = moving_wall_coefficients(spec);
    const double* src[Q];
    double* dst[Q];
    std::ptrdiff_t off[Q];
    for (int a = 0; a < Q; ++a) {
        src[a] = field.current(a);
        dst[a] = field.next(a);
        off[a] = kCx[a] + static_cast<std::ptrdiff_t>(d.nx) * (kCy[a] + static_cast<std::ptrdiff_t>(d.ny) * kCz[a]);
    }
    // Blocks never straddle two z-planes.
    const std::size_t plane = static_cast<std::size_t>(d.nx) * static_cast<std::size_t>(d.ny);
    const std::size_t per_plane = (plane + kBlock - 1) / kBlock;
    const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>(per_plane * static_cast<std::size_t>(d.nz));
    const bool wrap_x = boundary.periodic(0);
    std::size_t bad = 0;
#pragma omp parallel for schedule(static) reduction(+ : bad)
    for (std::ptrdiff_t bi = 0; bi < blocks; ++bi) {
        const int k = static_cast<int>(static_cast<std::size_t>(bi) / per_plane);
        const std::size_t first = (static_cast<std::size_t>(bi) % per_plane) * kBlock;
        const std::size_t len = std::min(kBlock, plane - first);
        const std::size_t n0 = static_cast<std::size_t>(k) * plane + first;
        alignas(64) double buf[Q * kBlock];
        bad += collide_block(src, hydro, kp, n0, len, buf, d.nodes());

        // Runs of interior nodes stream with plain offsets; the rest resolve links.
        const bool inner_k = k > 0 && k < d.nz - 1;
        std::size_t w = 0;
        while (w < len) {
            const int j = static_cast<int>((first + w) / static_cast<std::size_t>(d.nx));
            const int i = static_cast<int>((first + w) % static_cast<std::size_t>(d.nx));
            const bool inner = inner_k && j > 0 && j < d.ny - 1 && i > 0 && i < d.nx - 1;
            if (inner) {
                const std::size_t run = std::min<std::size_t>(len - w, static_cast<std::size_t>(d.nx - 1 - i));
                for (int a = 0; a < Q; ++a) {
                    double* out = dst[a] + static_cast<std::ptrdiff_t>(n0 + w) + off[a];
                    std::copy_n(buf + a * kBlock + w, run, out);
                }
                w += run;
                continue;
            }
            const std::size_t n = n0 + w;
            if (inner_k && wrap_x && j > 0 && j < d.ny - 1) {
                // Only the x wrap differs from the interior.
                for (int a = 0; a < Q; ++a) {
                    const int ti = i + kCx[a];
                    const std::ptrdiff_t fix = ti < 0 ? d.nx : (ti >= d.nx ? -d.nx : 0);
                    dst[a][static_cast<std::ptrdiff_t>(n) + off[a] + fix] = buf[a * kBlock + w];
                }
                ++w;
                continue;
            }
            for (int a = 0; a < Q; ++a) {
                const double v = buf[a * kBlock + w];
                const Link l = resolve(i, j, k, a);
                if (!l.wall) {
                    dst[a][l.target] = v;
                } else if (l.lid) {
                    dst[kOpposite[a]][n] = v + aug[a] * (hydro.rho[n] * U);
                } else {
                    dst[kOpposite[a]][n] = v;
                }
            }
            ++w;
        }
    }
    return bad;
}

double total_mass(const PopulationField& field) {
    double m = 0.0;
    for (int a = 0; a < Q; ++a) {
        const double* f = field.current(a);
        for (std::size_t n = 0; n < field.nodes(); ++n) m += f[n];
    }
    return m;
}

} // namespace clbm
