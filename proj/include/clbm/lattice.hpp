#pragma once

#include <array>
#include <optional>
#include <span>

namespace clbm {

inline constexpr int Q = 27;

using Vec3 = std::array<double, 3>;
using Populations = std::array<double, Q>;

// Integer direction components; y is scaled by r and z by s in LatticeSpec.
inline constexpr std::array<int, Q> kCx = {0, 1, -1, 0, 0, 0, 0, 1, -1, 1, -1, 1, -1, 1,
                                           -1, 0, 0, 0, 0, 1, -1, 1, -1, 1, -1, 1, -1};
inline constexpr std::array<int, Q> kCy = {0, 0, 0, 1, -1, 0, 0, 1, 1, -1, -1, 0, 0, 0,
                                           0, 1, -1, 1, -1, 1, 1, -1, -1, 1, 1, -1, -1};
inline constexpr std::array<int, Q> kCz = {0, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, 1, 1, -1,
                                           -1, 1, 1, -1, -1, 1, 1, 1, 1, -1, -1, -1, -1};

struct MomentOrder {
    int m, n, p;
};

// Canonical moment ordering: k000, k100, k010, k001, k110, ..., k222.
inline constexpr std::array<MomentOrder, Q> kMomentOrder = {{
    {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1},
    {2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 2, 0}, {1, 0, 2}, {2, 1, 0}, {0, 1, 2},
    {2, 0, 1}, {0, 2, 1}, {1, 1, 1}, {2, 2, 0}, {2, 0, 2}, {0, 2, 2}, {2, 1, 1},
    {1, 2, 1}, {1, 1, 2}, {1, 2, 2}, {2, 1, 2}, {2, 2, 1}, {2, 2, 2},
}};

/// Canonical index of moment (m, n, p), each order in {0, 1, 2}.
[[nodiscard]] constexpr int moment_index(int m, int n, int p) {
    for (int i = 0; i < Q; ++i) {
        if (kMomentOrder[i].m == m && kMomentOrder[i].n == n && kMomentOrder[i].p == p) {
            return i;
        }
    }
    return -1;
}

// Opposite direction table, derived from the integer components.
inline constexpr std::array<int, Q> kOpposite = [] {
    std::array<int, Q> opp{};
    for (int a = 0; a < Q; ++a) {
        for (int b = 0; b < Q; ++b) {
            if (kCx[b] == -kCx[a] && kCy[b] == -kCy[a] && kCz[b] == -kCz[a]) {
                opp[a] = b;
            }
        }
    }
    return opp;
}();

struct LatticeSpec {
    double r = 1.0;   ///< dy/dx
    double s = 1.0;   ///< dz/dx
    double cs2 = 1.0 / 3.0;
    std::array<Vec3, Q> velocities{};
    std::array<int, Q> opposite{};
};

/// Builds the cuboid D3Q27 set. When cs2 is empty it is set to min(r^2, s^2)/3.
/// Throws InvalidParameter unless r, s > 0 and 0 < cs2 < min(1, r^2, s^2).
[[nodiscard]] LatticeSpec build_lattice(double r, double s, std::optional<double> cs2 = std::nullopt);

enum class Frame { raw, central };

struct MomentVector {
    std::array<double, Q> v{};
    Frame frame = Frame::raw;

    [[nodiscard]] double& operator[](int i) { return v[i]; }
    [[nodiscard]] double operator[](int i) const { return v[i]; }
    [[nodiscard]] double& at(int m, int n, int p) { return v[moment_index(m, n, p)]; }
    [[nodiscard]] double at(int m, int n, int p) const { return v[moment_index(m, n, p)]; }
};

/// m = P f with the cubic basis (unit velocity components).
[[nodiscard]] MomentVector distributions_to_raw_cubic(std::span<const double, Q> f);

/// Multiplies (forward) or divides (inverse) moment (m,n,p) by r^n s^p.
[[nodiscard]] MomentVector scale_raw(const MomentVector& m, const LatticeSpec& spec, bool forward);

/// f = P^-1 m for cubic-basis raw moments.
[[nodiscard]] Populations raw_to_distributions(const MomentVector& m);

} // namespace clbm
