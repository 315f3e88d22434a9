#include "clbm/lattice.hpp"

#include "clbm/detail/kernel.hpp"
#include "clbm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace clbm {

LatticeSpec build_lattice(double r, double s, std::optional<double> cs2) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidParameter("r > 0 violated");
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidParameter("s > 0 violated");
    const double cap = std::min({1.0, r * r, s * s});
    LatticeSpec spec;
    spec.r = r;
    spec.s = s;
    if (cs2) {
        if (!(*cs2 > 0.0) || !(*cs2 < cap)) {
            std::ostringstream os;
            os << "0 < cs2 < min(1, r^2, s^2) violated: cs2 = " << *cs2 << ", bound = " << cap;
            throw InvalidParameter(os.str());
        }
        spec.cs2 = *cs2;
    } else {
        spec.cs2 = std::min(r * r, s * s) / 3.0;
    }
    for (int a = 0; a < Q; ++a) {
        spec.velocities[a] = {static_cast<double>(kCx[a]), r * kCy[a], s * kCz[a]};
        spec.opposite[a] = kOpposite[a];
    }
    return spec;
}

MomentVector distributions_to_raw_cubic(std::span<const double, Q> f) {
    double t[Q];
    for (int a = 0; a < Q; ++a) t[detail::kDirToTensor[a]] = f[a];
    detail::forward_moments(t, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0);
    MomentVector m;
    m.frame = Frame::raw;
    for (int i = 0; i < Q; ++i) m.v[i] = t[detail::kCanonToTensor[i]];
    return m;
}

MomentVector scale_raw(const MomentVector& m, const LatticeSpec& spec, bool forward) {
    if (m.frame != Frame::raw) throw InvalidParameter("scale_raw expects raw moments");
    MomentVector out = m;
    const double rp[3] = {1.0, spec.r, spec.r * spec.r};
    const double sp[3] = {1.0, spec.s, spec.s * spec.s};
    for (int i = 0; i < Q; ++i) {
        const double f = rp[kMomentOrder[i].n] * sp[kMomentOrder[i].p];
        out.v[i] = forward ? m.v[i] * f : m.v[i] / f;
    }
    return out;
}

Populations raw_to_distributions(const MomentVector& m) {
    if (m.frame != Frame::raw) throw InvalidParameter("raw_to_distributions expects raw moments");
    double t[Q];
    for (int i = 0; i < Q; ++i) t[detail::kCanonToTensor[i]] = m.v[i];
    detail::inverse_moments(t, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0);
    Populations f{};
    for (int a = 0; a < Q; ++a) f[a] = t[detail::kDirToTensor[a]];
    return f;
}

} // namespace clbm
