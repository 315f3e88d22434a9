#include "clbm/central_moments.hpp"

#include "clbm/detail/kernel.hpp"
#include "clbm/errors.hpp"

namespace clbm {

MomentVector raw_to_central(const MomentVector& m, const FrameVelocity& u) {
    if (m.frame != Frame::raw) throw InvalidParameter("raw_to_central expects raw moments");
    double t[Q];
    for (int i = 0; i < Q; ++i) t[detail::kCanonToTensor[i]] = m.v[i];
    detail::shift_moments(t, u.ux, u.uy, u.uz);
    MomentVector out;
    out.frame = Frame::central;
    for (int i = 0; i < Q; ++i) out.v[i] = t[detail::kCanonToTensor[i]];
    return out;
}

MomentVector central_to_raw(const MomentVector& mc, const FrameVelocity& u) {
    if (mc.frame != Frame::central) throw InvalidParameter("central_to_raw expects central moments");
    double t[Q];
    for (int i = 0; i < Q; ++i) t[detail::kCanonToTensor[i]] = mc.v[i];
    detail::unshift_moments(t, u.ux, u.uy, u.uz);
    MomentVector out;
    out.frame = Frame::raw;
    for (int i = 0; i < Q; ++i) out.v[i] = t[detail::kCanonToTensor[i]];
    return out;
}

} // namespace clbm
