#pragma once

#include "clbm/lattice.hpp"

namespace clbm {

struct FrameVelocity {
    double ux = 0.0;
    double uy = 0.0;
    double uz = 0.0;
};

/// Binomial shift of raw moments into the frame moving with u.
[[nodiscard]] MomentVector raw_to_central(const MomentVector& m, const FrameVelocity& u);

/// Inverse shift: the same expansion evaluated at -u.
[[nodiscard]] MomentVector central_to_raw(const MomentVector& mc, const FrameVelocity& u);

} // namespace clbm
