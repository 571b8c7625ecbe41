#pragma once

#include "homog/field.hpp"

namespace homog {

// Minimal radius r*: the smallest dyadic r >= 1 such that for every dyadic
// R in [r, L/4] the normalized mean-square oscillation of the corrector pair
// over the sup-norm ball B_R centered at the origin satisfies
//   (1/R^2) avg_{B_R} |(phi, sigma) - avg_{B_R}(phi, sigma)|^2 <= delta.
// Returns the L/4 sentinel when even R = L/4 fails. The caller is expected to
// feed fields from a large-cutoff corrector (T >= (L/4)^2).
int minimal_radius(const ScalarField& phi, const SkewField& sigma, double delta);

} // namespace homog
