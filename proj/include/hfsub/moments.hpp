#pragma once

namespace hfsub {

/// q-th absolute moment of a standard normal:
/// mu_q = E|Z|^q = 2^{q/2} Gamma((q+1)/2) / sqrt(pi), q >= 0.
double gaussian_abs_moment(double q);

} // namespace hfsub
