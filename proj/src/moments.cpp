#include "hfsub/moments.hpp"

#include <cmath>

#include "hfsub/errors.hpp"

namespace hfsub {

double gaussian_abs_moment(double q) {
    if (q < 0.0) fail(ErrorCode::NegativePower, "gaussian_abs_moment: q must be >= 0");
    // std::tgamma is a Lanczos-grade implementation (relative error well below 1e-12
    // over this range); validated against quadrature in the test suite.
    static const double inv_sqrt_pi = 0.564189583547756286948;
    return std::exp2(0.5 * q) * std::tgamma(0.5 * (q + 1.0)) * inv_sqrt_pi;
}

} // namespace hfsub
