#pragma once

#include <vector>

namespace hfsub {

/// 1.06 * sd * n^{-1/5}.
double kde_bandwidth(const std::vector<double>& samples);

/// Gaussian kernel density on the given grid with the bandwidth rule above
/// (or an explicit bandwidth if h > 0).
std::vector<double> kde(const std::vector<double>& samples, const std::vector<double>& grid,
                        double h = 0.0);

/// Equally spaced grid [lo, hi] with `points` entries.
std::vector<double> linspace(double lo, double hi, std::size_t points);

} // namespace hfsub
