#include "hfsub/kde.hpp"

#include <cmath>

#include "hfsub/errors.hpp"

namespace hfsub {

double kde_bandwidth(const std::vector<double>& samples) {
    std::size_t n = samples.size();
    if (n < 2) fail(ErrorCode::TooFewSamples, "kde_bandwidth: need at least 2 samples");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
}

std::vector<double> kde(const std::vector<double>& samples, const std::vector<double>& grid,
                        double h) {
    if (samples.size() < 2) fail(ErrorCode::TooFewSamples, "kde: need at least 2 samples");
    if (h <= 0.0) h = kde_bandwidth(samples);
    const double norm = 1.0 / (std::sqrt(2.0 * M_PI) * h * static_cast<double>(samples.size()));
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double acc = 0.0;
        for (double x : samples) {
            double z = (grid[g] - x) / h;
            acc += std::exp(-0.5 * z * z);
        }
        out[g] = norm * acc;
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
    std::vector<double> out(points);
    if (points == 1) {
        out[0] = lo;
        return out;
    }
    double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) out[i] = lo + step * static_cast<double>(i);
    return out;
}

} // namespace hfsub
