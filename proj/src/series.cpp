#include "hfsub/series.hpp"

#include <cmath>

namespace hfsub {

ReturnSeries log_returns(const TickSeries& prices) {
    if (prices.size() < 2)
        fail(ErrorCode::SeriesTooShort, "log_returns: need at least 2 observations");
    ReturnSeries out;
    out.values.resize(prices.size() - 1);
    for (std::size_t i = 0; i + 1 < prices.size(); ++i)
        out.values[i] = prices.values[i + 1] - prices.values[i];
    return out;
}

ReturnSeries scale_returns(const ReturnSeries& returns, std::size_t n) {
    if (n != returns.n())
        fail(ErrorCode::LengthMismatch, "scale_returns: n does not match series length");
    ReturnSeries out;
    out.values.resize(n);
    double s = std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) out.values[i] = s * returns.values[i];
    return out;
}

} // namespace hfsub
