#pragma once

#include <cstddef>
#include <vector>

#include "hfsub/errors.hpp"

namespace hfsub {

/// Ordered log-prices on the implied equidistant grid t_i = i/n, i = 0..n.
/// No timestamps are stored; ingestion rejects non-equidistant data.
struct TickSeries {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Log-return increments of a TickSeries; n = values.size().
struct ReturnSeries {
    std::vector<double> values;

    std::size_t n() const { return values.size(); }
};

/// returns[i] = prices[i+1] - prices[i].
ReturnSeries log_returns(const TickSeries& prices);

/// Elementwise sqrt(n) scaling; n must equal the series length.
ReturnSeries scale_returns(const ReturnSeries& returns, std::size_t n);

} // namespace hfsub
