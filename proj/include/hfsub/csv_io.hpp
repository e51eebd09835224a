#pragma once

#include <string>

#include "hfsub/series.hpp"

namespace hfsub {

struct IngestOptions {
    bool prices_are_log = false;   // column already holds log-prices
};

/// Reads a one- or two-column CSV (price, or timestamp,price) into log-prices.
/// A non-numeric first line is treated as a header. Timestamps must be
/// non-decreasing; duplicate timestamps collapse to the last tick. Raw prices
/// must be positive and are logged once at this boundary.
TickSeries ingest_csv(const std::string& path, const IngestOptions& opts = {});

struct ExportOptions {
    bool write_log_prices = false;
};

/// Writes index,price rows with round-trip-exact formatting.
void export_csv(const std::string& path, const TickSeries& series,
                const ExportOptions& opts = {});

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

} // namespace hfsub
