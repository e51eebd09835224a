#include "hfsub/csv_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hfsub/errors.hpp"

namespace hfsub {

namespace {

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

} // namespace

TickSeries ingest_csv(const std::string& path, const IngestOptions& opts) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "ingest_csv: cannot open " + path);

    TickSeries out;
    std::vector<double> times;
    std::string line;
    std::size_t lineno = 0;
    bool have_time_col = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.back() == '\r') {
            while (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.empty()) continue;
        if (cells.size() > 2)
            fail(ErrorCode::ParseError,
                 "ingest_csv: line " + std::to_string(lineno) + ": expected 1 or 2 columns");

        double t = 0.0, p = 0.0;
        if (cells.size() == 2) {
            if (!parse_double(cells[0], t) || !parse_double(cells[1], p)) {
                if (lineno == 1) continue;   // header
                fail(ErrorCode::ParseError, "ingest_csv: line " + std::to_string(lineno));
            }
            have_time_col = true;
        } else {
            if (!parse_double(cells[0], p)) {
                if (lineno == 1) continue;
                fail(ErrorCode::ParseError, "ingest_csv: line " + std::to_string(lineno));
            }
        }
        if (!std::isfinite(p))
            fail(ErrorCode::ParseError, "ingest_csv: line " + std::to_string(lineno) + ": non-finite price");
        if (!opts.prices_are_log && p <= 0.0)
            fail(ErrorCode::NonPositivePrice,
                 "ingest_csv: line " + std::to_string(lineno) + ": price must be > 0");

        double logp = opts.prices_are_log ? p : std::log(p);
        if (have_time_col) {
            if (!times.empty() && t < times.back())
                fail(ErrorCode::NonMonotoneTime,
                     "ingest_csv: line " + std::to_string(lineno) + ": timestamps must be non-decreasing");
            if (!times.empty() && t == times.back()) {
                out.values.back() = logp;   // last tick wins
                continue;
            }
            times.push_back(t);
        }
        out.values.push_back(logp);
    }
    if (out.size() < 2) fail(ErrorCode::SeriesTooShort, "ingest_csv: need at least 2 prices");
    return out;
}

std::string format_double(double x) {
    char buf[40];
    // 17 significant digits: parses back to the identical double.
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void export_csv(const std::string& path, const TickSeries& series, const ExportOptions& opts) {
    std::ofstream outf(path);
    if (!outf) fail(ErrorCode::ParseError, "export_csv: cannot open " + path + " for writing");
    for (std::size_t i = 0; i < series.size(); ++i) {
        double v = opts.write_log_prices ? series.values[i] : std::exp(series.values[i]);
        outf << i << ',' << format_double(v) << '\n';
    }
}

} // namespace hfsub
