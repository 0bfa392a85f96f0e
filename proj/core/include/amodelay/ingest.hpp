#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace amodelay {

inline constexpr double kIndexSentinel = -99.99;

struct IndexRecord {
    int year = 0;
    int month = 0;  ///< 1..12
    double value = 0.0;
    bool masked = false;

    bool operator==(const IndexRecord&) const = default;
};

/// Monthly index values in strictly increasing (year, month) order.
struct IndexSeries {
    std::vector<IndexRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
    std::size_t valid_count() const;
    /// Decimal time of record i, centred in its month.
    double time(std::size_t i) const;

    bool operator==(const IndexSeries&) const = default;
};

/// Parses rows of `year v1 ... v12`. Lines whose first token is not numeric
/// are skipped, as are a two-integer year-range header and a lone sentinel
/// line (the NOAA layout). Values equal to `sentinel` are masked. Throws
/// ConfigError naming the line for malformed rows or out-of-order years.
IndexSeries parse_index(std::string_view text, double sentinel = kIndexSentinel);
IndexSeries load_index(const std::string& path, double sentinel = kIndexSentinel);

/// Inverse of parse_index for whole years; masked or absent months are
/// written as the sentinel. Values round-trip exactly.
std::string emit_index(const IndexSeries& s, double sentinel = kIndexSentinel);

/// Centred moving average over `window` months (offsets -window/2 ..
/// window-1-window/2). Masked inputs are ignored; outputs with fewer than
/// window/2 valid inputs (or none) are masked.
IndexSeries running_mean(const IndexSeries& s, std::size_t window = 12);

/// Values of the longest run of consecutive unmasked records.
std::vector<double> longest_valid_run(const IndexSeries& s);

/// CSV `year,month,value,smoothed`, masked entries written as nan.
void write_index_csv(const IndexSeries& raw, const IndexSeries& smoothed, const std::string& path);

}  // namespace amodelay
