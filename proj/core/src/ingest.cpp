#include "amodelay/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "amodelay/csv.hpp"
#include "amodelay/errors.hpp"

namespace amodelay {

namespace {

bool parse_number(std::string_view tok, double& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t b = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > b) out.push_back(line.substr(b, i - b));
    }
    return out;
}

bool is_sentinel(double v, double sentinel) { return std::abs(v - sentinel) <= 1e-9 * std::max(1.0, std::abs(sentinel)); }

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << "line " << line << ": " << what;
    throw ConfigError(os.str());
}

}  // namespace

std::size_t IndexSeries::valid_count() const {
    std::size_t n = 0;
    for (const IndexRecord& r : records) n += r.masked ? 0 : 1;
    return n;
}

double IndexSeries::time(std::size_t i) const {
    return records[i].year + (records[i].month - 0.5) / 12.0;
}

IndexSeries parse_index(std::string_view text, double sentinel) {
    IndexSeries s;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        const auto tok = tokens(line);
        if (tok.empty()) continue;
        std::vector<double> vals;
        double v = 0.0;
        if (!parse_number(tok[0], v)) continue;  // metadata
        for (const auto t : tok) {
            if (!parse_number(t, v)) fail(line_no, "non-numeric token '" + std::string(t) + "'");
            vals.push_back(v);
        }
        if (vals.size() == 1 && is_sentinel(vals[0], sentinel)) continue;
        if (vals.size() == 2 && s.empty() && vals[0] == std::floor(vals[0]) &&
            vals[1] == std::floor(vals[1]))
            continue;  // year-range header
        if (vals.size() != 13) {
            std::ostringstream os;
            os << "expected year and 12 monthly values, found " << vals.size() << " tokens";
            fail(line_no, os.str());
        }
        if (vals[0] != std::floor(vals[0])) fail(line_no, "year is not an integer");
        const int year = static_cast<int>(vals[0]);
        if (!s.empty() && year <= s.records.back().year) {
            std::ostringstream os;
            os << (year == s.records.back().year ? "duplicate" : "non-increasing") << " year " << year;
            fail(line_no, os.str());
        }
        for (int m = 1; m <= 12; ++m) {
            const double x = vals[static_cast<std::size_t>(m)];
            const bool masked = is_sentinel(x, sentinel);
            if (!masked && !std::isfinite(x)) fail(line_no, "non-finite value");
            s.records.push_back({year, m, masked ? 0.0 : x, masked});
        }
    }
    return s;
}

IndexSeries load_index(const std::string& path, double sentinel) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_index(ss.str(), sentinel);
}

std::string emit_index(const IndexSeries& s, double sentinel) {
    std::string out;
    std::size_t i = 0;
    while (i < s.records.size()) {
        const int year = s.records[i].year;
        std::vector<std::string> cells(12, format_double(sentinel));
        for (; i < s.records.size() && s.records[i].year == year; ++i) {
            const IndexRecord& r = s.records[i];
            if (r.month < 1 || r.month > 12) throw ConfigError("month out of range");
            if (!r.masked) cells[static_cast<std::size_t>(r.month - 1)] = format_double(r.value);
        }
        out += std::to_string(year);
        for (const auto& c : cells) out += ' ' + c;
        out += '\n';
    }
    return out;
}

IndexSeries running_mean(const IndexSeries& s, std::size_t window) {
    if (s.empty()) throw ConfigError("running_mean needs a non-empty series");
    if (window < 1) throw ConfigError("window must be at least 1");
    const auto n = static_cast<long long>(s.size());
    const auto w = static_cast<long long>(window);
    const long long lo = -(w / 2), hi = w - 1 - w / 2;
    IndexSeries out = s;
    for (long long i = 0; i < n; ++i) {
        double sum = 0.0;
        long long cnt = 0;
        for (long long j = std::max(0LL, i + lo); j <= std::min(n - 1, i + hi); ++j) {
            const IndexRecord& r = s.records[static_cast<std::size_t>(j)];
            if (r.masked) continue;
            sum += r.value;
            ++cnt;
        }
        IndexRecord& o = out.records[static_cast<std::size_t>(i)];
        o.masked = cnt == 0 || 2 * cnt < w;
        o.value = o.masked ? 0.0 : sum / static_cast<double>(cnt);
    }
    return out;
}

std::vector<double> longest_valid_run(const IndexSeries& s) {
    std::size_t best_b = 0, best_n = 0, b = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s.records[i].masked) {
            if (i - b > best_n) {
                best_n = i - b;
                best_b = b;
            }
            b = i + 1;
        }
    }
    std::vector<double> out;
    for (std::size_t i = best_b; i < best_b + best_n; ++i) out.push_back(s.records[i].value);
    return out;
}

void write_index_csv(const IndexSeries& raw, const IndexSeries& smoothed, const std::string& path) {
    if (raw.size() != smoothed.size()) throw ConfigError("raw and smoothed series differ in length");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CsvWriter w(path, {"year", "month", "value", "smoothed"});
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const IndexRecord& r = raw.records[i];
        const IndexRecord& m = smoothed.records[i];
        w.row({static_cast<double>(r.year), static_cast<double>(r.month), r.masked ? nan : r.value,
               m.masked ? nan : m.value});
    }
}

}  // namespace amodelay
