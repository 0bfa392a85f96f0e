#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace amodelay {

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Minimal CSV writer with a fixed header. Throws ConfigError when the file
/// cannot be opened.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::vector<std::string> header);

    void row(std::initializer_list<double> values);
    void row(const std::vector<double>& values);
    /// Numeric columns followed by one trailing text column.
    void row(const std::vector<double>& values, const std::string& tail);

private:
    std::ofstream out_;
    std::size_t columns_;
};

}  // namespace amodelay
