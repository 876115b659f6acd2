#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace molres {

/// Shortest round-trip decimal rendering of a double (via std::to_chars).
std::string format_double(double v);

std::string join_csv(const std::vector<std::string>& cells);

/// A parsed CSV file: '#'-prefixed lines collect into `comments`, the first
/// non-comment line is the header, the rest are rows.
struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const; // -1 when absent
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

} // namespace molres
