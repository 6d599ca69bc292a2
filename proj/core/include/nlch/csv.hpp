#pragma once

#include <string>
#include <vector>

namespace nlch {

/// Shortest round-trip decimal representation of a double (to_chars).
std::string format_double(double v);

/// Parse a double back; throws FormatError on malformed input.
double parse_double(const std::string& s);

/// Minimal CSV table with full-precision float cells. Every file written by
/// the tool re-parses to bitwise-identical values.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(const std::vector<double>& row);
    void write(const std::string& path) const;
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);

}  // namespace nlch
