#include "nlch/csv.hpp"

#include "nlch/conv_operator.hpp"  // FormatError

#include <charconv>
#include <fstream>
#include <sstream>

namespace nlch {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw FormatError("parse_double: malformed value '" + s + "'");
    return v;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(const std::vector<double>& row) {
    if (row.size() != header_.size())
        throw FormatError("CsvWriter: row width does not match the header");
    rows_.push_back(row);
}

std::string CsvWriter::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header_.size(); ++i)
        os << (i ? "," : "") << header_[i];
    os << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_double(row[i]);
        os << '\n';
    }
    return os.str();
}

void CsvWriter::write(const std::string& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os)
        throw FormatError("CsvWriter: cannot open " + path);
    os << str();
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw FormatError("read_csv: cannot open " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::size_t pos = 0;
        while (true) {
            const std::size_t c = line.find(',', pos);
            cells.push_back(line.substr(pos, c == std::string::npos ? c : c - pos));
            if (c == std::string::npos)
                break;
            pos = c + 1;
        }
        if (first) {
            table.header = cells;
            first = false;
        } else {
            std::vector<double> row;
            row.reserve(cells.size());
            for (const auto& cell : cells)
                row.push_back(parse_double(cell));
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

}  // namespace nlch
