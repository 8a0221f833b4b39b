#include "lecam/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lecam {

std::string csv_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string csv_number(std::int64_t value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(value));
    return buf;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].find_first_of(",\n") != std::string::npos) {
            throw std::invalid_argument("csv_row: cell contains a comma or newline");
        }
        if (i > 0) {
            row += ',';
        }
        row += cells[i];
    }
    return row;
}

std::string CsvTable::serialize() const {
    std::string out = csv_row(header);
    out += '\n';
    for (const std::string& row : rows) {
        out += row;
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("write_text_file: cannot open '" + path + "'");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write_text_file: write failed for '" + path + "'");
    }
}

}  // namespace lecam
