#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lecam {

/// Formats a double with enough digits to round-trip exactly, so CSV output
/// is bit-stable across runs and worker counts.
std::string csv_number(double value);
std::string csv_number(std::int64_t value);

/// Joins cells with commas; cells must not contain commas or newlines.
std::string csv_row(const std::vector<std::string>& cells);

/// Rows are preformatted lines without trailing newlines; serialization is
/// header + rows, each newline-terminated.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::string> rows;

    std::string serialize() const;
};

/// Writes content to path, replacing any existing file; throws on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace lecam
