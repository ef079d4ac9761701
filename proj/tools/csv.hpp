#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ordreg/core.hpp"

namespace ordreg::cli {

// A parsed dense CSV matrix. `header` holds the column names when the
// first line failed numeric parsing and was treated as a header.
struct CsvMatrix {
    Matrix values;
    bool had_header = false;
    std::vector<std::string> header;
};

// Reads a dense CSV matrix: one row per line, comma-separated finite
// decimal literals, optional single header line (auto-detected: a first
// line with any token that does not parse as a finite number). Throws
// ParseError with file:line:column on malformed input, ragged rows, or an
// empty table.
CsvMatrix read_matrix(const std::string& path);

// Full-precision decimal rendering (17 significant digits), enough to
// reproduce the double exactly on re-read.
std::string format_value(double value);

void write_matrix(std::ostream& out, const Matrix& m);
void write_matrix(const std::string& path, const Matrix& m);

} // namespace ordreg::cli
