#include "csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ordreg::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && (s[begin] == ' ' || s[begin] == '\t')) {
        ++begin;
    }
    while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t' ||
                           s[end - 1] == '\r')) {
        --end;
    }
    return s.substr(begin, end - begin);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> tokens;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            tokens.push_back(trim(line.substr(start)));
            break;
        }
        tokens.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return tokens;
}

bool parse_finite(const std::string& token, double& value) {
    if (token.empty()) {
        return false;
    }
    const char* begin = token.c_str();
    char* end = nullptr;
    value = std::strtod(begin, &end);
    return end == begin + token.size() && std::isfinite(value);
}

[[noreturn]] void fail(const std::string& path, std::size_t line,
                       std::size_t column, const std::string& what) {
    throw ParseError(path + ":" + std::to_string(line) + ":" +
                     std::to_string(column) + ": " + what);
}

} // namespace

CsvMatrix read_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path + ":0:0: cannot open file");
    }

    CsvMatrix out;
    std::vector<std::vector<double>> rows;
    std::size_t columns = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            if (in.peek() == std::ifstream::traits_type::eof()) {
                break; // trailing blank line
            }
            fail(path, line_no, 1, "blank line inside table");
        }
        const std::vector<std::string> tokens = split_line(line);
        std::vector<double> row(tokens.size());
        bool numeric = true;
        std::size_t bad_column = 0;
        for (std::size_t c = 0; c < tokens.size(); ++c) {
            if (!parse_finite(tokens[c], row[c])) {
                numeric = false;
                bad_column = c + 1;
                break;
            }
        }
        if (!numeric) {
            if (line_no == 1) {
                out.had_header = true;
                out.header = tokens;
                columns = tokens.size();
                continue;
            }
            fail(path, line_no, bad_column,
                 "expected a finite decimal literal, got '" +
                     tokens[bad_column - 1] + "'");
        }
        if (columns == 0) {
            columns = tokens.size();
        } else if (tokens.size() != columns) {
            fail(path, line_no, 1,
                 "row has " + std::to_string(tokens.size()) +
                     " columns, expected " + std::to_string(columns));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        fail(path, line_no, 1, "no data rows");
    }

    out.values.resize(static_cast<Index>(rows.size()),
                      static_cast<Index>(columns));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < columns; ++j) {
            out.values(static_cast<Index>(i), static_cast<Index>(j)) =
                rows[i][j];
        }
    }
    return out;
}

std::string format_value(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_matrix(std::ostream& out, const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_value(m(i, j));
        }
        out << '\n';
    }
}

void write_matrix(const std::string& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParseError(path + ":0:0: cannot open file for writing");
    }
    write_matrix(out, m);
    if (!out) {
        throw ParseError(path + ":0:0: write failed");
    }
}

} // namespace ordreg::cli
