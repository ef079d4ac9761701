#include "manifest.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "ordreg/errors.hpp"

namespace ordreg::cli {

void Manifest::set(const std::string& key, const std::string& value) {
    for (auto& entry : entries_) {
        if (entry.first == key) {
            entry.second = value;
            return;
        }
    }
    entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, std::uint64_t value) {
    set(key, std::to_string(value));
}

void Manifest::set(const std::string& key, std::int64_t value) {
    set(key, std::to_string(value));
}

void Manifest::set(const std::string& key, double value) {
    set(key, format_value(value));
}

bool Manifest::has(const std::string& key) const {
    for (const auto& entry : entries_) {
        if (entry.first == key) {
            return true;
        }
    }
    return false;
}

const std::string& Manifest::get(const std::string& key) const {
    for (const auto& entry : entries_) {
        if (entry.first == key) {
            return entry.second;
        }
    }
    throw ParseError("manifest is missing key '" + key + "'");
}

std::uint64_t Manifest::get_u64(const std::string& key) const {
    const std::string& raw = get(key);
    errno = 0;
    char* end = nullptr;
    const std::uint64_t value = std::strtoull(raw.c_str(), &end, 10);
    if (errno != 0 || end != raw.c_str() + raw.size() || raw.empty()) {
        throw ParseError("manifest key '" + key +
                         "' is not an unsigned integer: '" + raw + "'");
    }
    return value;
}

std::int64_t Manifest::get_i64(const std::string& key) const {
    const std::string& raw = get(key);
    errno = 0;
    char* end = nullptr;
    const std::int64_t value = std::strtoll(raw.c_str(), &end, 10);
    if (errno != 0 || end != raw.c_str() + raw.size() || raw.empty()) {
        throw ParseError("manifest key '" + key + "' is not an integer: '" +
                         raw + "'");
    }
    return value;
}

double Manifest::get_double(const std::string& key) const {
    const std::string& raw = get(key);
    char* end = nullptr;
    const double value = std::strtod(raw.c_str(), &end);
    if (raw.empty() || end != raw.c_str() + raw.size() ||
        !std::isfinite(value)) {
        throw ParseError("manifest key '" + key +
                         "' is not a finite decimal: '" + raw + "'");
    }
    return value;
}

Manifest Manifest::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path + ":0:0: cannot open manifest");
    }
    Manifest manifest;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ":1: expected key=value");
        }
        manifest.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return manifest;
}

std::string Manifest::serialize() const {
    std::ostringstream out;
    for (const auto& entry : entries_) {
        out << entry.first << '=' << entry.second << '\n';
    }
    return out.str();
}

void Manifest::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParseError(path + ":0:0: cannot open manifest for writing");
    }
    out << serialize();
    if (!out) {
        throw ParseError(path + ":0:0: write failed");
    }
}

std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path + ":0:0: cannot open file for digesting");
    }
    std::uint64_t hash = 14695981039346656037ULL;
    char buffer[4096];
    for (;;) {
        in.read(buffer, sizeof(buffer));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 1099511628211ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof(buffer))) {
            break;
        }
    }
    char rendered[32];
    std::snprintf(rendered, sizeof(rendered), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(hash));
    return rendered;
}

} // namespace ordreg::cli
