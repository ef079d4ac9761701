#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ordreg::cli {

// Flat key=value run record written alongside every command output.
// Keys keep insertion order so serialization is byte-stable; values are
// raw single-line strings (everything after the first '=').
class Manifest {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, std::uint64_t value);
    void set(const std::string& key, std::int64_t value);
    void set(const std::string& key, double value);

    bool has(const std::string& key) const;
    // Throws ParseError when the key is absent.
    const std::string& get(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::int64_t get_i64(const std::string& key) const;
    double get_double(const std::string& key) const;

    static Manifest load(const std::string& path);
    void save(const std::string& path) const;
    std::string serialize() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

// FNV-1a 64-bit digest of a file's bytes, rendered "fnv1a64:<16 hex>".
// Throws ParseError when the file cannot be read.
std::string digest_file(const std::string& path);

} // namespace ordreg::cli
