#pragma once

#include <cstdint>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace povmix {

class CountsParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Counts file format: one non-negative integer per line; blank lines and
// '#' comments are ignored. Errors carry the 1-based line number; a file
// with no observations is an error.
std::vector<std::int64_t> parse_counts(std::istream& in, const std::string& source_name);
std::vector<std::int64_t> read_counts_file(const std::string& path);
void write_counts_file(const std::string& path, std::span<const std::int64_t> ys);

}  // namespace povmix
