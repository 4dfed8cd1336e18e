#include "povmix/counts_io.hpp"

#include <charconv>
#include <fstream>

namespace povmix {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

std::vector<std::int64_t> parse_counts(std::istream& in, const std::string& source_name) {
    std::vector<std::int64_t> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string tok = trim(line);
        if (tok.empty()) {
            continue;
        }
        const auto where = source_name + ":" + std::to_string(line_no);
        if (tok.front() == '-') {
            throw CountsParseError(where + ": negative value '" + tok + "'");
        }
        std::int64_t value = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            throw CountsParseError(where + ": not a non-negative integer: '" + tok + "'");
        }
        out.push_back(value);
    }
    if (out.empty()) {
        throw CountsParseError(source_name + ": no observations");
    }
    return out;
}

std::vector<std::int64_t> read_counts_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw CountsParseError(path + ": cannot open for reading");
    }
    return parse_counts(in, path);
}

void write_counts_file(const std::string& path, std::span<const std::int64_t> ys) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(path + ": cannot open for writing");
    }
    for (const auto y : ys) {
        out << y << '\n';
    }
    if (!out) {
        throw std::runtime_error(path + ": write failed");
    }
}

}  // namespace povmix
