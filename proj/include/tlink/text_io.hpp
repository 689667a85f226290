#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tlink::io {

/// Error carrying the offending file and 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Splits on commas, spaces and tabs; empty fields are dropped.
inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ',' || line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ',' && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

inline bool parse_int(std::string_view s, long long& out) {
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

/// Accepts decimal, hex-float and the literal NaN token.
inline bool parse_double(std::string_view s, double& out) {
    if (s == "NaN" || s == "nan") {
        out = std::nan("");
        return true;
    }
    const std::string tmp{s};
    char* end = nullptr;
    out = std::strtod(tmp.c_str(), &end);
    return end == tmp.c_str() + tmp.size() && !tmp.empty();
}

/// Shortest form that round-trips; missing values print as NaN.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "NaN";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return in;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

/// Reads "key=value" (or "key value") lines; '#' starts a comment.
inline std::map<std::string, std::string> read_key_values(const std::string& path) {
    auto in = open_in(path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto sep = line.find_first_of("= \t", first);
        if (sep == std::string::npos) throw ParseError(path, lineno, "expected key=value");
        std::string key = line.substr(first, sep - first);
        auto vstart = line.find_first_not_of("= \t", sep);
        auto vend = line.find_last_not_of(" \t\r");
        std::string value = vstart == std::string::npos || vstart > vend ? "" : line.substr(vstart, vend - vstart + 1);
        kv[key] = value;
    }
    return kv;
}

inline void write_key_values(const std::string& path, const std::vector<std::pair<std::string, std::string>>& kv) {
    auto out = open_out(path);
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace tlink::io
