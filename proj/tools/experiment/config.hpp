/**
 * @file config.hpp
 * @brief Line-oriented experiment configuration files.
 *
 * Grammar (one construct per line, surrounding whitespace ignored):
 *
 *   # comment                 full-line comment ('#' or ';')
 *   [section]                 starts a section; names are [a-z0-9_-]+
 *   key = value               key is [A-Za-z0-9_.-]+, value runs to end of line
 *                             (a ' #' sequence starts a trailing comment)
 *
 * Keys must be unique within a section. Lists are comma separated; integer
 * ranges may be written a..b. Every key must be consumed by the subcommand,
 * so typos surface as errors instead of silently falling back to defaults.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathwise::experiment {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, int line, std::string field, const std::string& message);

    const std::string& source() const { return source_; }
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    std::string source_;
    int line_;
    std::string field_;
};

class Config {
public:
    static Config parse(const std::string& text, const std::string& source = "<config>");
    static Config load(const std::filesystem::path& file);

    const std::string& text() const { return text_; }
    const std::string& source() const { return source_; }
    /// FNV-1a 64-bit hash of the raw file bytes, as 16 hex digits.
    std::string hash() const;

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::optional<std::string>& fallback = std::nullopt) const;
    double get_double(const std::string& section, const std::string& key,
                      const std::optional<double>& fallback = std::nullopt) const;
    int get_int(const std::string& section, const std::string& key,
                const std::optional<int>& fallback = std::nullopt) const;
    bool get_bool(const std::string& section, const std::string& key,
                  const std::optional<bool>& fallback = std::nullopt) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                    const std::optional<std::vector<double>>& fallback = std::nullopt) const;
    std::vector<std::string> get_strings(const std::string& section, const std::string& key,
                                         const std::optional<std::vector<std::string>>& fallback = std::nullopt) const;
    /// Comma-separated unsigned integers and a..b ranges.
    std::vector<std::uint64_t> get_seeds(const std::string& section, const std::string& key,
                                         const std::optional<std::vector<std::uint64_t>>& fallback = std::nullopt) const;

    /// Raises a ParseError for a value that parsed but is out of range.
    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& message) const;

    /// Throws ParseError naming the first key (in file order) nobody read.
    void check_all_used() const;

private:
    struct Entry {
        std::string value;
        int line;
        mutable bool used = false;
    };

    const Entry* find(const std::string& section, const std::string& key) const;
    std::string field(const std::string& section, const std::string& key) const;

    std::string text_;
    std::string source_;
    std::map<std::pair<std::string, std::string>, Entry> entries_;
};

}  // namespace pathwise::experiment
