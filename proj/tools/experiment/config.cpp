#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pathwise::experiment {

ParseError::ParseError(std::string source, int line, std::string field, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " +
                         (field.empty() ? "" : "'" + field + "': ") + message),
      source_(std::move(source)),
      line_(line),
      field_(std::move(field)) {}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Section names are lowercase; keys may also use capitals (N, M, T).
bool valid_name(const std::string& s, bool is_key) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [&](char c) {
        const auto u = static_cast<unsigned char>(c);
        return std::islower(u) || std::isdigit(u) || c == '_' || c == '-' ||
               (is_key && (c == '.' || std::isupper(u)));
    });
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

template <class T>
bool parse_number(const std::string& s, T& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (b != e && *b == '+') ++b;
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& source) {
    Config cfg;
    cfg.text_ = text;
    cfg.source_ = source;
    std::stringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError(source, line, "", "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (!valid_name(section, false)) {
                throw ParseError(source, line, section, "invalid section name");
            }
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError(source, line, "", "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        std::string value = s.substr(eq + 1);
        if (const auto hash = value.find(" #"); hash != std::string::npos) value = value.substr(0, hash);
        value = trim(value);
        if (!valid_name(key, true)) throw ParseError(source, line, key, "invalid key name");
        if (section.empty()) throw ParseError(source, line, key, "key outside of any [section]");
        if (value.empty()) throw ParseError(source, line, section + "." + key, "empty value");
        const auto [it, inserted] = cfg.entries_.emplace(std::make_pair(section, key), Entry{value, line});
        if (!inserted) {
            throw ParseError(source, line, section + "." + key,
                             "duplicate key (first set on line " + std::to_string(it->second.line) + ")");
        }
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ParseError(file.string(), 0, "", "cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), file.string());
}

std::string Config::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text_) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
    const auto it = entries_.find({section, key});
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
}

std::string Config::field(const std::string& section, const std::string& key) const {
    return section + "." + key;
}

bool Config::has(const std::string& section, const std::string& key) const {
    return entries_.count({section, key}) > 0;
}

void Config::fail(const std::string& section, const std::string& key, const std::string& message) const {
    const auto it = entries_.find({section, key});
    throw ParseError(source_, it == entries_.end() ? 0 : it->second.line, field(section, key), message);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::optional<std::string>& fallback) const {
    if (const Entry* e = find(section, key)) return e->value;
    if (fallback) return *fallback;
    throw ParseError(source_, 0, field(section, key), "required key is missing");
}

double Config::get_double(const std::string& section, const std::string& key,
                          const std::optional<double>& fallback) const {
    const Entry* e = find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        throw ParseError(source_, 0, field(section, key), "required key is missing");
    }
    double v;
    if (!parse_number(e->value, v)) {
        throw ParseError(source_, e->line, field(section, key), "expected a number, got '" + e->value + "'");
    }
    return v;
}

int Config::get_int(const std::string& section, const std::string& key,
                    const std::optional<int>& fallback) const {
    const Entry* e = find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        throw ParseError(source_, 0, field(section, key), "required key is missing");
    }
    int v;
    if (!parse_number(e->value, v)) {
        throw ParseError(source_, e->line, field(section, key), "expected an integer, got '" + e->value + "'");
    }
    return v;
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      const std::optional<bool>& fallback) const {
    const Entry* e = find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        throw ParseError(source_, 0, field(section, key), "required key is missing");
    }
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    throw ParseError(source_, e->line, field(section, key), "expected true or false, got '" + e->value + "'");
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::optional<std::vector<double>>& fallback) const {
    const Entry* e = find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        throw ParseError(source_, 0, field(section, key), "required key is missing");
    }
    std::vector<double> out;
    for (const auto& item : split_list(e->value)) {
        double v;
        if (!parse_number(item, v)) {
            throw ParseError(source_, e->line, field(section, key), "expected a number list, got '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> Config::get_strings(const std::string& section, const std::string& key,
                                             const std::optional<std::vector<std::string>>& fallback) const {
    const Entry* e = find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        throw ParseError(source_, 0, field(section, key), "required key is missing");
    }
    auto items = split_list(e->value);
    for (const auto& item : items) {
        if (item.empty()) throw ParseError(source_, e->line, field(section, key), "empty list item");
    }
    return items;
}

std::vector<std::uint64_t> Config::get_seeds(const std::string& section, const std::string& key,
                                             const std::optional<std::vector<std::uint64_t>>& fallback) const {
    const Entry* e = find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        throw ParseError(source_, 0, field(section, key), "required key is missing");
    }
    std::vector<std::uint64_t> out;
    for (const auto& item : split_list(e->value)) {
        const auto dots = item.find("..");
        std::uint64_t a, b;
        if (dots != std::string::npos) {
            if (!parse_number(trim(item.substr(0, dots)), a) || !parse_number(trim(item.substr(dots + 2)), b) || b < a) {
                throw ParseError(source_, e->line, field(section, key), "bad seed range '" + item + "'");
            }
            for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
        } else {
            if (!parse_number(item, a)) {
                throw ParseError(source_, e->line, field(section, key), "bad seed '" + item + "'");
            }
            out.push_back(a);
        }
    }
    return out;
}

void Config::check_all_used() const {
    const Entry* first = nullptr;
    std::string name;
    for (const auto& [k, e] : entries_) {
        if (!e.used && (!first || e.line < first->line)) {
            first = &e;
            name = k.first + "." + k.second;
        }
    }
    if (first) throw ParseError(source_, first->line, name, "unknown key for this subcommand");
}

}  // namespace pathwise::experiment
