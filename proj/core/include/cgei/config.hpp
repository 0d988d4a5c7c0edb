#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace cgei {

/// Flat `key = value` configuration. '#' starts a comment; blank lines are
/// ignored; later assignments override earlier ones.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);

/// Splits "a,b, c" into trimmed, nonempty items.
std::vector<std::string> split_list(const std::string& text);

std::string trim(const std::string& text);

/// Strict numeric parsing; the whole string must be consumed.
double parse_double(const std::string& key, const std::string& text);
long long parse_integer(const std::string& key, const std::string& text);
bool parse_bool(const std::string& key, const std::string& text);

}  // namespace cgei
