#pragma once

#include "plmcl/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace plmcl {

// Shortest decimal form that round-trips a double exactly.
std::string format_real(Real value);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Flat `key = value` files. Blank lines and lines starting with '#' are
// ignored. Duplicate keys are a ConfigError.
std::map<std::string, std::string> parse_kv_text(const std::string& text,
                                                 const std::string& origin);
std::map<std::string, std::string> parse_kv_file(const std::string& path);

std::vector<std::string> split(const std::string& text, char sep);
std::string trim(const std::string& text);

Real parse_real(const std::string& value, const std::string& key);
long long parse_int(const std::string& value, const std::string& key);
bool parse_bool(const std::string& value, const std::string& key);

}  // namespace plmcl
