#pragma once

// Minimal `key = value` text format used for parameter and run config files.
// '#' starts a comment; blank lines are ignored; keys are case-sensitive.

#include <map>
#include <string>
#include <string_view>

namespace mendel {

using KeyValues = std::map<std::string, std::string, std::less<>>;

/// Throws ConfigError on malformed lines or duplicate keys.
KeyValues parse_key_values(std::string_view text);

double parse_double(std::string_view key, std::string_view value);
long long parse_integer(std::string_view key, std::string_view value);

/// Shortest round-trippable decimal form (17 significant digits).
std::string format_double(double value);

}  // namespace mendel
