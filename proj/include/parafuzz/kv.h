#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace parafuzz {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Splits flat `key = value` text into ordered pairs. Blank lines and lines
/// starting with '#' are skipped; keys and values are trimmed. Duplicate keys
/// are an error.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

}  // namespace parafuzz
