#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace spdelab {

/// Plain-text `key = value` document with optional `[section]` headers.
/// Keys before the first header land in section "". `#` starts a comment.
struct KeyValueDocument {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  /// Throws ValidationError when missing.
  const std::string& get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
};

KeyValueDocument parse_key_value(std::string_view text);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Real number; also accepts `inf`, `-inf` and rationals `p/q`.
double parse_real(std::string_view s);
long long parse_integer(std::string_view s);
/// Comma-separated reals.
std::vector<double> parse_real_list(std::string_view s);

std::string read_text_file(const std::string& path);

}  // namespace spdelab
