#include "spdelab/keyvalue.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "spdelab/errors.hpp"

namespace spdelab {

bool KeyValueDocument::has(const std::string& section, const std::string& key) const {
  auto it = sections.find(section);
  return it != sections.end() && it->second.count(key) > 0;
}

const std::string& KeyValueDocument::get(const std::string& section,
                                         const std::string& key) const {
  auto it = sections.find(section);
  if (it == sections.end() || it->second.count(key) == 0) {
    throw ValidationError("missing key '" + key + "'" +
                          (section.empty() ? std::string() : " in [" + section + "]"));
  }
  return it->second.at(key);
}

std::string KeyValueDocument::get_or(const std::string& section, const std::string& key,
                                     const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

KeyValueDocument parse_key_value(std::string_view text) {
  KeyValueDocument doc;
  std::string section;
  doc.sections[section];
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ValidationError("line " + std::to_string(line_no) + ": unterminated section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      doc.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected key = value");
    }
    doc.sections[section][trim(std::string_view(line).substr(0, eq))] =
        trim(std::string_view(line).substr(eq + 1));
  }
  return doc;
}

double parse_real(std::string_view s) {
  const std::string t = trim(s);
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  const auto slash = t.find('/');
  if (slash != std::string::npos) {
    return parse_real(t.substr(0, slash)) / parse_real(t.substr(slash + 1));
  }
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || t.empty()) {
    throw ValidationError("not a real number: '" + t + "'");
  }
  return v;
}

long long parse_integer(std::string_view s) {
  const std::string t = trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ValidationError("not an integer: '" + t + "'");
  }
  return v;
}

std::vector<double> parse_real_list(std::string_view s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) {
    if (!item.empty()) out.push_back(parse_real(item));
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace spdelab
