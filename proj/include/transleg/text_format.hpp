#pragma once

// Shared plumbing for the INI-style structured text files (model, reward config)
// and for locale-independent, round-trip exact number formatting.

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace transleg {

class TextFormatError : public std::runtime_error {
 public:
  TextFormatError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, end);
}

inline std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
    const auto b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != ',') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TextEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct TextSection {
  std::string name;
  int line = 0;
  std::vector<TextEntry> entries;

  const TextEntry* find(std::string_view key) const {
    for (const auto& e : entries)
      if (e.key == key) return &e;
    return nullptr;
  }
};

/// Parses `[section]` headers and `key = value` lines. `#` starts a comment.
/// Entries before the first header land in a section with an empty name.
inline std::vector<TextSection> parse_structured_text(std::string_view text, const std::string& source) {
  std::vector<TextSection> sections;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw TextFormatError(source, line_no, "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw TextFormatError(source, line_no, "empty section name");
      sections.push_back({std::string(name), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw TextFormatError(source, line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw TextFormatError(source, line_no, "empty key");
    if (sections.empty()) sections.push_back({"", 0, {}});
    auto& sec = sections.back();
    if (sec.find(key)) throw TextFormatError(source, line_no, "duplicate key '" + std::string(key) + "'");
    sec.entries.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
  }
  return sections;
}

inline void reject_unknown_keys(const TextSection& sec, std::initializer_list<std::string_view> allowed,
                                const std::string& source) {
  for (const auto& e : sec.entries) {
    bool ok = false;
    for (auto k : allowed) ok = ok || e.key == k;
    if (!ok) throw TextFormatError(source, e.line, "unknown field '" + e.key + "' in [" + sec.name + "]");
  }
}

/// Typed accessors that report the offending line on failure.
class SectionReader {
 public:
  SectionReader(const TextSection& sec, std::string source) : sec_(sec), source_(std::move(source)) {}

  bool has(std::string_view key) const { return sec_.find(key) != nullptr; }

  const std::string& str(std::string_view key) const { return require(key).value; }

  double number(std::string_view key) const {
    const auto& e = require(key);
    const auto v = parse_double(e.value);
    if (!v) fail(e.line, "field '" + e.key + "' is not a number: '" + e.value + "'");
    return *v;
  }

  double number_or(std::string_view key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::vector<double> numbers(std::string_view key, std::optional<std::size_t> expected = std::nullopt) const {
    const auto& e = require(key);
    std::vector<double> out;
    for (auto tok : split_ws(e.value)) {
      const auto v = parse_double(tok);
      if (!v) fail(e.line, "field '" + e.key + "' has a non-numeric entry '" + std::string(tok) + "'");
      out.push_back(*v);
    }
    if (expected && out.size() != *expected)
      fail(e.line, "field '" + e.key + "' needs " + std::to_string(*expected) + " values, got " +
                       std::to_string(out.size()));
    return out;
  }

  bool boolean_or(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& e = require(key);
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    fail(e.line, "field '" + e.key + "' is not a boolean: '" + e.value + "'");
  }

  int line_of(std::string_view key) const { return has(key) ? require(key).line : sec_.line; }
  int line() const { return sec_.line; }

  [[noreturn]] void fail(int line, const std::string& what) const { throw TextFormatError(source_, line, what); }

 private:
  const TextEntry& require(std::string_view key) const {
    const auto* e = sec_.find(key);
    if (!e) fail(sec_.line, "section [" + sec_.name + "] is missing field '" + std::string(key) + "'");
    return *e;
  }

  const TextSection& sec_;
  std::string source_;
};

}  // namespace transleg
