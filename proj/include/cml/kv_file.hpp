#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cml {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
  int value_column = 0;
};

/// Flat `name = value` text with `#` comments. Duplicate keys are rejected.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text, std::string source = "<string>");
  static KeyValueFile load(const std::filesystem::path& path);

  const std::string& source() const { return source_; }
  const std::vector<KeyValue>& entries() const { return entries_; }
  const KeyValue* find(std::string_view key) const;

  std::optional<std::string> text(std::string_view key) const;
  std::optional<double> number(std::string_view key) const;
  double number_or(std::string_view key, double fallback) const;
  long integer_or(std::string_view key, long fallback) const;

  /// Throws ParseError pointing at the first key not in `known`.
  void reject_unknown(const std::vector<std::string>& known,
                      const std::vector<std::string>& known_prefixes = {}) const;

  [[noreturn]] void fail(const KeyValue& kv, const std::string& message) const;

 private:
  std::string source_;
  std::vector<KeyValue> entries_;
};

/// Strict decimal/scientific number; the whole string must be consumed.
std::optional<double> parse_number(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace cml
