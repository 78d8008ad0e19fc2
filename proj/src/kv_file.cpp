#include "cml/kv_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cml/errors.hpp"

namespace cml {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s, std::size_t* leading = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && is_space(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && is_space(s[e - 1])) --e;
  if (leading) *leading = b;
  return s.substr(b, e - b);
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

}  // namespace

std::optional<double> parse_number(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

KeyValueFile KeyValueFile::parse(std::string_view text, std::string source) {
  KeyValueFile f;
  f.source_ = std::move(source);
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t lead = 0;
    std::string_view body = trim(line, &lead);
    if (body.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(f.source_, line_no, static_cast<int>(lead) + 1, "expected 'name = value'");
    std::string_view key = trim(body.substr(0, eq));
    std::size_t vlead = 0;
    std::string_view value = trim(body.substr(eq + 1), &vlead);
    int value_col = static_cast<int>(lead + eq + 1 + vlead) + 1;
    if (!valid_key(key))
      throw ParseError(f.source_, line_no, static_cast<int>(lead) + 1,
                       "invalid name '" + std::string(key) + "'");
    if (value.empty()) throw ParseError(f.source_, line_no, value_col, "missing value");
    if (f.find(key))
      throw ParseError(f.source_, line_no, static_cast<int>(lead) + 1,
                       "duplicate name '" + std::string(key) + "'");
    f.entries_.push_back({std::string(key), std::string(value), line_no, value_col});
    if (nl == text.size()) break;
  }
  return f;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

const KeyValue* KeyValueFile::find(std::string_view key) const {
  for (const auto& kv : entries_)
    if (kv.key == key) return &kv;
  return nullptr;
}

std::optional<std::string> KeyValueFile::text(std::string_view key) const {
  if (const auto* kv = find(key)) return kv->value;
  return std::nullopt;
}

std::optional<double> KeyValueFile::number(std::string_view key) const {
  const auto* kv = find(key);
  if (!kv) return std::nullopt;
  auto v = parse_number(kv->value);
  if (!v) fail(*kv, "'" + kv->value + "' is not a number");
  return v;
}

double KeyValueFile::number_or(std::string_view key, double fallback) const {
  return number(key).value_or(fallback);
}

long KeyValueFile::integer_or(std::string_view key, long fallback) const {
  const auto* kv = find(key);
  if (!kv) return fallback;
  long v = 0;
  auto [ptr, ec] = std::from_chars(kv->value.data(), kv->value.data() + kv->value.size(), v);
  if (ec != std::errc() || ptr != kv->value.data() + kv->value.size())
    fail(*kv, "'" + kv->value + "' is not an integer");
  return v;
}

void KeyValueFile::reject_unknown(const std::vector<std::string>& known,
                                  const std::vector<std::string>& known_prefixes) const {
  for (const auto& kv : entries_) {
    bool ok = std::find(known.begin(), known.end(), kv.key) != known.end();
    for (const auto& pre : known_prefixes)
      ok = ok || (kv.key.size() > pre.size() && kv.key.compare(0, pre.size(), pre) == 0);
    if (!ok) throw ParseError(source_, kv.line, 1, "unknown name '" + kv.key + "'");
  }
}

void KeyValueFile::fail(const KeyValue& kv, const std::string& message) const {
  throw ParseError(source_, kv.line, kv.value_column, message);
}

}  // namespace cml
