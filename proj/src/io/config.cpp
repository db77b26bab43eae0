#include "discus/io/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "discus/core/error.hpp"

namespace discus {
namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  ConfigDocument run() {
    ConfigDocument doc;
    std::string section;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        skip_inline_space();
        const std::size_t start = pos_;
        while (!eof() && peek() != ']' && peek() != '\n') ++pos_;
        if (eof() || peek() != ']') fail("unterminated section header");
        section = trim(s_.substr(start, pos_ - start));
        if (section.empty()) fail("empty section name");
        ++pos_;
        end_of_line();
        doc.set(section, "", ConfigValue{});  // registers the section
        continue;
      }
      const std::string key = parse_key();
      skip_inline_space();
      if (eof() || peek() != '=') fail("expected '=' after key '" + key + "'");
      ++pos_;
      skip_inline_space();
      ConfigValue value = parse_value();
      if (doc.has(section, key)) fail("duplicate key '" + key + "'");
      doc.set(section, key, std::move(value));
      end_of_line();
    }
    return doc;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) line += s_[i] == '\n';
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
  }

  static std::string trim(std::string_view v) {
    std::size_t a = 0, b = v.size();
    while (a < b && std::isspace(static_cast<unsigned char>(v[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(v[b - 1]))) --b;
    return std::string(v.substr(a, b - a));
  }

  void skip_inline_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  void skip_comment() {
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_inline_space();
      skip_comment();
      if (!eof() && peek() == '\n') {
        ++pos_;
        continue;
      }
      break;
    }
  }

  // Whitespace, comments and newlines inside arrays.
  void skip_any_space() {
    while (!eof()) {
      skip_inline_space();
      skip_comment();
      if (!eof() && peek() == '\n') {
        ++pos_;
        continue;
      }
      break;
    }
  }

  void end_of_line() {
    skip_inline_space();
    skip_comment();
    if (!eof() && peek() != '\n') fail("unexpected trailing characters");
    if (!eof()) ++pos_;
  }

  std::string parse_key() {
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-' ||
                      peek() == '.'))
      ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  ConfigValue parse_value() {
    if (eof()) fail("missing value");
    const char c = peek();
    if (c == '"') return ConfigValue{parse_string()};
    if (c == '[') return ConfigValue{parse_array()};
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return ConfigValue{true};
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return ConfigValue{false};
    }
    return parse_number();
  }

  std::string parse_string() {
    ++pos_;
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (eof()) fail("unterminated escape");
      const char e = s_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
    return out;
  }

  ConfigValue::Array parse_array() {
    ++pos_;
    ConfigValue::Array items;
    while (true) {
      skip_any_space();
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        break;
      }
      items.push_back(parse_value());
      skip_any_space();
      if (eof()) fail("unterminated array");
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() != ']') fail("expected ',' or ']' in array");
    }
    return items;
  }

  ConfigValue parse_number() {
    const std::size_t start = pos_;
    while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' && peek() != ']' &&
           peek() != '#')
      ++pos_;
    std::string tok;
    for (char c : s_.substr(start, pos_ - start))
      if (c != '_') tok.push_back(c);
    if (tok.empty()) fail("missing value");
    std::string body = tok;
    double sign = 1.0;
    if (body[0] == '+' || body[0] == '-') {
      sign = body[0] == '-' ? -1.0 : 1.0;
      body = body.substr(1);
    }
    if (body == "inf") return ConfigValue{sign * std::numeric_limits<double>::infinity()};
    if (body == "nan") return ConfigValue{std::numeric_limits<double>::quiet_NaN()};
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      std::int64_t v = 0;
      const char* b = tok.data() + (tok[0] == '+' ? 1 : 0);
      auto [p, ec] = std::from_chars(b, tok.data() + tok.size(), v);
      if (ec != std::errc() || p != tok.data() + tok.size()) fail("invalid value '" + tok + "'");
      return ConfigValue{v};
    }
    std::istringstream in(tok);
    in.imbue(std::locale::classic());
    double d = 0.0;
    in >> d;
    if (in.fail() || !in.eof()) fail("invalid number '" + tok + "'");
    return ConfigValue{d};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

[[noreturn]] void type_error(const std::string& section, const std::string& key, const char* want) {
  throw ConfigError("[" + section + "] " + key + ": expected " + want);
}

double as_double(const ConfigValue& v, const std::string& section, const std::string& key) {
  if (auto* d = std::get_if<double>(&v.v)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&v.v)) return static_cast<double>(*i);
  type_error(section, key, "a number");
}

}  // namespace

void ConfigDocument::set(const std::string& section, const std::string& key, ConfigValue value) {
  auto& sec = sections_[section];
  if (!key.empty()) sec[key] = std::move(value);
}

const ConfigValue* ConfigDocument::find(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

bool ConfigDocument::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

double ConfigDocument::get_double(const std::string& section, const std::string& key, double fallback) const {
  const ConfigValue* v = find(section, key);
  return v ? as_double(*v, section, key) : fallback;
}

std::int64_t ConfigDocument::get_int(const std::string& section, const std::string& key, std::int64_t fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  if (auto* i = std::get_if<std::int64_t>(&v->v)) return *i;
  type_error(section, key, "an integer");
}

bool ConfigDocument::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  if (auto* b = std::get_if<bool>(&v->v)) return *b;
  type_error(section, key, "a boolean");
}

std::string ConfigDocument::get_string(const std::string& section, const std::string& key,
                                       const std::string& fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  if (auto* s = std::get_if<std::string>(&v->v)) return *s;
  type_error(section, key, "a string");
}

std::vector<std::string> ConfigDocument::get_strings(const std::string& section, const std::string& key,
                                                     const std::vector<std::string>& fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  auto* a = std::get_if<ConfigValue::Array>(&v->v);
  if (!a) type_error(section, key, "an array of strings");
  std::vector<std::string> out;
  for (const auto& e : *a) {
    auto* s = std::get_if<std::string>(&e.v);
    if (!s) type_error(section, key, "an array of strings");
    out.push_back(*s);
  }
  return out;
}

std::vector<double> ConfigDocument::get_doubles(const std::string& section, const std::string& key,
                                                const std::vector<double>& fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  auto* a = std::get_if<ConfigValue::Array>(&v->v);
  if (!a) type_error(section, key, "an array of numbers");
  std::vector<double> out;
  for (const auto& e : *a) out.push_back(as_double(e, section, key));
  return out;
}

std::vector<std::int64_t> ConfigDocument::get_ints(const std::string& section, const std::string& key,
                                                   const std::vector<std::int64_t>& fallback) const {
  const ConfigValue* v = find(section, key);
  if (!v) return fallback;
  auto* a = std::get_if<ConfigValue::Array>(&v->v);
  if (!a) type_error(section, key, "an array of integers");
  std::vector<std::int64_t> out;
  for (const auto& e : *a) {
    auto* i = std::get_if<std::int64_t>(&e.v);
    if (!i) type_error(section, key, "an array of integers");
    out.push_back(*i);
  }
  return out;
}

void ConfigDocument::require_known(const std::string& section, const std::vector<std::string>& known) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return;
  for (const auto& [key, value] : s->second) {
    bool ok = false;
    for (const auto& k : known) ok = ok || k == key;
    if (!ok) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }
}

void ConfigDocument::require_sections(const std::vector<std::string>& known) const {
  for (const auto& [name, body] : sections_) {
    if (name.empty() && body.empty()) continue;
    bool ok = false;
    for (const auto& k : known) ok = ok || k == name;
    if (!ok) throw ConfigError(name.empty() ? "keys outside any section" : "unknown section [" + name + "]");
  }
}

ConfigDocument parse_config(std::string_view text) { return Parser(text).run(); }

ConfigDocument load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace discus
