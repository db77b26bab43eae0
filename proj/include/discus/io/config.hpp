#pragma once

// Reader for the TOML subset used by the configuration files: [section]
// headers, key = value pairs, strings, integers, floats, booleans, and
// arrays of those (possibly spanning lines), plus # comments.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace discus {

struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<bool, std::int64_t, double, std::string, Array> v;
};

class ConfigDocument {
 public:
  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const { return sections_.count(section) != 0; }

  double get_double(const std::string& section, const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  std::vector<std::string> get_strings(const std::string& section, const std::string& key,
                                       const std::vector<std::string>& fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback) const;
  std::vector<std::int64_t> get_ints(const std::string& section, const std::string& key,
                                     const std::vector<std::int64_t>& fallback) const;

  // Throws ConfigError naming the first key of `section` not in `known`.
  void require_known(const std::string& section, const std::vector<std::string>& known) const;
  // Throws ConfigError naming the first section not in `known`.
  void require_sections(const std::vector<std::string>& known) const;

  void set(const std::string& section, const std::string& key, ConfigValue value);
  const std::map<std::string, std::map<std::string, ConfigValue>>& sections() const noexcept { return sections_; }

 private:
  const ConfigValue* find(const std::string& section, const std::string& key) const;
  std::map<std::string, std::map<std::string, ConfigValue>> sections_;
};

ConfigDocument parse_config(std::string_view text);
ConfigDocument load_config(const std::filesystem::path& path);

}  // namespace discus
