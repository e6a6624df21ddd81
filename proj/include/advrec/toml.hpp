#pragma once
// Minimal TOML reader covering the plan-file subset: [section] headers,
// key = value with strings, integers, floats, booleans and flat arrays,
// plus # comments. Unsupported syntax raises ConfigError.

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "advrec/types.hpp"

namespace advrec {

struct TomlValue {
  std::variant<std::string, std::int64_t, double, bool,
               std::vector<std::string>, std::vector<std::int64_t>,
               std::vector<double>>
      data;

  bool is_string() const { return std::holds_alternative<std::string>(data); }
  const std::string& as_string() const;
  std::int64_t as_int() const;
  double as_double() const;  // accepts integer values too
  bool as_bool() const;
  std::vector<std::string> as_string_array() const;
  std::vector<std::int64_t> as_int_array() const;
  std::vector<double> as_double_array() const;
};

class TomlTable {
 public:
  static TomlTable parse(const std::string& text);
  static TomlTable parse_file(const std::string& path);

  bool contains(const std::string& section, const std::string& key) const;
  const TomlValue& at(const std::string& section, const std::string& key) const;
  const TomlValue* find(const std::string& section, const std::string& key) const;

  // (section, key) pairs in sorted order, for strict schema checks.
  std::vector<std::pair<std::string, std::string>> keys() const;

 private:
  // key = "section\nname"; top-level keys use an empty section
  std::map<std::string, TomlValue> values_;
};

}  // namespace advrec
