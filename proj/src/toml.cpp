#include "advrec/toml.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace advrec {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

// strips a trailing comment, respecting quoted strings
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

bool looks_like_int(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

TomlValue parse_scalar(const std::string& raw) {
  const auto s = trim(raw);
  if (s.empty()) throw ConfigError("empty TOML value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      throw ConfigError("unterminated string: " + s);
    return {s.substr(1, s.size() - 2)};
  }
  if (s == "true") return {true};
  if (s == "false") return {false};
  if (looks_like_int(s)) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) throw ConfigError("bad integer: " + s);
    return {v};
  }
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ConfigError("bad TOML value: " + s);
  return {v};
}

TomlValue parse_array(const std::string& raw) {
  const auto inner = trim(raw.substr(1, raw.size() - 2));
  std::vector<TomlValue> elems;
  if (!inner.empty()) {
    std::string cur;
    bool in_string = false;
    for (char c : inner) {
      if (c == '"') in_string = !in_string;
      if (c == ',' && !in_string) {
        elems.push_back(parse_scalar(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!trim(cur).empty()) elems.push_back(parse_scalar(cur));
  }
  if (elems.empty()) return {std::vector<double>{}};
  if (std::holds_alternative<std::string>(elems[0].data)) {
    std::vector<std::string> out;
    for (auto& e : elems) out.push_back(e.as_string());
    return {std::move(out)};
  }
  if (std::all_of(elems.begin(), elems.end(), [](const TomlValue& e) {
        return std::holds_alternative<std::int64_t>(e.data);
      })) {
    std::vector<std::int64_t> out;
    for (auto& e : elems) out.push_back(e.as_int());
    return {std::move(out)};
  }
  std::vector<double> out;
  for (auto& e : elems) out.push_back(e.as_double());
  return {std::move(out)};
}

}  // namespace

const std::string& TomlValue::as_string() const {
  if (!is_string()) throw ConfigError("expected a TOML string");
  return std::get<std::string>(data);
}

std::int64_t TomlValue::as_int() const {
  if (!std::holds_alternative<std::int64_t>(data))
    throw ConfigError("expected a TOML integer");
  return std::get<std::int64_t>(data);
}

double TomlValue::as_double() const {
  if (std::holds_alternative<std::int64_t>(data))
    return static_cast<double>(std::get<std::int64_t>(data));
  if (!std::holds_alternative<double>(data))
    throw ConfigError("expected a TOML number");
  return std::get<double>(data);
}

bool TomlValue::as_bool() const {
  if (!std::holds_alternative<bool>(data))
    throw ConfigError("expected a TOML boolean");
  return std::get<bool>(data);
}

std::vector<std::string> TomlValue::as_string_array() const {
  if (!std::holds_alternative<std::vector<std::string>>(data))
    throw ConfigError("expected an array of strings");
  return std::get<std::vector<std::string>>(data);
}

std::vector<std::int64_t> TomlValue::as_int_array() const {
  if (std::holds_alternative<std::vector<std::int64_t>>(data))
    return std::get<std::vector<std::int64_t>>(data);
  throw ConfigError("expected an array of integers");
}

std::vector<double> TomlValue::as_double_array() const {
  if (std::holds_alternative<std::vector<double>>(data))
    return std::get<std::vector<double>>(data);
  if (std::holds_alternative<std::vector<std::int64_t>>(data)) {
    std::vector<double> out;
    for (auto v : std::get<std::vector<std::int64_t>>(data))
      out.push_back(static_cast<double>(v));
    return out;
  }
  throw ConfigError("expected an array of numbers");
}

TomlTable TomlTable::parse(const std::string& text) {
  TomlTable table;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto stripped = trim(strip_comment(line));
    if (stripped.empty()) continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) +
                          ": malformed section header");
      section = trim(stripped.substr(1, stripped.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": empty section");
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    const auto key = trim(stripped.substr(0, eq));
    const auto value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    TomlValue parsed = (value.front() == '[' && value.back() == ']')
                           ? parse_array(value)
                           : parse_scalar(value);
    const auto full_key = section + "\n" + key;
    if (!table.values_.emplace(full_key, std::move(parsed)).second)
      throw ConfigError("duplicate key: " + section + "." + key);
  }
  return table;
}

TomlTable TomlTable::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool TomlTable::contains(const std::string& section, const std::string& key) const {
  return values_.count(section + "\n" + key) > 0;
}

const TomlValue& TomlTable::at(const std::string& section,
                               const std::string& key) const {
  const auto it = values_.find(section + "\n" + key);
  if (it == values_.end())
    throw ConfigError("missing config key: [" + section + "] " + key);
  return it->second;
}

const TomlValue* TomlTable::find(const std::string& section,
                                 const std::string& key) const {
  const auto it = values_.find(section + "\n" + key);
  return it == values_.end() ? nullptr : &it->second;
}

std::vector<std::pair<std::string, std::string>> TomlTable::keys() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [full_key, value] : values_) {
    const auto nl = full_key.find('\n');
    out.emplace_back(full_key.substr(0, nl), full_key.substr(nl + 1));
  }
  return out;
}

}  // namespace advrec
