#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tdsa {

// TOML subset sufficient for the experiment configs: [table] and [a.b]
// headers, dotted keys, strings, numbers, booleans and single-line arrays.
struct TomlValue {
  enum class Kind { String, Number, Boolean, Array };
  Kind kind = Kind::String;
  std::string str;
  double number = 0.0;
  bool boolean = false;
  std::vector<TomlValue> array;
};

class TomlTable {
 public:
  static TomlTable parse(std::string_view bytes);
  static TomlTable parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const TomlValue* find(const std::string& key) const;

  std::string get_string(const std::string& key, std::string fallback = {}) const;
  double get_number(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_string_array(const std::string& key) const;
  std::vector<double> get_number_array(const std::string& key) const;

  std::string require_string(const std::string& key) const;

  // Programmatic overrides (CLI flags win over file values).
  void set(const std::string& key, TomlValue value) { values_[key] = std::move(value); }
  void set_string(const std::string& key, std::string value);
  void set_number(const std::string& key, double value);
  void set_bool(const std::string& key, bool value);
  // Applies a "key=value" override; the value is parsed with TOML rules.
  void apply_override(std::string_view assignment);

  // Distinct middle segments of keys `prefix.<name>.*`, in key order.
  std::vector<std::string> subtable_names(const std::string& prefix) const;

  const std::map<std::string, TomlValue>& values() const { return values_; }

 private:
  std::map<std::string, TomlValue> values_;
};

// Resolves a data path against TDSA_DATA_DIR when it is set and the path is
// relative.
std::string resolve_data_path(const std::string& path);

}  // namespace tdsa
