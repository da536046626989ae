#include "tdsa/config.hpp"

#include <cstdlib>
#include <filesystem>

#include "tdsa/util.hpp"

namespace tdsa {

namespace {

bool bare_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '-' || c == '.';
}

struct Cursor {
  std::string_view s;
  std::size_t pos = 0;
  std::size_t line = 1;

  bool eof() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }

  [[noreturn]] void err(const std::string& msg) const {
    fail(Errc::parse, "config: " + msg + " (line " + std::to_string(line) + ")");
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
};

std::string parse_basic_string(Cursor& c) {
  // c.peek() == '"'
  ++c.pos;
  std::string out;
  while (true) {
    if (c.eof() || c.peek() == '\n') c.err("unterminated string");
    char ch = c.peek();
    ++c.pos;
    if (ch == '"') return out;
    if (ch == '\\') {
      if (c.eof()) c.err("unterminated escape");
      char esc = c.peek();
      ++c.pos;
      switch (esc) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        default: c.err(std::string("unsupported escape \\") + esc);
      }
    } else {
      out.push_back(ch);
    }
  }
}

std::string parse_literal_string(Cursor& c) {
  ++c.pos;
  std::string out;
  while (true) {
    if (c.eof() || c.peek() == '\n') c.err("unterminated string");
    char ch = c.peek();
    ++c.pos;
    if (ch == '\'') return out;
    out.push_back(ch);
  }
}

TomlValue parse_value(Cursor& c);

TomlValue parse_array(Cursor& c) {
  ++c.pos;  // '['
  TomlValue out;
  out.kind = TomlValue::Kind::Array;
  c.skip_inline_ws();
  if (!c.eof() && c.peek() == ']') {
    ++c.pos;
    return out;
  }
  while (true) {
    c.skip_inline_ws();
    out.array.push_back(parse_value(c));
    c.skip_inline_ws();
    if (c.eof() || c.peek() == '\n') c.err("unterminated array");
    if (c.peek() == ',') {
      ++c.pos;
      c.skip_inline_ws();
      if (!c.eof() && c.peek() == ']') {
        ++c.pos;
        return out;
      }
      continue;
    }
    if (c.peek() == ']') {
      ++c.pos;
      return out;
    }
    c.err("expected ',' or ']' in array");
  }
}

TomlValue parse_value(Cursor& c) {
  if (c.eof()) c.err("expected a value");
  char ch = c.peek();
  if (ch == '"') {
    TomlValue v;
    v.kind = TomlValue::Kind::String;
    v.str = parse_basic_string(c);
    return v;
  }
  if (ch == '\'') {
    TomlValue v;
    v.kind = TomlValue::Kind::String;
    v.str = parse_literal_string(c);
    return v;
  }
  if (ch == '[') return parse_array(c);

  std::size_t start = c.pos;
  while (!c.eof() && c.peek() != '\n' && c.peek() != ',' && c.peek() != ']' && c.peek() != '#' &&
         c.peek() != ' ' && c.peek() != '\t')
    ++c.pos;
  std::string_view raw = trim(c.s.substr(start, c.pos - start));
  if (raw == "true" || raw == "false") {
    TomlValue v;
    v.kind = TomlValue::Kind::Boolean;
    v.boolean = raw == "true";
    return v;
  }
  std::string cleaned;
  for (char rc : raw)
    if (rc != '_') cleaned.push_back(rc);
  double num = 0.0;
  if (parse_double(cleaned, num)) {
    TomlValue v;
    v.kind = TomlValue::Kind::Number;
    v.number = num;
    return v;
  }
  c.err("cannot parse value '" + std::string(raw) + "'");
}

}  // namespace

TomlTable TomlTable::parse(std::string_view bytes) {
  TomlTable table;
  Cursor c{bytes};
  std::string prefix;

  while (!c.eof()) {
    c.skip_inline_ws();
    if (c.eof()) break;
    char ch = c.peek();
    if (ch == '\n') {
      ++c.pos;
      ++c.line;
      continue;
    }
    if (ch == '#') {
      while (!c.eof() && c.peek() != '\n') ++c.pos;
      continue;
    }
    if (ch == '[') {
      ++c.pos;
      std::size_t start = c.pos;
      while (!c.eof() && c.peek() != ']' && c.peek() != '\n') ++c.pos;
      if (c.eof() || c.peek() != ']') c.err("unterminated table header");
      prefix = std::string(trim(c.s.substr(start, c.pos - start)));
      if (prefix.empty()) c.err("empty table header");
      ++c.pos;
      continue;
    }
    if (!bare_key_char(ch) && ch != '"') c.err(std::string("unexpected character '") + ch + "'");

    std::string key;
    if (ch == '"') {
      key = parse_basic_string(c);
    } else {
      std::size_t start = c.pos;
      while (!c.eof() && bare_key_char(c.peek())) ++c.pos;
      key = std::string(c.s.substr(start, c.pos - start));
    }
    c.skip_inline_ws();
    if (c.eof() || c.peek() != '=') c.err("expected '=' after key '" + key + "'");
    ++c.pos;
    c.skip_inline_ws();
    TomlValue value = parse_value(c);
    c.skip_inline_ws();
    if (!c.eof() && c.peek() == '#')
      while (!c.eof() && c.peek() != '\n') ++c.pos;
    if (!c.eof() && c.peek() != '\n') c.err("trailing content after value of '" + key + "'");

    std::string full = prefix.empty() ? key : prefix + "." + key;
    if (table.values_.count(full)) c.err("duplicate key '" + full + "'");
    table.values_.emplace(std::move(full), std::move(value));
  }
  return table;
}

TomlTable TomlTable::parse_file(const std::string& path) { return parse(read_file(path)); }

const TomlValue* TomlTable::find(const std::string& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::string TomlTable::get_string(const std::string& key, std::string fallback) const {
  const TomlValue* v = find(key);
  if (!v) return fallback;
  if (v->kind != TomlValue::Kind::String)
    fail(Errc::invalid_argument, "config: '" + key + "' is not a string");
  return v->str;
}

std::string TomlTable::require_string(const std::string& key) const {
  const TomlValue* v = find(key);
  if (!v) fail(Errc::invalid_argument, "config: missing required key '" + key + "'");
  if (v->kind != TomlValue::Kind::String)
    fail(Errc::invalid_argument, "config: '" + key + "' is not a string");
  return v->str;
}

double TomlTable::get_number(const std::string& key, double fallback) const {
  const TomlValue* v = find(key);
  if (!v) return fallback;
  if (v->kind != TomlValue::Kind::Number)
    fail(Errc::invalid_argument, "config: '" + key + "' is not a number");
  return v->number;
}

bool TomlTable::get_bool(const std::string& key, bool fallback) const {
  const TomlValue* v = find(key);
  if (!v) return fallback;
  if (v->kind != TomlValue::Kind::Boolean)
    fail(Errc::invalid_argument, "config: '" + key + "' is not a boolean");
  return v->boolean;
}

std::vector<std::string> TomlTable::get_string_array(const std::string& key) const {
  const TomlValue* v = find(key);
  std::vector<std::string> out;
  if (!v) return out;
  if (v->kind == TomlValue::Kind::String) {
    out.push_back(v->str);
    return out;
  }
  if (v->kind != TomlValue::Kind::Array)
    fail(Errc::invalid_argument, "config: '" + key + "' is not an array");
  for (const TomlValue& item : v->array) {
    if (item.kind != TomlValue::Kind::String)
      fail(Errc::invalid_argument, "config: '" + key + "' must hold strings");
    out.push_back(item.str);
  }
  return out;
}

std::vector<double> TomlTable::get_number_array(const std::string& key) const {
  const TomlValue* v = find(key);
  std::vector<double> out;
  if (!v) return out;
  if (v->kind == TomlValue::Kind::Number) {
    out.push_back(v->number);
    return out;
  }
  if (v->kind != TomlValue::Kind::Array)
    fail(Errc::invalid_argument, "config: '" + key + "' is not an array");
  for (const TomlValue& item : v->array) {
    if (item.kind != TomlValue::Kind::Number)
      fail(Errc::invalid_argument, "config: '" + key + "' must hold numbers");
    out.push_back(item.number);
  }
  return out;
}

void TomlTable::set_string(const std::string& key, std::string value) {
  TomlValue v;
  v.kind = TomlValue::Kind::String;
  v.str = std::move(value);
  set(key, std::move(v));
}

void TomlTable::set_number(const std::string& key, double value) {
  TomlValue v;
  v.kind = TomlValue::Kind::Number;
  v.number = value;
  set(key, std::move(v));
}

void TomlTable::set_bool(const std::string& key, bool value) {
  TomlValue v;
  v.kind = TomlValue::Kind::Boolean;
  v.boolean = value;
  set(key, std::move(v));
}

void TomlTable::apply_override(std::string_view assignment) {
  std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos)
    fail(Errc::invalid_argument, "override must look like key=value: " + std::string(assignment));
  std::string key(trim(assignment.substr(0, eq)));
  std::string_view raw = trim(assignment.substr(eq + 1));
  if (key.empty()) fail(Errc::invalid_argument, "override with empty key");
  // Bare words that are not TOML values are taken as strings for convenience.
  Cursor c{raw};
  TomlValue value;
  bool parsed = false;
  if (!raw.empty() && (raw.front() == '"' || raw.front() == '\'' || raw.front() == '[' ||
                       raw == "true" || raw == "false")) {
    value = parse_value(c);
    parsed = true;
  } else {
    double num = 0.0;
    if (parse_double(raw, num)) {
      value.kind = TomlValue::Kind::Number;
      value.number = num;
      parsed = true;
    }
  }
  if (!parsed) {
    value.kind = TomlValue::Kind::String;
    value.str = std::string(raw);
  }
  set(key, std::move(value));
}

std::vector<std::string> TomlTable::subtable_names(const std::string& prefix) const {
  std::vector<std::string> out;
  std::string want = prefix + ".";
  for (const auto& [key, value] : values_) {
    if (key.rfind(want, 0) != 0) continue;
    std::string rest = key.substr(want.size());
    std::size_t dot = rest.find('.');
    if (dot == std::string::npos) continue;
    std::string name = rest.substr(0, dot);
    if (out.empty() || out.back() != name) {
      bool seen = false;
      for (const std::string& existing : out) seen = seen || existing == name;
      if (!seen) out.push_back(name);
    }
  }
  return out;
}

std::string resolve_data_path(const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  const char* root = std::getenv("TDSA_DATA_DIR");
  if (!root || !*root) return path;
  return (std::filesystem::path(root) / p).string();
}

}  // namespace tdsa
