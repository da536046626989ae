#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tdsa {

enum class Errc {
  io = 1,
  parse = 2,
  invalid_argument = 3,
  state = 4,
  internal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> split_ws(std::string_view s);
// Splits on '\n'; strips a trailing '\r' per line. A trailing newline does
// not produce an empty final line.
std::vector<std::string_view> split_lines(std::string_view s);
std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, long long& out);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

std::string format_double(double v, int decimals);

}  // namespace tdsa
