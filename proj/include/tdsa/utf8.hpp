#pragma once

#include <string>
#include <string_view>

namespace tdsa::utf8 {

// Decodes UTF-8 into code points. Each invalid byte decodes to U+FFFD so
// decoding never fails and indices stay stable for arbitrary input.
std::u32string decode(std::string_view bytes);
std::string encode(std::u32string_view cps);
std::string encode_cp(char32_t cp);
std::size_t count(std::string_view bytes);

// ASCII-only lowering; non-ASCII code points pass through unchanged. All
// case-insensitive comparisons in the framework share this rule.
inline char32_t lower_cp(char32_t cp) { return (cp >= U'A' && cp <= U'Z') ? cp + 32 : cp; }
std::u32string lower(std::u32string_view cps);

}  // namespace tdsa::utf8
