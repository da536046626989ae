#include "tdsa/text.hpp"

#include <algorithm>

#include "tdsa/utf8.hpp"
#include "tdsa/util.hpp"

namespace tdsa {

namespace {

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\r' || c == U'\n' || c == U'\f' || c == U'\v' ||
         c == 0x00A0 || (c >= 0x2000 && c <= 0x200B) || c == 0x3000;
}

bool is_ascii_alnum(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9');
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

// Non-ASCII punctuation that should not glue onto words.
bool is_wide_punct(char32_t c) {
  return (c >= 0x2010 && c <= 0x205E) || (c >= 0x3001 && c <= 0x303F) || c == 0x00A1 ||
         c == 0x00AB || c == 0x00BB || c == 0x00BF;
}

bool is_word_char(char32_t c) {
  if (is_ascii_alnum(c) || c == U'_') return true;
  if (c < 0x80) return false;
  return !is_wide_punct(c);
}

struct Scanner {
  const std::u32string& cps;
  std::size_t pos = 0;

  char32_t at(std::size_t i) const { return i < cps.size() ? cps[i] : 0; }
  bool word_at(std::size_t i) const { return i < cps.size() && is_word_char(cps[i]); }
};

bool match_ci(const Scanner& s, std::size_t i, std::u32string_view lit) {
  for (std::size_t k = 0; k < lit.size(); ++k)
    if (utf8::lower_cp(s.at(i + k)) != lit[k]) return false;
  return true;
}

// URLs: scheme:// or www. up to the next whitespace.
std::size_t match_url(const Scanner& s, std::size_t i) {
  bool hit = match_ci(s, i, U"http://") || match_ci(s, i, U"https://") ||
             match_ci(s, i, U"ftp://") || match_ci(s, i, U"www.");
  if (!hit) return 0;
  std::size_t end = i;
  while (end < s.cps.size() && !is_space(s.cps[end])) ++end;
  return end - i;
}

bool is_eye(char32_t c) { return c == U':' || c == U';' || c == U'=' || c == U'8' || c == U'x' || c == U'X'; }
bool is_nose(char32_t c) { return c == U'-' || c == U'o' || c == U'*' || c == U'\'' || c == U'^'; }
bool is_mouth(char32_t c) {
  switch (c) {
    case U')': case U'(': case U'[': case U']': case U'{': case U'}':
    case U'd': case U'D': case U'p': case U'P': case U'|': case U'/':
    case U'\\': case U'*': case U'o': case U'O': case U'0': case U'@':
    case U'3': case U's': case U'S': case U'c': case U'C': case U'>':
      return true;
    default:
      return false;
  }
}

// Emoticons: hearts, \o/ and eye[-nose]mouth+ faces. Alphabetic eyes (x, X, 8)
// only count when the face is not embedded in a longer word.
std::size_t match_emoticon(const Scanner& s, std::size_t i) {
  if (match_ci(s, i, U"</3")) return 3;
  if (match_ci(s, i, U"<3")) return 2;
  if (match_ci(s, i, U"\\o/")) return 3;
  char32_t eye = s.at(i);
  if (!is_eye(eye)) return 0;
  std::size_t j = i + 1;
  if (j < s.cps.size() && is_nose(s.cps[j]) && j + 1 < s.cps.size() && is_mouth(s.cps[j + 1])) ++j;
  std::size_t mouth_start = j;
  while (j < s.cps.size() && is_mouth(s.cps[j])) ++j;
  if (j == mouth_start) return 0;
  bool alnum_eye = eye == U'8' || eye == U'x' || eye == U'X';
  if (alnum_eye && (s.word_at(j) || (i > 0 && s.word_at(i - 1)))) return 0;
  return j - i;
}

std::size_t match_mention_or_hashtag(const Scanner& s, std::size_t i) {
  char32_t lead = s.at(i);
  if (lead != U'@' && lead != U'#') return 0;
  std::size_t j = i + 1;
  while (j < s.cps.size() && (is_ascii_alnum(s.cps[j]) || s.cps[j] == U'_')) ++j;
  return j > i + 1 ? j - i : 0;
}

std::size_t match_number(const Scanner& s, std::size_t i) {
  if (!is_digit(s.at(i))) return 0;
  std::size_t j = i;
  while (j < s.cps.size() && is_digit(s.cps[j])) ++j;
  while (j + 1 < s.cps.size() && (s.cps[j] == U'.' || s.cps[j] == U',' || s.cps[j] == U':') &&
         is_digit(s.cps[j + 1])) {
    ++j;
    while (j < s.cps.size() && is_digit(s.cps[j])) ++j;
  }
  return j - i;
}

// Words keep internal apostrophes and single hyphens: don't, high-quality.
std::size_t match_word(const Scanner& s, std::size_t i) {
  if (!s.word_at(i)) return 0;
  std::size_t j = i;
  while (j < s.cps.size()) {
    if (s.word_at(j)) {
      ++j;
    } else if ((s.cps[j] == U'\'' || s.cps[j] == U'-') && j > i && s.word_at(j + 1)) {
      ++j;
    } else {
      break;
    }
  }
  return j - i;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::u32string cps = utf8::decode(text);
  Scanner s{cps};
  std::vector<Token> out;

  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space(cps[i])) {
      ++i;
      continue;
    }
    std::size_t len = match_url(s, i);
    if (!len) len = match_emoticon(s, i);
    if (!len) len = match_mention_or_hashtag(s, i);
    if (!len) len = match_number(s, i);
    if (!len) len = match_word(s, i);
    if (!len) {
      // punctuation run; stops where an emoticon begins
      std::size_t j = i + 1;
      while (j < cps.size() && !is_space(cps[j]) && !is_word_char(cps[j]) &&
             !is_digit(cps[j]) && !match_emoticon(s, j))
        ++j;
      len = j - i;
    }
    Token tok;
    tok.span = {i, i + len};
    tok.surface = utf8::encode(utf8::lower(std::u32string_view(cps).substr(i, len)));
    out.push_back(std::move(tok));
    i += len;
  }
  return out;
}

std::vector<ContextBundle> extract_contexts(const TargetInstance& instance) {
  std::vector<Token> tokens = tokenize(instance.text);
  std::vector<ContextBundle> bundles;
  bundles.reserve(instance.spans.size());

  for (const Span& span : instance.spans) {
    ContextBundle b;
    b.full = tokens;
    for (const Token& tok : tokens) {
      if (tok.span.end <= span.start) {
        b.left.push_back(tok);
      } else if (tok.span.start >= span.end) {
        b.right.push_back(tok);
      } else if (tok.span.start >= span.start && tok.span.end <= span.end) {
        b.target.push_back(tok);
      } else {
        fail(Errc::parse, "instance " + instance.id + ": span [" + std::to_string(span.start) +
                              "," + std::to_string(span.end) + ") cuts token '" + tok.surface +
                              "' [" + std::to_string(tok.span.start) + "," +
                              std::to_string(tok.span.end) + ")");
      }
    }
    if (b.target.empty())
      fail(Errc::parse, "instance " + instance.id + ": span [" + std::to_string(span.start) +
                            "," + std::to_string(span.end) + ") covers no complete token");
    bundles.push_back(std::move(b));
  }
  return bundles;
}

}  // namespace tdsa
