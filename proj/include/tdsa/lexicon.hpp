#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tdsa/text.hpp"

namespace tdsa {

enum class Polarity : std::uint8_t { Positive = 1, Negative = 2 };

// Bitmask of Polarity values. A word may carry both polarities; several of
// the published lexicons really do list words on both sides.
using PolaritySet = std::uint8_t;

constexpr PolaritySet kPositive = 1;
constexpr PolaritySet kNegative = 2;

// Sentinel surface produced by masking; embeds to the all-zeros vector.
inline constexpr std::string_view kZeroToken = "__ZERO__";

struct SentimentLexicon {
  std::string name;
  // Words as given in the source files; matching against tokens goes through
  // the lowercase view built on demand.
  std::map<std::string, PolaritySet> entries;

  bool contains_lowered(std::string_view lowered_word) const;
  void rebuild_lowered_view();

 private:
  std::map<std::string, PolaritySet, std::less<>> lowered_;
};

struct LexiconCounts {
  std::size_t positive = 0;
  std::size_t negative = 0;
};

struct LexiconParseReport {
  std::size_t skipped_lines = 0;
};

SentimentLexicon parse_mpqa(std::string_view bytes, LexiconParseReport* report = nullptr);
SentimentLexicon parse_hl(std::string_view pos_bytes, std::string_view neg_bytes);
SentimentLexicon parse_nrc(std::string_view bytes, LexiconParseReport* report = nullptr);

SentimentLexicon lexicon_union(const std::vector<const SentimentLexicon*>& lexicons,
                               std::string name = {});

LexiconCounts counts(const SentimentLexicon& lexicon, bool lowered);

// Replaces every token not present in the lexicon (under any polarity) by the
// ZERO token. Length and spans are preserved.
std::vector<Token> mask_context(const std::vector<Token>& tokens,
                                const SentimentLexicon& lexicon);

}  // namespace tdsa
