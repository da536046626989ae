#include "tdsa/lexicon.hpp"

#include <set>

#include "tdsa/util.hpp"

namespace tdsa {

void SentimentLexicon::rebuild_lowered_view() {
  lowered_.clear();
  for (const auto& [word, pol] : entries) lowered_[to_lower_ascii(word)] |= pol;
}

bool SentimentLexicon::contains_lowered(std::string_view lowered_word) const {
  return lowered_.find(lowered_word) != lowered_.end();
}

SentimentLexicon parse_mpqa(std::string_view bytes, LexiconParseReport* report) {
  SentimentLexicon lex;
  lex.name = "mpqa";
  LexiconParseReport local;
  LexiconParseReport& r = report ? *report : local;

  for (std::string_view line : split_lines(bytes)) {
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::string word;
    std::string polarity;
    for (std::string_view field : split_ws(t)) {
      std::size_t eq = field.find('=');
      if (eq == std::string_view::npos) continue;
      std::string_view key = field.substr(0, eq);
      std::string_view value = field.substr(eq + 1);
      if (key == "word1")
        word = std::string(value);
      else if (key == "priorpolarity")
        polarity = std::string(value);
    }
    if (word.empty() || polarity.empty()) {
      ++r.skipped_lines;
      continue;
    }
    if (polarity == "positive")
      lex.entries[word] |= kPositive;
    else if (polarity == "negative")
      lex.entries[word] |= kNegative;
    // both/neutral/weakneg clues carry no usable side here
  }
  lex.rebuild_lowered_view();
  return lex;
}

namespace {

void add_word_list(std::string_view bytes, PolaritySet pol, SentimentLexicon& lex) {
  for (std::string_view line : split_lines(bytes)) {
    std::string_view t = trim(line);
    if (t.empty() || t.front() == ';') continue;
    lex.entries[std::string(t)] |= pol;
  }
}

}  // namespace

SentimentLexicon parse_hl(std::string_view pos_bytes, std::string_view neg_bytes) {
  SentimentLexicon lex;
  lex.name = "hl";
  add_word_list(pos_bytes, kPositive, lex);
  add_word_list(neg_bytes, kNegative, lex);
  lex.rebuild_lowered_view();
  return lex;
}

SentimentLexicon parse_nrc(std::string_view bytes, LexiconParseReport* report) {
  SentimentLexicon lex;
  lex.name = "nrc";
  LexiconParseReport local;
  LexiconParseReport& r = report ? *report : local;

  for (std::string_view line : split_lines(bytes)) {
    std::string_view t = trim(line);
    if (t.empty()) continue;
    std::vector<std::string_view> fields = split(t, '\t');
    if (fields.size() != 3) {
      fields = split_ws(t);
      if (fields.size() != 3) {
        ++r.skipped_lines;
        continue;
      }
    }
    std::string_view word = trim(fields[0]);
    std::string_view emotion = trim(fields[1]);
    std::string_view flag = trim(fields[2]);
    if (word.empty() || flag != "1") continue;
    if (emotion == "positive")
      lex.entries[std::string(word)] |= kPositive;
    else if (emotion == "negative")
      lex.entries[std::string(word)] |= kNegative;
  }
  lex.rebuild_lowered_view();
  return lex;
}

SentimentLexicon lexicon_union(const std::vector<const SentimentLexicon*>& lexicons,
                               std::string name) {
  if (lexicons.empty()) fail(Errc::invalid_argument, "lexicon_union: need at least one lexicon");
  SentimentLexicon out;
  if (name.empty()) {
    for (const auto* lex : lexicons) {
      if (!out.name.empty()) out.name += "+";
      out.name += lex->name;
    }
  } else {
    out.name = std::move(name);
  }
  for (const auto* lex : lexicons)
    for (const auto& [word, pol] : lex->entries) out.entries[word] |= pol;
  out.rebuild_lowered_view();
  return out;
}

LexiconCounts counts(const SentimentLexicon& lexicon, bool lowered) {
  LexiconCounts c;
  if (!lowered) {
    for (const auto& [word, pol] : lexicon.entries) {
      if (pol & kPositive) ++c.positive;
      if (pol & kNegative) ++c.negative;
    }
    return c;
  }
  std::set<std::string> pos, neg;
  for (const auto& [word, pol] : lexicon.entries) {
    std::string low = to_lower_ascii(word);
    if (pol & kPositive) pos.insert(low);
    if (pol & kNegative) neg.insert(low);
  }
  c.positive = pos.size();
  c.negative = neg.size();
  return c;
}

std::vector<Token> mask_context(const std::vector<Token>& tokens,
                                const SentimentLexicon& lexicon) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const Token& tok : tokens) {
    Token masked = tok;
    if (!lexicon.contains_lowered(tok.surface)) masked.surface = std::string(kZeroToken);
    out.push_back(std::move(masked));
  }
  return out;
}

}  // namespace tdsa
