#pragma once

#include <string>
#include <vector>

#include "tdsa/corpus.hpp"

namespace tdsa {

// Lowercased surface plus the code-point span it was cut from. Spans are
// ascending and non-overlapping across a token sequence.
struct Token {
  std::string surface;
  Span span;

  bool operator==(const Token&) const = default;
};

// Tweet-oriented tokenizer, rule-ordered: URLs, then emoticons, then
// mentions/hashtags, then numbers/words, then punctuation runs. Deterministic,
// lowercases everything.
std::vector<Token> tokenize(std::string_view text);

// The four token sequences pooled by every feature extractor. left ++ target
// ++ right always equals full as span-ordered sequences; target is non-empty.
struct ContextBundle {
  std::vector<Token> left;
  std::vector<Token> target;
  std::vector<Token> right;
  std::vector<Token> full;
};

// One bundle per target occurrence, in span order. A span that cuts through
// a token is an alignment error.
std::vector<ContextBundle> extract_contexts(const TargetInstance& instance);

}  // namespace tdsa
