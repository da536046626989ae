#include <doctest.h>

#include <string>
#include <vector>

#include "tdsa/text.hpp"
#include "tdsa/util.hpp"

using namespace tdsa;

namespace {

std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const Token& t : tokens) out.push_back(t.surface);
  return out;
}

}  // namespace

TEST_CASE("tokenizer matches the reference behavior on tweet text") {
  CHECK(surfaces(tokenize("Great phone!!! :)")) ==
        std::vector<std::string>{"great", "phone", "!!!", ":)"});
  CHECK(surfaces(tokenize("")) == std::vector<std::string>{});
  CHECK(surfaces(tokenize("@user loves #nlp http://t.co/x")) ==
        std::vector<std::string>{"@user", "loves", "#nlp", "http://t.co/x"});
}

TEST_CASE("tokenizer keeps urls, contractions, numbers and emoticons whole") {
  CHECK(surfaces(tokenize("don't stop")) == std::vector<std::string>{"don't", "stop"});
  CHECK(surfaces(tokenize("high-quality stuff")) ==
        std::vector<std::string>{"high-quality", "stuff"});
  CHECK(surfaces(tokenize("rated 4.5 stars")) ==
        std::vector<std::string>{"rated", "4.5", "stars"});
  CHECK(surfaces(tokenize("see www.example.com now")) ==
        std::vector<std::string>{"see", "www.example.com", "now"});
  CHECK(surfaces(tokenize("win <3 xD")) == std::vector<std::string>{"win", "<3", "xd"});
  CHECK(surfaces(tokenize("what?!:)")) == std::vector<std::string>{"what", "?!", ":)"});
  CHECK(surfaces(tokenize("xoxo time")) == std::vector<std::string>{"xoxo", "time"});
}

TEST_CASE("token spans index code points and reproduce the raw slices") {
  std::string text = "Great phone!!! :)";
  for (const Token& tok : tokenize(text)) {
    CHECK(tok.span.start < tok.span.end);
    std::string raw = text.substr(tok.span.start, tok.span.end - tok.span.start);
    CHECK(to_lower_ascii(raw) == tok.surface);
  }
}

TEST_CASE("tokenizer is idempotent on its own surface output") {
  for (const char* sample :
       {"Great phone!!! :)", "@user loves #nlp http://t.co/x", "don't worry, be happy",
        "rated 4.5 stars !!", "a #tag and http://x.io/y plus :("}) {
    std::vector<Token> first = tokenize(sample);
    std::string joined;
    for (const Token& t : first) {
      if (!joined.empty()) joined += ' ';
      joined += t.surface;
    }
    CHECK(tokenize(joined).size() == first.size());
  }
}

TEST_CASE("context extraction splits around the target occurrence") {
  TargetInstance i =
      TargetInstance::make("1", "i love nlp", "nlp", {{7, 10}}, Label::Positive);
  std::vector<ContextBundle> bundles = extract_contexts(i);
  REQUIRE(bundles.size() == 1);
  CHECK(surfaces(bundles[0].left) == std::vector<std::string>{"i", "love"});
  CHECK(surfaces(bundles[0].target) == std::vector<std::string>{"nlp"});
  CHECK(bundles[0].right.empty());
  CHECK(surfaces(bundles[0].full) == std::vector<std::string>{"i", "love", "nlp"});
}

TEST_CASE("target at position zero has an empty left context") {
  TargetInstance i = TargetInstance::make("1", "nlp rocks", "nlp", {{0, 3}}, Label::Positive);
  std::vector<ContextBundle> bundles = extract_contexts(i);
  REQUIRE(bundles.size() == 1);
  CHECK(bundles[0].left.empty());
  CHECK(surfaces(bundles[0].right) == std::vector<std::string>{"rocks"});
}

TEST_CASE("one bundle per occurrence, in span order") {
  TargetInstance i = TargetInstance::make("1", "good camera , camera works", "camera",
                                          {{5, 11}, {14, 20}}, Label::Positive);
  std::vector<ContextBundle> bundles = extract_contexts(i);
  REQUIRE(bundles.size() == 2);
  CHECK(surfaces(bundles[0].left) == std::vector<std::string>{"good"});
  CHECK(surfaces(bundles[0].right) == std::vector<std::string>{",", "camera", "works"});
  CHECK(surfaces(bundles[1].left) == std::vector<std::string>{"good", "camera", ","});
  CHECK(surfaces(bundles[1].right) == std::vector<std::string>{"works"});

  // concatenation invariant: left ++ target ++ right == full, span-ordered
  for (const ContextBundle& b : bundles) {
    std::vector<Token> joined = b.left;
    joined.insert(joined.end(), b.target.begin(), b.target.end());
    joined.insert(joined.end(), b.right.begin(), b.right.end());
    CHECK(joined == b.full);
  }
}

TEST_CASE("a span cutting through a token is an alignment error") {
  TargetInstance i =
      TargetInstance::make("1", "my smartphone", "phone", {{8, 13}}, Label::Neutral);
  try {
    extract_contexts(i);
    FAIL("expected an alignment error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("[8,13)") != std::string::npos);
  }
}
