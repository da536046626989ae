#include <doctest.h>

#include <array>
#include <set>

#include "tdsa/corpus.hpp"
#include "tdsa/util.hpp"

using namespace tdsa;

namespace {

TargetInstance inst(const std::string& id, const std::string& text, const std::string& target,
                    std::vector<Span> spans, Label label) {
  return TargetInstance::make(id, text, target, std::move(spans), label);
}

}  // namespace

TEST_CASE("target instance validates spans at construction") {
  CHECK_NOTHROW(inst("a", "i love nlp", "nlp", {{7, 10}}, Label::Positive));
  CHECK_NOTHROW(inst("a", "NLP and nlp", "nlp", {{0, 3}, {8, 11}}, Label::Neutral));

  CHECK_THROWS_AS(inst("a", "i love nlp", "nlp", {}, Label::Positive), Error);
  CHECK_THROWS_AS(inst("a", "i love nlp", "nlp", {{7, 11}}, Label::Positive), Error);
  CHECK_THROWS_AS(inst("a", "i love nlp", "nlp", {{6, 9}}, Label::Positive), Error);
  // overlapping / unsorted
  CHECK_THROWS_AS(inst("a", "nlp nlp", "nlp", {{4, 7}, {0, 3}}, Label::Positive), Error);
  CHECK_THROWS_AS(inst("a", "nlpnlp", "nlp", {{0, 3}, {2, 5}}, Label::Positive), Error);
}

TEST_CASE("spans are code point offsets") {
  // é is two bytes but one scalar value
  CHECK_NOTHROW(inst("u", "héllo nlp", "nlp", {{6, 9}}, Label::Neutral));
  CHECK_THROWS_AS(inst("u", "héllo nlp", "nlp", {{7, 10}}, Label::Neutral), Error);
}

TEST_CASE("dong parser handles the 3-line record format") {
  ParseReport report;
  Dataset d = parse_dong("i love $T$\nnlp\n1\n", &report);
  REQUIRE(d.instances.size() == 1);
  CHECK(d.instances[0].text == "i love nlp");
  CHECK(d.instances[0].target == "nlp");
  CHECK(d.instances[0].spans == std::vector<Span>{{7, 10}});
  CHECK(d.instances[0].label == Label::Positive);
  CHECK(report.accepted == 1);

  SUBCASE("label outside {-1,0,1} rejects the record") {
    ParseReport r;
    Dataset bad = parse_dong("i love $T$\nnlp\n2\n", &r);
    CHECK(bad.instances.empty());
    CHECK(r.rejected == 1);
  }
  SUBCASE("missing placeholder rejects the record") {
    ParseReport r;
    Dataset bad = parse_dong("i love nlp\nnlp\n1\n", &r);
    CHECK(bad.instances.empty());
    CHECK(r.rejected == 1);
  }
  SUBCASE("trailing partial record is rejected, prior records kept") {
    ParseReport r;
    Dataset d2 = parse_dong("i love $T$\nnlp\n1\nleftover line\nx\n", &r);
    CHECK(d2.instances.size() == 1);
    CHECK(r.rejected == 1);
  }
  SUBCASE("labels map -1/0/1 to NEG/NEU/POS") {
    Dataset d3 = parse_dong("$T$ a\nx\n-1\n$T$ b\nx\n0\n$T$ c\nx\n1\n");
    REQUIRE(d3.instances.size() == 3);
    CHECK(d3.instances[0].label == Label::Negative);
    CHECK(d3.instances[1].label == Label::Neutral);
    CHECK(d3.instances[2].label == Label::Positive);
  }
}

namespace {

const char* kSemevalXml = R"(<?xml version="1.0" encoding="UTF-8"?>
<sentences>
  <sentence id="s1">
    <text>The screen is great but the battery is poor.</text>
    <aspectTerms>
      <aspectTerm term="screen" polarity="positive" from="4" to="10"/>
      <aspectTerm term="battery" polarity="negative" from="28" to="35"/>
    </aspectTerms>
  </sentence>
  <sentence id="s2">
    <text>Nothing to see here.</text>
  </sentence>
  <sentence id="s3">
    <text>The keyboard divides opinions.</text>
    <aspectTerms>
      <aspectTerm term="keyboard" polarity="conflict" from="4" to="12"/>
      <aspectTerm term="keyboard" polarity="neutral" from="0" to="8"/>
    </aspectTerms>
  </sentence>
  <sentence id="s4">
    <text>Service &amp; staff were fine.</text>
    <aspectTerms>
      <aspectTerm term="Service &amp; staff" polarity="positive" from="0" to="15"/>
    </aspectTerms>
  </sentence>
</sentences>
)";

}  // namespace

TEST_CASE("semeval parser reads aspect terms with offsets") {
  ParseReport report;
  Dataset d = parse_semeval(kSemevalXml, &report);
  // s1 contributes 2, s2 none, s3 conflict dropped + offset mismatch rejected,
  // s4 entity-decoded term accepted
  REQUIRE(d.instances.size() == 3);
  CHECK(d.instances[0].target == "screen");
  CHECK(d.instances[0].label == Label::Positive);
  CHECK(d.instances[1].target == "battery");
  CHECK(d.instances[1].label == Label::Negative);
  CHECK(d.instances[2].target == "Service & staff");
  CHECK(report.dropped_conflict == 1);
  CHECK(report.rejected == 1);  // s3 second term offsets point at "The keyb"
  CHECK(report.accepted == 3);

  std::set<std::string> ids;
  for (const auto& i : d.instances) ids.insert(i.id);
  CHECK(ids.size() == d.instances.size());
}

TEST_CASE("semeval parser reports malformed xml with a line") {
  try {
    parse_semeval("<sentences>\n  <sentence>\n", nullptr);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("mitchell parser builds one instance per tagged run") {
  const char* fixture =
      "I\tO\n"
      "love\tO\n"
      "New\tB-positive\n"
      "York\tI-positive\n"
      "!\tO\n";
  ParseReport report;
  Dataset d = parse_mitchell(fixture, &report);
  REQUIRE(d.instances.size() == 1);
  const TargetInstance& i = d.instances[0];
  CHECK(i.text == "I love New York !");
  CHECK(i.target == "New York");
  // span covers both tokens and the joining space
  CHECK(i.spans == std::vector<Span>{{7, 15}});
  CHECK(i.label == Label::Positive);

  SUBCASE("sentence with no tagged entity yields nothing") {
    Dataset empty = parse_mitchell("just\tO\nwords\tO\n");
    CHECK(empty.instances.empty());
  }
  SUBCASE("conflicting sentiments reject the run") {
    ParseReport r;
    Dataset bad = parse_mitchell("New\tB-positive\nYork\tI-negative\n", &r);
    CHECK(bad.instances.empty());
    CHECK(r.rejected == 1);
  }
  SUBCASE("two sentences split on blank lines") {
    Dataset two = parse_mitchell("good\tB-positive\n\nbad\tB-negative\n", nullptr);
    REQUIRE(two.instances.size() == 2);
    CHECK(two.instances[0].label == Label::Positive);
    CHECK(two.instances[1].label == Label::Negative);
  }
}

TEST_CASE("election parser uses only span-annotated records") {
  const char* file =
      R"({"id":"t1","text":"vote for alice not bob","annotations":[)"
      R"({"target":"alice","span":[9,14],"sentiment":"positive"},)"
      R"({"target":"bob","sentiment":"negative"}]})"
      "\n"
      R"({"id":"t2","text":"bob wins","annotations":[{"target":"bob","span":[0,2],"sentiment":"neutral"}]})"
      "\n";
  ParseReport report;
  Dataset d = parse_election({{"f1", file}}, &report);
  REQUIRE(d.instances.size() == 1);  // t2's span text mismatches ("bo" != "bob")
  CHECK(d.instances[0].target == "alice");
  CHECK(report.skipped_no_span == 1);
  CHECK(report.rejected == 1);
  CHECK(report.accepted == 1);

  SUBCASE("empty file set is an empty dataset") {
    Dataset empty = parse_election({});
    CHECK(empty.instances.empty());
  }
  SUBCASE("array-shaped files also parse") {
    ParseReport r;
    Dataset arr = parse_election(
        {{"f",
          R"([{"text":"go alice","annotations":[{"target":"alice","span":[3,8],"sentiment":"positive"}]}])"}},
        &r);
    CHECK(arr.instances.size() == 1);
  }
}

TEST_CASE("youtubean parser locates aspects and flags the spoken medium") {
  const char* json = R"([
    {"sentence": "the camera is nice , camera works",
     "aspects": [{"aspect": "camera", "polarity": "neutral"}]},
    {"sentence": "screen looks sharp",
     "aspects": [{"aspect": "screen", "polarity": "positive", "from": 0, "to": 6}]},
    {"sentence": "no such aspect here",
     "aspects": [{"aspect": "battery", "polarity": "negative"}]}
  ])";
  ParseReport report;
  Dataset d = parse_youtubean(json, &report);
  CHECK(d.spoken);
  REQUIRE(d.instances.size() == 2);
  // both occurrences of the duplicated aspect become spans
  CHECK(d.instances[0].spans == std::vector<Span>{{4, 10}, {21, 27}});
  CHECK(d.instances[0].label == Label::Neutral);
  CHECK(report.multi_occurrence == 1);
  CHECK(report.rejected == 1);
  CHECK(d.instances[1].label == Label::Positive);
}

namespace {

Dataset blobs_dataset(std::size_t neg, std::size_t neu, std::size_t pos) {
  Dataset d;
  d.name = "blobs";
  auto add = [&](Label label, std::size_t count, const char* word) {
    for (std::size_t i = 0; i < count; ++i) {
      std::string id = std::string(word) + std::to_string(i);
      std::string text = "about " + std::string(word) + " " + std::to_string(i);
      d.instances.push_back(
          TargetInstance::make(id, text, word, {{6, 6 + std::string(word).size()}}, label));
    }
  };
  add(Label::Negative, neg, "nword");
  add(Label::Neutral, neu, "uword");
  add(Label::Positive, pos, "pword");
  return d;
}

}  // namespace

TEST_CASE("stratified split hits the exact per-class arithmetic") {
  Dataset d = blobs_dataset(50, 30, 20);
  SplitSpec spec{0.2, 7, true};
  auto [train, test] = make_split(d, spec);
  CHECK(train.instances.size() == 80);
  CHECK(test.instances.size() == 20);

  std::array<std::size_t, 3> per_class{0, 0, 0};
  for (const auto& i : test.instances) ++per_class[static_cast<std::size_t>(i.label)];
  CHECK(per_class[0] == 10);
  CHECK(per_class[1] == 6);
  CHECK(per_class[2] == 4);

  SUBCASE("same inputs produce identical membership") {
    auto [train2, test2] = make_split(d, spec);
    CHECK(train2 == train);
    CHECK(test2 == test);
  }
  SUBCASE("union of the halves is the whole dataset") {
    std::set<std::string> ids;
    for (const auto& i : train.instances) ids.insert(i.id);
    for (const auto& i : test.instances) ids.insert(i.id);
    CHECK(ids.size() == d.instances.size());
  }
  SUBCASE("a single-instance class is an error naming the class") {
    Dataset tiny = blobs_dataset(1, 2, 2);
    try {
      make_split(tiny, {0.5, 1, true});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("negative") != std::string::npos);
    }
  }
}

TEST_CASE("dataset statistics follow the per-sentence definitions") {
  SUBCASE("single instance") {
    Dataset d = blobs_dataset(0, 0, 1);
    DatasetStats s = dataset_stats(d);
    CHECK(s.size == 1);
    CHECK(s.ats == doctest::Approx(1.0));
    CHECK(s.uniq == 1);
    CHECK(s.s1 == doctest::Approx(100.0));
  }
  SUBCASE("two targets in one sentence with two labels") {
    Dataset d;
    d.instances.push_back(
        TargetInstance::make("1", "alice beats bob", "alice", {{0, 5}}, Label::Positive));
    d.instances.push_back(
        TargetInstance::make("2", "alice beats bob", "bob", {{12, 15}}, Label::Negative));
    d.instances.push_back(
        TargetInstance::make("3", "carol naps", "carol", {{0, 5}}, Label::Neutral));
    DatasetStats s = dataset_stats(d);
    CHECK(s.size == 3);
    CHECK(s.ats == doctest::Approx(1.5));
    CHECK(s.uniq == 3);
    CHECK(s.s1 == doctest::Approx(50.0));
    CHECK(s.s2 == doctest::Approx(50.0));
    CHECK(s.s3 == doctest::Approx(0.0));
    CHECK(s.avg_len == doctest::Approx((3.0 + 3.0 + 2.0) / 3.0));
  }
  SUBCASE("stats closure holds on a larger mix") {
    Dataset d = blobs_dataset(13, 7, 23);
    DatasetStats s = dataset_stats(d);
    CHECK(s.s1 + s.s2 + s.s3 == doctest::Approx(100.0).epsilon(0.0001));
    auto sentences = static_cast<double>(s.size) / s.ats;
    CHECK(s.ats * sentences == doctest::Approx(static_cast<double>(s.size)).epsilon(0.005));
  }
  SUBCASE("whitespace-normalized texts count as one sentence") {
    Dataset d;
    d.instances.push_back(
        TargetInstance::make("1", "alice  beats bob", "alice", {{0, 5}}, Label::Positive));
    d.instances.push_back(
        TargetInstance::make("2", "alice beats  bob", "bob", {{13, 16}}, Label::Negative));
    DatasetStats s = dataset_stats(d);
    CHECK(s.ats == doctest::Approx(2.0));
  }
  SUBCASE("empty dataset is an error") { CHECK_THROWS_AS(dataset_stats(Dataset{}), Error); }
}

TEST_CASE("jsonl round trip is the identity on every parser fixture") {
  std::vector<Dataset> fixtures;
  fixtures.push_back(parse_dong("i love $T$\nnlp\n1\n$T$ is ok\nrust\n0\n"));
  fixtures.push_back(parse_semeval(kSemevalXml));
  fixtures.push_back(parse_mitchell("New\tB-positive\nYork\tI-positive\n"));
  fixtures.push_back(blobs_dataset(3, 2, 4));

  for (Dataset& original : fixtures) {
    std::string bytes = write_jsonl(original);
    Dataset back = read_jsonl(bytes, original.name);
    back.spoken = original.spoken;
    CHECK(back == original);
  }

  SUBCASE("empty dataset round trips to an empty file") {
    Dataset empty;
    empty.name = "none";
    CHECK(write_jsonl(empty).empty());
    CHECK(read_jsonl("", "none") == empty);
  }
  SUBCASE("a record missing spans errors with its index") {
    std::string bad =
        R"({"id":"a","text":"x y","target":"x","spans":[[0,1]],"label":"neutral"})"
        "\n"
        R"({"id":"b","text":"x y","target":"x","label":"neutral"})"
        "\n";
    try {
      read_jsonl(bad);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("record 2") != std::string::npos);
    }
  }
  SUBCASE("duplicate ids are rejected") {
    std::string dup =
        R"({"id":"a","text":"x y","target":"x","spans":[[0,1]],"label":"neutral"})"
        "\n"
        R"({"id":"a","text":"x y","target":"x","spans":[[0,1]],"label":"neutral"})"
        "\n";
    CHECK_THROWS_AS(read_jsonl(dup), Error);
  }
}
