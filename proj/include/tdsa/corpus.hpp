#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tdsa {

enum class Label { Negative = 0, Neutral = 1, Positive = 2 };

constexpr const char* kLabelNames[] = {"negative", "neutral", "positive"};

inline const char* label_name(Label l) { return kLabelNames[static_cast<int>(l)]; }
std::optional<Label> label_from_name(std::string_view name);

// Character offsets are Unicode scalar-value indices, end exclusive.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  auto operator<=>(const Span&) const = default;
};

// One sentence/text with one annotated target and a 3-class label. The
// target may occur at several surface positions; every span must match the
// target string case-insensitively. Construct through make(), which enforces
// the span invariants once; instances are immutable afterwards.
struct TargetInstance {
  std::string id;
  std::string text;
  std::string target;
  std::vector<Span> spans;  // sorted ascending, non-overlapping, non-empty
  Label label = Label::Neutral;

  static TargetInstance make(std::string id, std::string text, std::string target,
                             std::vector<Span> spans, Label label);

  bool operator==(const TargetInstance&) const = default;
};

struct Dataset {
  std::string name;
  std::vector<TargetInstance> instances;
  bool spoken = false;  // medium flag (YouTuBean is spoken, everything else written)

  bool operator==(const Dataset&) const = default;
};

// Audit counters; rejected records never abort a parse so full-corpus counts
// stay checkable against published statistics.
struct ParseReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t skipped_no_span = 0;   // election annotations without target spans
  std::size_t dropped_conflict = 0;  // semeval "conflict" polarity terms
  std::size_t multi_occurrence = 0;  // instances whose target matched more than once
  std::vector<std::string> messages;

  void note(std::string msg) { messages.push_back(std::move(msg)); }
};

struct DatasetStats {
  std::size_t size = 0;   // target instances
  double ats = 0.0;       // mean targets per distinct sentence
  std::size_t uniq = 0;   // distinct lowercased target strings
  double avg_len = 0.0;   // mean sentence token count, weighted per target
  double s1 = 0.0;        // % sentences with exactly 1 distinct sentiment
  double s2 = 0.0;
  double s3 = 0.0;
};

struct SplitSpec {
  double test_fraction = 0.2;  // in (0,1)
  std::uint64_t seed = 0;
  bool stratified = true;
};

Dataset parse_semeval(std::string_view xml, ParseReport* report = nullptr,
                      std::string_view id_prefix = {});
Dataset parse_dong(std::string_view text, ParseReport* report = nullptr,
                   std::string_view id_prefix = {});
Dataset parse_mitchell(std::string_view conll, ParseReport* report = nullptr,
                       std::string_view id_prefix = {});
// file_set entries are (name, content); names become id prefixes.
Dataset parse_election(const std::vector<std::pair<std::string, std::string>>& file_set,
                       ParseReport* report = nullptr);
Dataset parse_youtubean(std::string_view json, ParseReport* report = nullptr,
                        std::string_view id_prefix = {});

// Reads `path` (file or directory) and dispatches on format name:
// semeval | dong | mitchell | election | youtubean | jsonl.
Dataset parse_path(std::string_view format, const std::string& path,
                   ParseReport* report = nullptr);

std::pair<Dataset, Dataset> make_split(const Dataset& dataset, const SplitSpec& spec);

DatasetStats dataset_stats(const Dataset& dataset);

std::string write_jsonl(const Dataset& dataset);
void write_jsonl_file(const Dataset& dataset, const std::string& path);
Dataset read_jsonl(std::string_view bytes, std::string_view name = {});
Dataset read_jsonl_file(const std::string& path);

// Normalized sentence key used for the per-sentence statistics: whitespace
// runs collapse to single spaces, ends trimmed.
std::string sentence_key(std::string_view text);

}  // namespace tdsa
