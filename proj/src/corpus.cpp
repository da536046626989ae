#include "tdsa/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "tdsa/rng.hpp"
#include "tdsa/text.hpp"
#include "tdsa/utf8.hpp"
#include "tdsa/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tdsa {

std::optional<Label> label_from_name(std::string_view name) {
  std::string n = to_lower_ascii(trim(name));
  if (n == "negative" || n == "neg") return Label::Negative;
  if (n == "neutral" || n == "neu") return Label::Neutral;
  if (n == "positive" || n == "pos") return Label::Positive;
  return std::nullopt;
}

TargetInstance TargetInstance::make(std::string id, std::string text, std::string target,
                                    std::vector<Span> spans, Label label) {
  if (id.empty()) fail(Errc::parse, "instance id must not be empty");
  if (spans.empty()) fail(Errc::parse, "instance " + id + ": no target spans");
  std::u32string cps = utf8::decode(text);
  std::u32string want = utf8::lower(utf8::decode(target));
  if (want.empty()) fail(Errc::parse, "instance " + id + ": empty target");
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const Span& s = spans[k];
    if (s.start >= s.end || s.end > cps.size())
      fail(Errc::parse, "instance " + id + ": span out of bounds");
    if (k > 0 && spans[k - 1].end > s.start)
      fail(Errc::parse, "instance " + id + ": spans overlap or are unsorted");
    std::u32string got = utf8::lower(std::u32string_view(cps).substr(s.start, s.end - s.start));
    if (got != want)
      fail(Errc::parse, "instance " + id + ": span text '" + utf8::encode(got) +
                            "' does not match target '" + target + "'");
  }
  TargetInstance inst;
  inst.id = std::move(id);
  inst.text = std::move(text);
  inst.target = std::move(target);
  inst.spans = std::move(spans);
  inst.label = label;
  return inst;
}

namespace {

ParseReport& rep(ParseReport* r) {
  thread_local ParseReport discard;
  if (r) return *r;
  discard = ParseReport{};
  return discard;
}

// ---------------------------------------------------------------------------
// Minimal XML reader, sufficient for the SemEval ABSA files: elements,
// attributes, character data, comments, CDATA and the five named entities.
// ---------------------------------------------------------------------------

struct XmlNode {
  std::string name;
  std::map<std::string, std::string> attrs;
  std::vector<XmlNode> children;
  std::string text;

  const XmlNode* child(std::string_view tag) const {
    for (const auto& c : children)
      if (c.name == tag) return &c;
    return nullptr;
  }
};

class XmlParser {
 public:
  explicit XmlParser(std::string_view src) : src_(src) {}

  XmlNode parse_document() {
    skip_misc();
    if (eof()) err("no root element");
    XmlNode root = parse_element();
    skip_misc();
    if (!eof()) err("trailing content after root element");
    return root;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  bool eof() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  bool has(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  [[noreturn]] void err(const std::string& msg) const {
    std::size_t line = 1 + static_cast<std::size_t>(
                               std::count(src_.begin(), src_.begin() + static_cast<long>(pos_), '\n'));
    fail(Errc::parse, "xml: " + msg + " (line " + std::to_string(line) + ")");
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n')) ++pos_;
  }

  void skip_misc() {
    while (true) {
      skip_ws();
      if (has("<?")) {
        std::size_t end = src_.find("?>", pos_);
        if (end == std::string_view::npos) err("unterminated processing instruction");
        pos_ = end + 2;
      } else if (has("<!--")) {
        std::size_t end = src_.find("-->", pos_);
        if (end == std::string_view::npos) err("unterminated comment");
        pos_ = end + 3;
      } else if (has("<!")) {  // doctype
        std::size_t end = src_.find('>', pos_);
        if (end == std::string_view::npos) err("unterminated declaration");
        pos_ = end + 1;
      } else {
        break;
      }
    }
  }

  static bool name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-' || c == '.' || c == ':';
  }

  std::string parse_name() {
    std::size_t start = pos_;
    while (!eof() && name_char(peek())) ++pos_;
    if (pos_ == start) err("expected name");
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
      if (raw[i] != '&') {
        out.push_back(raw[i++]);
        continue;
      }
      std::size_t semi = raw.find(';', i);
      if (semi == std::string_view::npos) err("unterminated entity");
      std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "amp")
        out.push_back('&');
      else if (ent == "lt")
        out.push_back('<');
      else if (ent == "gt")
        out.push_back('>');
      else if (ent == "quot")
        out.push_back('"');
      else if (ent == "apos")
        out.push_back('\'');
      else if (!ent.empty() && ent[0] == '#') {
        long long cp = 0;
        bool ok;
        if (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X')) {
          ok = ent.size() > 2;
          for (std::size_t k = 2; ok && k < ent.size(); ++k) {
            char c = ent[k];
            int d = c >= '0' && c <= '9'   ? c - '0'
                    : c >= 'a' && c <= 'f' ? c - 'a' + 10
                    : c >= 'A' && c <= 'F' ? c - 'A' + 10
                                           : -1;
            if (d < 0)
              ok = false;
            else
              cp = cp * 16 + d;
          }
        } else {
          ok = parse_int(ent.substr(1), cp);
        }
        if (!ok || cp < 0 || cp > 0x10FFFF) err("bad character reference");
        out += utf8::encode_cp(static_cast<char32_t>(cp));
      } else {
        err("unknown entity '" + std::string(ent) + "'");
      }
      i = semi + 1;
    }
    return out;
  }

  XmlNode parse_element() {
    if (eof() || peek() != '<') err("expected '<'");
    ++pos_;
    XmlNode node;
    node.name = parse_name();
    while (true) {
      skip_ws();
      if (eof()) err("unterminated start tag");
      if (has("/>")) {
        pos_ += 2;
        return node;
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      std::string key = parse_name();
      skip_ws();
      if (eof() || peek() != '=') err("expected '=' in attribute");
      ++pos_;
      skip_ws();
      if (eof() || (peek() != '"' && peek() != '\'')) err("expected quoted attribute value");
      char quote = peek();
      ++pos_;
      std::size_t start = pos_;
      while (!eof() && peek() != quote) ++pos_;
      if (eof()) err("unterminated attribute value");
      node.attrs[key] = decode_entities(src_.substr(start, pos_ - start));
      ++pos_;
    }
    // content
    while (true) {
      if (eof()) err("unterminated element <" + node.name + ">");
      if (has("<!--")) {
        std::size_t end = src_.find("-->", pos_);
        if (end == std::string_view::npos) err("unterminated comment");
        pos_ = end + 3;
      } else if (has("<![CDATA[")) {
        std::size_t end = src_.find("]]>", pos_);
        if (end == std::string_view::npos) err("unterminated CDATA");
        node.text += src_.substr(pos_ + 9, end - pos_ - 9);
        pos_ = end + 3;
      } else if (has("</")) {
        pos_ += 2;
        std::string closing = parse_name();
        if (closing != node.name) err("mismatched </" + closing + "> for <" + node.name + ">");
        skip_ws();
        if (eof() || peek() != '>') err("expected '>' after end tag");
        ++pos_;
        return node;
      } else if (peek() == '<') {
        node.children.push_back(parse_element());
      } else {
        std::size_t start = pos_;
        while (!eof() && peek() != '<') ++pos_;
        node.text += decode_entities(src_.substr(start, pos_ - start));
      }
    }
  }
};

std::string run_id(std::string_view prefix, std::string_view stem, std::size_t n) {
  std::string out(prefix);
  out += stem;
  out += '-';
  out += std::to_string(n);
  return out;
}

}  // namespace

Dataset parse_semeval(std::string_view xml, ParseReport* report, std::string_view id_prefix) {
  ParseReport& r = rep(report);
  XmlNode root = XmlParser(xml).parse_document();
  Dataset out;
  out.name = "semeval";

  std::vector<const XmlNode*> sentences;
  if (root.name == "sentence") {
    sentences.push_back(&root);
  } else {
    for (const auto& c : root.children)
      if (c.name == "sentence") sentences.push_back(&c);
  }

  std::size_t sent_n = 0;
  for (const XmlNode* sentence : sentences) {
    ++sent_n;
    const XmlNode* text_node = sentence->child("text");
    if (!text_node) {
      ++r.rejected;
      r.note("semeval: sentence without <text>");
      continue;
    }
    const std::string& text = text_node->text;
    std::string sent_id = sentence->attrs.count("id") ? sentence->attrs.at("id")
                                                      : std::to_string(sent_n);
    const XmlNode* terms = sentence->child("aspectTerms");
    if (!terms) continue;  // sentence with zero aspect terms contributes nothing
    std::size_t term_n = 0;
    for (const auto& term : terms->children) {
      if (term.name != "aspectTerm") continue;
      ++term_n;
      std::string id = std::string(id_prefix) + sent_id + ":" + std::to_string(term_n);
      auto it_term = term.attrs.find("term");
      auto it_pol = term.attrs.find("polarity");
      auto it_from = term.attrs.find("from");
      auto it_to = term.attrs.find("to");
      if (it_term == term.attrs.end() || it_pol == term.attrs.end() ||
          it_from == term.attrs.end() || it_to == term.attrs.end()) {
        ++r.rejected;
        r.note("semeval " + id + ": missing aspectTerm attributes");
        continue;
      }
      if (it_pol->second == "conflict") {
        ++r.dropped_conflict;
        continue;
      }
      auto label = label_from_name(it_pol->second);
      if (!label) {
        ++r.rejected;
        r.note("semeval " + id + ": unknown polarity '" + it_pol->second + "'");
        continue;
      }
      long long from = 0, to = 0;
      if (!parse_int(it_from->second, from) || !parse_int(it_to->second, to) || from < 0 ||
          to <= from) {
        ++r.rejected;
        r.note("semeval " + id + ": bad offsets");
        continue;
      }
      try {
        out.instances.push_back(TargetInstance::make(
            id, text, it_term->second,
            {{static_cast<std::size_t>(from), static_cast<std::size_t>(to)}}, *label));
        ++r.accepted;
      } catch (const Error& e) {
        ++r.rejected;
        r.note(std::string("semeval: ") + e.what());
      }
    }
  }
  return out;
}

Dataset parse_dong(std::string_view text, ParseReport* report, std::string_view id_prefix) {
  ParseReport& r = rep(report);
  std::vector<std::string_view> lines = split_lines(text);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

  Dataset out;
  out.name = "dong";
  constexpr std::string_view kPlaceholder = "$T$";

  const std::size_t full_records = lines.size() / 3;
  for (std::size_t rec = 0; rec < full_records; ++rec) {
    const std::size_t i = rec * 3;
    std::string id = run_id(id_prefix, "dong", rec + 1);
    std::string sentence(lines[i]);
    std::string target(trim(lines[i + 1]));
    std::string_view label_str = trim(lines[i + 2]);

    Label label;
    if (label_str == "-1")
      label = Label::Negative;
    else if (label_str == "0")
      label = Label::Neutral;
    else if (label_str == "1")
      label = Label::Positive;
    else {
      ++r.rejected;
      r.note(id + ": label '" + std::string(label_str) + "' outside {-1,0,1}");
      continue;
    }

    std::size_t ph = sentence.find(kPlaceholder);
    if (ph == std::string::npos) {
      ++r.rejected;
      r.note(id + ": missing $T$ placeholder");
      continue;
    }
    if (sentence.find(kPlaceholder, ph + kPlaceholder.size()) != std::string::npos) {
      ++r.rejected;
      r.note(id + ": more than one $T$ placeholder");
      continue;
    }
    if (target.empty()) {
      ++r.rejected;
      r.note(id + ": empty target");
      continue;
    }

    std::string full = sentence.substr(0, ph) + target + sentence.substr(ph + kPlaceholder.size());
    std::size_t start = utf8::count(std::string_view(sentence).substr(0, ph));
    std::size_t len = utf8::count(target);
    try {
      out.instances.push_back(
          TargetInstance::make(id, full, target, {{start, start + len}}, label));
      ++r.accepted;
    } catch (const Error& e) {
      ++r.rejected;
      r.note(std::string("dong: ") + e.what());
    }
  }
  if (lines.size() % 3 != 0) {
    ++r.rejected;
    r.note("dong: trailing partial record (" + std::to_string(lines.size() % 3) + " lines)");
  }
  return out;
}

Dataset parse_mitchell(std::string_view conll, ParseReport* report, std::string_view id_prefix) {
  ParseReport& r = rep(report);
  Dataset out;
  out.name = "mitchell";

  struct Run {
    std::size_t first_token = 0;
    std::size_t last_token = 0;
    std::string sentiment;
    bool conflict = false;
  };

  std::vector<std::string> tokens;
  std::size_t sent_n = 0;

  auto flush_sentence = [&](std::vector<std::string>& toks, std::vector<Run>& runs) {
    if (toks.empty()) return;
    ++sent_n;
    // Detokenize with single spaces; spans are then derivable from token
    // indices alone.
    std::string text;
    std::vector<std::size_t> starts(toks.size());
    std::size_t cp = 0;
    for (std::size_t t = 0; t < toks.size(); ++t) {
      if (t > 0) {
        text += ' ';
        ++cp;
      }
      starts[t] = cp;
      text += toks[t];
      cp += utf8::count(toks[t]);
    }
    std::size_t run_n = 0;
    for (const Run& run : runs) {
      ++run_n;
      std::string id =
          run_id(id_prefix, "mitchell", sent_n) + ":" + std::to_string(run_n);
      if (run.conflict) {
        ++r.rejected;
        r.note(id + ": tag run with conflicting sentiments");
        continue;
      }
      auto label = label_from_name(run.sentiment);
      if (!label) {
        ++r.rejected;
        r.note(id + ": unknown sentiment '" + run.sentiment + "'");
        continue;
      }
      std::string target;
      for (std::size_t t = run.first_token; t <= run.last_token; ++t) {
        if (t > run.first_token) target += ' ';
        target += toks[t];
      }
      std::size_t start = starts[run.first_token];
      std::size_t end = starts[run.last_token] + utf8::count(toks[run.last_token]);
      try {
        out.instances.push_back(TargetInstance::make(id, text, target, {{start, end}}, *label));
        ++r.accepted;
      } catch (const Error& e) {
        ++r.rejected;
        r.note(std::string("mitchell: ") + e.what());
      }
    }
    toks.clear();
    runs.clear();
  };

  std::vector<Run> runs;
  bool in_run = false;
  for (std::string_view line : split_lines(conll)) {
    std::string_view t = trim(line);
    if (t.empty()) {
      in_run = false;
      flush_sentence(tokens, runs);
      continue;
    }
    std::vector<std::string_view> fields = split_ws(t);
    if (fields.size() < 2) {
      ++r.rejected;
      r.note("mitchell: malformed line '" + std::string(t) + "'");
      in_run = false;
      continue;
    }
    std::string token(fields[0]);
    std::string tag = to_lower_ascii(fields[1]);
    tokens.push_back(token);
    std::size_t idx = tokens.size() - 1;
    if (tag == "o" || tag == "_" || tag == "-") {
      in_run = false;
      continue;
    }
    bool begins = tag.starts_with("b-");
    bool inside = tag.starts_with("i-");
    if (!begins && !inside) {
      ++r.rejected;
      r.note("mitchell: unknown tag '" + tag + "'");
      in_run = false;
      continue;
    }
    std::string sentiment = tag.substr(2);
    if (begins || !in_run) {
      runs.push_back({idx, idx, sentiment, false});
      in_run = true;
    } else {
      runs.back().last_token = idx;
      if (runs.back().sentiment != sentiment) runs.back().conflict = true;
    }
  }
  flush_sentence(tokens, runs);
  return out;
}

namespace {

void parse_election_record(const json& record, std::size_t n, std::string_view file_prefix,
                           Dataset& out, ParseReport& r) {
  if (!record.is_object() || !record.contains("text") || !record["text"].is_string()) {
    ++r.rejected;
    r.note("election: record " + std::to_string(n) + " has no text field");
    return;
  }
  std::string text = record["text"].get<std::string>();
  std::string rid = record.contains("id") && record["id"].is_string()
                        ? record["id"].get<std::string>()
                        : "election-" + std::to_string(n);
  rid = std::string(file_prefix) + rid;
  if (!record.contains("annotations") || !record["annotations"].is_array()) {
    ++r.rejected;
    r.note("election " + rid + ": no annotations array");
    return;
  }
  std::size_t k = 0;
  for (const json& ann : record["annotations"]) {
    ++k;
    std::string id = rid + ":" + std::to_string(k);
    if (!ann.is_object() || !ann.contains("target") || !ann.contains("sentiment")) {
      ++r.rejected;
      r.note(id + ": malformed annotation");
      continue;
    }
    if (!ann.contains("span")) {
      // The unusable half of the corpus: annotated without spans.
      ++r.skipped_no_span;
      continue;
    }
    auto label = label_from_name(ann["sentiment"].get<std::string>());
    if (!label) {
      ++r.rejected;
      r.note(id + ": unknown sentiment");
      continue;
    }
    const json& span = ann["span"];
    if (!span.is_array() || span.size() != 2 || !span[0].is_number_unsigned() ||
        !span[1].is_number_unsigned()) {
      ++r.rejected;
      r.note(id + ": malformed span");
      continue;
    }
    try {
      out.instances.push_back(TargetInstance::make(
          id, text, ann["target"].get<std::string>(),
          {{span[0].get<std::size_t>(), span[1].get<std::size_t>()}}, *label));
      ++r.accepted;
    } catch (const Error& e) {
      ++r.rejected;
      r.note(std::string("election: ") + e.what());
    }
  }
}

}  // namespace

Dataset parse_election(const std::vector<std::pair<std::string, std::string>>& file_set,
                       ParseReport* report) {
  ParseReport& r = rep(report);
  Dataset out;
  out.name = "election";
  for (const auto& [name, content] : file_set) {
    std::string prefix = file_set.size() > 1 ? name + ":" : std::string();
    std::string_view body = trim(content);
    std::size_t n = 0;
    if (!body.empty() && body.front() == '[') {
      json arr = json::parse(body, nullptr, false);
      if (arr.is_discarded() || !arr.is_array()) {
        ++r.rejected;
        r.note("election: " + name + " is not valid JSON");
        continue;
      }
      for (const json& record : arr) parse_election_record(record, ++n, prefix, out, r);
    } else {
      for (std::string_view line : split_lines(content)) {
        if (trim(line).empty()) continue;
        ++n;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded()) {
          ++r.rejected;
          r.note("election: " + name + " record " + std::to_string(n) + " is not valid JSON");
          continue;
        }
        parse_election_record(record, n, prefix, out, r);
      }
    }
  }
  return out;
}

Dataset parse_youtubean(std::string_view json_bytes, ParseReport* report,
                        std::string_view id_prefix) {
  ParseReport& r = rep(report);
  Dataset out;
  out.name = "youtubean";
  out.spoken = true;

  json doc = json::parse(json_bytes, nullptr, false);
  if (doc.is_discarded()) fail(Errc::parse, "youtubean: invalid JSON");
  if (!doc.is_array()) fail(Errc::parse, "youtubean: expected a top-level array");

  std::size_t n = 0;
  for (const json& record : doc) {
    ++n;
    if (!record.is_object() || !record.contains("sentence") || !record["sentence"].is_string()) {
      ++r.rejected;
      r.note("youtubean: record " + std::to_string(n) + " has no sentence");
      continue;
    }
    std::string sentence = record["sentence"].get<std::string>();
    if (!record.contains("aspects") || !record["aspects"].is_array()) continue;
    std::u32string sent_cps = utf8::decode(sentence);
    std::u32string sent_lower = utf8::lower(sent_cps);
    std::size_t k = 0;
    for (const json& aspect : record["aspects"]) {
      ++k;
      std::string id = run_id(id_prefix, "yt", n) + ":" + std::to_string(k);
      if (!aspect.is_object() || !aspect.contains("aspect") || !aspect.contains("polarity")) {
        ++r.rejected;
        r.note(id + ": malformed aspect");
        continue;
      }
      std::string term = aspect["aspect"].get<std::string>();
      auto label = label_from_name(aspect["polarity"].get<std::string>());
      if (!label) {
        ++r.rejected;
        r.note(id + ": unknown polarity");
        continue;
      }
      std::vector<Span> spans;
      if (aspect.contains("from") && aspect.contains("to")) {
        spans.push_back({aspect["from"].get<std::size_t>(), aspect["to"].get<std::size_t>()});
      } else {
        // No offsets: every non-overlapping case-insensitive match becomes a
        // span, mirroring the multi-occurrence handling downstream.
        std::u32string needle = utf8::lower(utf8::decode(term));
        if (!needle.empty()) {
          std::size_t from = 0;
          while (true) {
            std::size_t at = sent_lower.find(needle, from);
            if (at == std::u32string::npos) break;
            spans.push_back({at, at + needle.size()});
            from = at + needle.size();
          }
        }
        if (spans.empty()) {
          ++r.rejected;
          r.note(id + ": aspect '" + term + "' not found in sentence");
          continue;
        }
        if (spans.size() > 1) ++r.multi_occurrence;
      }
      try {
        out.instances.push_back(TargetInstance::make(id, sentence, term, std::move(spans), *label));
        ++r.accepted;
      } catch (const Error& e) {
        ++r.rejected;
        r.note(std::string("youtubean: ") + e.what());
      }
    }
  }
  return out;
}

namespace {

std::vector<std::pair<std::string, std::string>> collect_files(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> files;
  fs::path p(path);
  if (fs::is_directory(p)) {
    std::vector<fs::path> entries;
    for (const auto& entry : fs::directory_iterator(p))
      if (entry.is_regular_file()) entries.push_back(entry.path());
    std::sort(entries.begin(), entries.end());
    for (const auto& e : entries) files.emplace_back(e.stem().string(), read_file(e.string()));
  } else {
    files.emplace_back(p.stem().string(), read_file(path));
  }
  if (files.empty()) fail(Errc::io, "no input files under " + path);
  return files;
}

}  // namespace

Dataset parse_path(std::string_view format, const std::string& path, ParseReport* report) {
  std::string fmt = to_lower_ascii(trim(format));
  if (fmt == "jsonl") return read_jsonl_file(path);
  if (fmt == "election") {
    Dataset d = parse_election(collect_files(path), report);
    d.name = fs::path(path).stem().string();
    return d;
  }

  auto files = collect_files(path);
  Dataset merged;
  merged.name = fs::path(path).stem().string();
  for (const auto& [stem, content] : files) {
    std::string prefix = files.size() > 1 ? stem + ":" : std::string();
    Dataset part;
    if (fmt == "semeval")
      part = parse_semeval(content, report, prefix);
    else if (fmt == "dong")
      part = parse_dong(content, report, prefix);
    else if (fmt == "mitchell")
      part = parse_mitchell(content, report, prefix);
    else if (fmt == "youtubean")
      part = parse_youtubean(content, report, prefix);
    else
      fail(Errc::invalid_argument, "unknown dataset format: " + std::string(format));
    merged.spoken = merged.spoken || part.spoken;
    for (auto& inst : part.instances) merged.instances.push_back(std::move(inst));
  }
  return merged;
}

std::pair<Dataset, Dataset> make_split(const Dataset& dataset, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    fail(Errc::invalid_argument, "test_fraction must be in (0,1)");

  std::vector<std::vector<std::size_t>> by_class(3);
  for (std::size_t i = 0; i < dataset.instances.size(); ++i)
    by_class[static_cast<std::size_t>(dataset.instances[i].label)].push_back(i);

  for (std::size_t c = 0; c < 3; ++c) {
    if (by_class[c].size() == 1)
      fail(Errc::invalid_argument, std::string("class ") + kLabelNames[c] +
                                       " has a single instance; cannot split");
  }

  Rng rng(spec.seed);
  std::vector<bool> in_test(dataset.instances.size(), false);

  if (spec.stratified) {
    for (std::size_t c = 0; c < 3; ++c) {
      auto& idx = by_class[c];
      if (idx.empty()) continue;
      rng.shuffle(idx);
      auto want = static_cast<std::size_t>(
          std::llround(spec.test_fraction * static_cast<double>(idx.size())));
      want = std::max<std::size_t>(1, std::min(want, idx.size() - 1));
      for (std::size_t k = 0; k < want; ++k) in_test[idx[k]] = true;
    }
  } else {
    std::vector<std::size_t> idx(dataset.instances.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    auto want = static_cast<std::size_t>(
        std::llround(spec.test_fraction * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < want && k < idx.size(); ++k) in_test[idx[k]] = true;
  }

  Dataset train, test;
  train.name = dataset.name + "-train";
  test.name = dataset.name + "-test";
  train.spoken = test.spoken = dataset.spoken;
  for (std::size_t i = 0; i < dataset.instances.size(); ++i)
    (in_test[i] ? test : train).instances.push_back(dataset.instances[i]);
  return {std::move(train), std::move(test)};
}

std::string sentence_key(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      if (!out.empty()) pending_space = true;
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

DatasetStats dataset_stats(const Dataset& dataset) {
  if (dataset.instances.empty()) fail(Errc::invalid_argument, "dataset_stats: empty dataset");

  struct SentenceInfo {
    std::set<Label> labels;
  };
  std::map<std::string, SentenceInfo> sentences;
  std::unordered_set<std::string> targets;
  double token_sum = 0.0;
  std::unordered_map<std::string, std::size_t> token_count_cache;

  for (const auto& inst : dataset.instances) {
    std::string key = sentence_key(inst.text);
    sentences[key].labels.insert(inst.label);
    targets.insert(to_lower_ascii(inst.target));
    auto it = token_count_cache.find(key);
    if (it == token_count_cache.end())
      it = token_count_cache.emplace(key, tokenize(inst.text).size()).first;
    token_sum += static_cast<double>(it->second);
  }

  DatasetStats stats;
  stats.size = dataset.instances.size();
  stats.uniq = targets.size();
  auto n_sent = static_cast<double>(sentences.size());
  stats.ats = static_cast<double>(stats.size) / n_sent;
  stats.avg_len = token_sum / static_cast<double>(stats.size);
  std::size_t c1 = 0, c2 = 0, c3 = 0;
  for (const auto& [key, info] : sentences) {
    if (info.labels.size() == 1)
      ++c1;
    else if (info.labels.size() == 2)
      ++c2;
    else
      ++c3;
  }
  stats.s1 = 100.0 * static_cast<double>(c1) / n_sent;
  stats.s2 = 100.0 * static_cast<double>(c2) / n_sent;
  stats.s3 = 100.0 * static_cast<double>(c3) / n_sent;
  return stats;
}

std::string write_jsonl(const Dataset& dataset) {
  std::string out;
  for (const auto& inst : dataset.instances) {
    json spans = json::array();
    for (const Span& s : inst.spans) spans.push_back({s.start, s.end});
    json obj = {{"id", inst.id},
                {"text", inst.text},
                {"target", inst.target},
                {"spans", spans},
                {"label", label_name(inst.label)}};
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void write_jsonl_file(const Dataset& dataset, const std::string& path) {
  write_file(path, write_jsonl(dataset));
}

Dataset read_jsonl(std::string_view bytes, std::string_view name) {
  Dataset out;
  out.name = std::string(name);
  std::unordered_set<std::string> seen_ids;
  std::size_t line_n = 0;
  for (std::string_view line : split_lines(bytes)) {
    ++line_n;
    if (trim(line).empty()) continue;
    auto where = [&] { return " (record " + std::to_string(line_n) + ")"; };
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
      fail(Errc::parse, "jsonl: invalid JSON" + where());
    for (const char* key : {"id", "text", "target", "spans", "label"})
      if (!obj.contains(key)) fail(Errc::parse, std::string("jsonl: missing '") + key + "'" + where());
    if (!obj["id"].is_string() || !obj["text"].is_string() || !obj["target"].is_string() ||
        !obj["spans"].is_array() || !obj["label"].is_string())
      fail(Errc::parse, "jsonl: field with wrong type" + where());
    auto label = label_from_name(obj["label"].get<std::string>());
    if (!label) fail(Errc::parse, "jsonl: unknown label" + where());
    std::vector<Span> spans;
    for (const json& s : obj["spans"]) {
      if (!s.is_array() || s.size() != 2 || !s[0].is_number_unsigned() ||
          !s[1].is_number_unsigned())
        fail(Errc::parse, "jsonl: malformed span" + where());
      spans.push_back({s[0].get<std::size_t>(), s[1].get<std::size_t>()});
    }
    try {
      out.instances.push_back(TargetInstance::make(obj["id"].get<std::string>(),
                                                   obj["text"].get<std::string>(),
                                                   obj["target"].get<std::string>(),
                                                   std::move(spans), *label));
    } catch (const Error& e) {
      fail(Errc::parse, std::string("jsonl: ") + e.what() + where());
    }
    if (!seen_ids.insert(out.instances.back().id).second)
      fail(Errc::parse, "jsonl: duplicate id '" + out.instances.back().id + "'" + where());
  }
  return out;
}

Dataset read_jsonl_file(const std::string& path) {
  Dataset d = read_jsonl(read_file(path), fs::path(path).stem().string());
  return d;
}

}  // namespace tdsa
