// tdsa command-line tool. Talks to the library exclusively through the C API
// in tdsa.h, the same surface other language bindings would use.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdsa.h"

namespace fs = std::filesystem;

namespace {

int die(tdsa_status status) {
  std::fprintf(stderr, "error: %s\n", tdsa_last_error());
  return static_cast<int>(status);
}

void print_and_free(char* s) {
  if (!s) return;
  std::fputs(s, stdout);
  tdsa_string_free(s);
}

std::vector<const char*> as_cstrs(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  out.reserve(v.size());
  for (const std::string& s : v) out.push_back(s.c_str());
  return out;
}

// Minimal glob: '*' wildcards within one path segment of the filename part.
bool glob_match(const std::string& pattern, const std::string& name) {
  std::size_t p = 0, n = 0, star = std::string::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  fs::path pat(pattern);
  fs::path dir = pat.parent_path();
  if (dir.empty()) dir = ".";
  std::string name_pattern = pat.filename().string();
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (glob_match(name_pattern, entry.path().filename().string()))
      out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string toml_string_array(const std::string& csv) {
  std::string out = "[";
  std::size_t pos = 0;
  bool first = true;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string item =
        comma == std::string::npos ? csv.substr(pos) : csv.substr(pos, comma - pos);
    if (!item.empty()) {
      if (!first) out += ", ";
      out += '"' + item + '"';
      first = false;
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out + "]";
}

std::string toml_number_array(const std::string& csv) {
  std::string out = "[";
  std::size_t pos = 0;
  bool first = true;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string item =
        comma == std::string::npos ? csv.substr(pos) : csv.substr(pos, comma - pos);
    if (!item.empty()) {
      if (!first) out += ", ";
      out += item;
      first = false;
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out + "]";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Target-dependent sentiment analysis benchmark framework"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("tdsa ") + tdsa_version());

  // parse
  auto* parse_cmd = app.add_subcommand("parse", "Parse a source corpus into canonical JSONL");
  std::string parse_format, parse_in, parse_out;
  parse_cmd->add_option("--format", parse_format, "semeval|dong|mitchell|election|youtubean")
      ->required();
  parse_cmd->add_option("--in", parse_in, "input file or directory")->required();
  parse_cmd->add_option("--out", parse_out, "output .jsonl path")->required();

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Dataset statistics for a JSONL corpus");
  std::string stats_in, stats_store;
  stats_cmd->add_option("--in", stats_in, "canonical .jsonl file")->required();
  stats_cmd->add_option("--store", stats_store, "results dir to persist the stats record");

  // tokenize
  auto* tok_cmd = app.add_subcommand("tokenize", "Add token arrays to a JSONL corpus");
  std::string tok_in, tok_out;
  tok_cmd->add_option("--in", tok_in)->required();
  tok_cmd->add_option("--out", tok_out)->required();

  // lexicon-stats
  auto* lex_cmd = app.add_subcommand("lexicon-stats", "Word-count audit of configured lexicons");
  std::string lex_config, lex_store;
  lex_cmd->add_option("--config", lex_config, "TOML config with [lexicons] paths")->required();
  lex_cmd->add_option("--store", lex_store, "results dir to persist the record");

  // embed-info
  auto* emb_cmd = app.add_subcommand("embed-info", "Describe a configured embedding");
  std::string emb_config, emb_name;
  emb_cmd->add_option("--config", emb_config)->required();
  emb_cmd->add_option("--name", emb_name, "embedding name under [embeddings.<name>]")->required();

  // features
  auto* feat_cmd = app.add_subcommand("features", "Extract pooled features to a binary file");
  std::string feat_config, feat_method, feat_lexicon, feat_embeddings, feat_in, feat_conll,
      feat_out;
  feat_cmd->add_option("--config", feat_config)->required();
  feat_cmd->add_option("--method", feat_method, "pooling method family");
  feat_cmd->add_option("--lexicon", feat_lexicon, "lexicon selector, e.g. hl or mpqa,hl");
  feat_cmd->add_option("--embeddings", feat_embeddings, "comma-separated embedding names");
  feat_cmd->add_option("--in", feat_in, "canonical .jsonl file")->required();
  feat_cmd->add_option("--conll", feat_conll, "CoNLL-U parses, one block per instance");
  feat_cmd->add_option("--out", feat_out, "output .bin path ( .json sidecar added)")->required();

  // train-svm / run / train-lstm share config + overrides
  auto* svm_cmd = app.add_subcommand("train-svm", "Train the linear SVM route and report metrics");
  std::string svm_config, svm_model_out, svm_store;
  std::vector<std::string> svm_sets;
  svm_cmd->add_option("--config", svm_config)->required();
  svm_cmd->add_option("--model-out", svm_model_out, "where to save the trained model");
  svm_cmd->add_option("--store", svm_store);
  svm_cmd->add_option("--set", svm_sets, "config override key=value");

  auto* cv_cmd = app.add_subcommand("cv", "Cross-validated C selection");
  std::string cv_config, cv_grid;
  std::size_t cv_folds = 0;
  std::vector<std::string> cv_sets;
  cv_cmd->add_option("--config", cv_config)->required();
  cv_cmd->add_option("--grid", cv_grid, "comma-separated C grid");
  cv_cmd->add_option("--folds", cv_folds, "fold count (default 5)");
  cv_cmd->add_option("--set", cv_sets, "config override key=value");

  auto* lstm_cmd = app.add_subcommand("train-lstm", "Train an LSTM route and report metrics");
  std::string lstm_config, lstm_arch, lstm_store, lstm_model_out;
  std::vector<std::string> lstm_sets;
  lstm_cmd->add_option("--config", lstm_config)->required();
  lstm_cmd->add_option("--arch", lstm_arch, "lstm|tdlstm|tclstm");
  lstm_cmd->add_option("--model-out", lstm_model_out);
  lstm_cmd->add_option("--store", lstm_store);
  lstm_cmd->add_option("--set", lstm_sets, "config override key=value");

  auto* seed_cmd = app.add_subcommand("multiseed", "Seed-distribution study for an LSTM route");
  std::string seed_config, seed_out, seed_store, seed_list;
  std::size_t seed_count = 0;
  std::vector<std::string> seed_sets;
  seed_cmd->add_option("--config", seed_config)->required();
  seed_cmd->add_option("--seeds", seed_count, "number of seeds (1..N)");
  seed_cmd->add_option("--seed-list", seed_list, "explicit comma-separated seed values");
  seed_cmd->add_option("--out", seed_out, "distribution JSON output path");
  seed_cmd->add_option("--store", seed_store);
  seed_cmd->add_option("--set", seed_sets, "config override key=value");

  auto* run_cmd = app.add_subcommand("run", "Run one experiment config end to end");
  std::string run_config, run_store;
  std::vector<std::string> run_sets;
  run_cmd->add_option("--config", run_config)->required();
  run_cmd->add_option("--store", run_store, "results dir (content-addressed record files)");
  run_cmd->add_option("--set", run_sets, "config override key=value");

  auto* report_cmd = app.add_subcommand("report", "Summarize stored records into a table shape");
  std::string report_shape, report_glob;
  std::vector<std::string> report_paths;
  bool report_json = false;
  report_cmd->add_option("--shape", report_shape, "table2|table3|table4|table5|table6|fig_dist")
      ->required();
  report_cmd->add_option("--glob", report_glob, "glob for record files, e.g. 'results/*.json'");
  report_cmd->add_option("paths", report_paths, "record files");
  report_cmd->add_flag("--json", report_json, "print the JSON form instead of the table");

  CLI11_PARSE(app, argc, argv);

  if (parse_cmd->parsed()) {
    tdsa_parse_counts counts{};
    tdsa_dataset* dataset = nullptr;
    tdsa_status status = tdsa_dataset_parse(parse_format.c_str(), parse_in.c_str(), &counts,
                                            &dataset);
    if (status != TDSA_OK) return die(status);
    status = tdsa_dataset_write_jsonl(dataset, parse_out.c_str());
    std::size_t size = tdsa_dataset_size(dataset);
    tdsa_dataset_free(dataset);
    if (status != TDSA_OK) return die(status);
    std::printf("wrote %zu instances to %s\n", size, parse_out.c_str());
    std::printf("accepted=%zu rejected=%zu skipped_no_span=%zu dropped_conflict=%zu\n",
                counts.accepted, counts.rejected, counts.skipped_no_span,
                counts.dropped_conflict);
    return 0;
  }

  if (stats_cmd->parsed()) {
    tdsa_dataset* dataset = nullptr;
    tdsa_status status = tdsa_dataset_read_jsonl(stats_in.c_str(), &dataset);
    if (status != TDSA_OK) return die(status);
    tdsa_stats stats{};
    status = tdsa_dataset_stats(dataset, &stats);
    if (status != TDSA_OK) {
      tdsa_dataset_free(dataset);
      return die(status);
    }
    std::printf("%-24s %6s %3s %6s %6s %8s %7s %7s %7s\n", "Dataset", "Size", "M", "ATS",
                "Uniq", "AVG Len", "S1", "S2", "S3");
    std::printf("%-24s %6zu %3s %6.2f %6zu %8.2f %7.2f %7.2f %7.2f\n",
                fs::path(stats_in).stem().string().c_str(), stats.size,
                stats.spoken ? "SP" : "W", stats.ats, stats.uniq, stats.avg_len, stats.s1,
                stats.s2, stats.s3);
    if (!stats_store.empty()) {
      char* record = nullptr;
      status = tdsa_dataset_stats_record(dataset, &record);
      if (status != TDSA_OK) {
        tdsa_dataset_free(dataset);
        return die(status);
      }
      fs::create_directories(stats_store);
      // records are content addressed; reuse run path through report store
      std::string path = stats_store + "/stats-" + fs::path(stats_in).stem().string() + ".json";
      FILE* f = std::fopen(path.c_str(), "wb");
      if (f) {
        std::fputs(record, f);
        std::fclose(f);
        std::printf("stored %s\n", path.c_str());
      }
      tdsa_string_free(record);
    }
    tdsa_dataset_free(dataset);
    return 0;
  }

  if (tok_cmd->parsed()) {
    tdsa_status status = tdsa_tokenize_file(tok_in.c_str(), tok_out.c_str());
    if (status != TDSA_OK) return die(status);
    std::printf("wrote %s\n", tok_out.c_str());
    return 0;
  }

  if (lex_cmd->parsed()) {
    char* record = nullptr;
    tdsa_status status = tdsa_lexicon_stats(lex_config.c_str(), &record);
    if (status != TDSA_OK) return die(status);
    std::string record_str = record;
    tdsa_string_free(record);
    if (!lex_store.empty()) {
      fs::create_directories(lex_store);
      std::string path = lex_store + "/lexicon-stats.json";
      FILE* f = std::fopen(path.c_str(), "wb");
      if (f) {
        std::fputs(record_str.c_str(), f);
        std::fclose(f);
      }
    }
    // print through the table3 renderer for a human-readable grid
    std::string tmp = (fs::temp_directory_path() / "tdsa-lexstats.json").string();
    FILE* f = std::fopen(tmp.c_str(), "wb");
    if (f) {
      std::fputs(record_str.c_str(), f);
      std::fclose(f);
      const char* paths[] = {tmp.c_str()};
      char* text = nullptr;
      if (tdsa_report("table3", paths, 1, &text, nullptr) == TDSA_OK) print_and_free(text);
      fs::remove(tmp);
    }
    return 0;
  }

  if (emb_cmd->parsed()) {
    char* info = nullptr;
    tdsa_status status = tdsa_embed_info(emb_config.c_str(), emb_name.c_str(), &info);
    if (status != TDSA_OK) return die(status);
    print_and_free(info);
    return 0;
  }

  if (feat_cmd->parsed()) {
    std::vector<std::string> overrides;
    if (!feat_method.empty()) overrides.push_back("method.family=\"" + feat_method + "\"");
    if (!feat_lexicon.empty()) overrides.push_back("method.lexicon=\"" + feat_lexicon + "\"");
    if (!feat_embeddings.empty())
      overrides.push_back("embeddings.use=" + toml_string_array(feat_embeddings));
    auto cstrs = as_cstrs(overrides);
    char* sidecar = nullptr;
    tdsa_status status = tdsa_extract_features(
        feat_config.c_str(), cstrs.data(), cstrs.size(), feat_in.c_str(),
        feat_conll.empty() ? nullptr : feat_conll.c_str(), feat_out.c_str(), &sidecar);
    if (status != TDSA_OK) return die(status);
    tdsa_string_free(sidecar);
    std::printf("wrote %s and %s.json\n", feat_out.c_str(), feat_out.c_str());
    return 0;
  }

  auto run_with = [&](const std::string& config, std::vector<std::string> overrides,
                      const std::string& store) -> int {
    auto cstrs = as_cstrs(overrides);
    char* record = nullptr;
    tdsa_status status =
        tdsa_run_experiment(config.c_str(), cstrs.data(), cstrs.size(),
                            store.empty() ? nullptr : store.c_str(), &record);
    if (status != TDSA_OK) return die(status);
    print_and_free(record);
    return 0;
  };

  if (svm_cmd->parsed()) {
    std::vector<std::string> overrides = svm_sets;
    if (!svm_model_out.empty())
      overrides.push_back("output.model_path=\"" + svm_model_out + "\"");
    return run_with(svm_config, overrides, svm_store);
  }

  if (cv_cmd->parsed()) {
    std::vector<std::string> overrides = cv_sets;
    if (!cv_grid.empty()) overrides.push_back("training.grid=" + toml_number_array(cv_grid));
    if (cv_folds > 0) overrides.push_back("training.folds=" + std::to_string(cv_folds));
    auto cstrs = as_cstrs(overrides);
    char* result = nullptr;
    tdsa_status status = tdsa_cv_select(cv_config.c_str(), cstrs.data(), cstrs.size(), &result);
    if (status != TDSA_OK) return die(status);
    print_and_free(result);
    return 0;
  }

  if (lstm_cmd->parsed()) {
    std::vector<std::string> overrides = lstm_sets;
    if (!lstm_arch.empty()) overrides.push_back("method.family=\"" + lstm_arch + "\"");
    if (!lstm_model_out.empty())
      overrides.push_back("output.model_path=\"" + lstm_model_out + "\"");
    return run_with(lstm_config, overrides, lstm_store);
  }

  if (seed_cmd->parsed()) {
    std::vector<std::string> overrides = seed_sets;
    if (seed_count > 0) overrides.push_back("training.n_seeds=" + std::to_string(seed_count));
    if (!seed_list.empty()) overrides.push_back("training.seeds=" + toml_number_array(seed_list));
    auto cstrs = as_cstrs(overrides);
    char* record = nullptr;
    tdsa_status status = tdsa_run_multiseed(
        seed_config.c_str(), cstrs.data(), cstrs.size(),
        seed_out.empty() ? nullptr : seed_out.c_str(),
        seed_store.empty() ? nullptr : seed_store.c_str(), &record);
    if (status != TDSA_OK) return die(status);
    print_and_free(record);
    return 0;
  }

  if (run_cmd->parsed()) return run_with(run_config, run_sets, run_store);

  if (report_cmd->parsed()) {
    std::vector<std::string> paths = report_paths;
    if (!report_glob.empty()) {
      for (std::string& p : expand_glob(report_glob)) paths.push_back(std::move(p));
    }
    if (paths.empty()) {
      std::fprintf(stderr, "error: no record files given (use --glob or positional paths)\n");
      return 1;
    }
    auto cstrs = as_cstrs(paths);
    char* text = nullptr;
    char* json = nullptr;
    tdsa_status status =
        tdsa_report(report_shape.c_str(), cstrs.data(), cstrs.size(), &text, &json);
    if (status != TDSA_OK) return die(status);
    if (report_json) {
      print_and_free(json);
      tdsa_string_free(text);
    } else {
      print_and_free(text);
      tdsa_string_free(json);
    }
    return 0;
  }

  return 0;
}
