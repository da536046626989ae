#include "tdsa.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "tdsa/config.hpp"
#include "tdsa/corpus.hpp"
#include "tdsa/embedding.hpp"
#include "tdsa/experiment.hpp"
#include "tdsa/lexicon.hpp"
#include "tdsa/report.hpp"
#include "tdsa/text.hpp"
#include "tdsa/util.hpp"
#include "tdsa/version.hpp"

struct tdsa_dataset {
  tdsa::Dataset value;
};

struct tdsa_lexicon {
  tdsa::SentimentLexicon value;
};

struct tdsa_embedding {
  tdsa::EmbeddingMatrix value;
};

namespace {

thread_local std::string g_last_error;

tdsa_status to_status(tdsa::Errc code) {
  switch (code) {
    case tdsa::Errc::io: return TDSA_ERR_IO;
    case tdsa::Errc::parse: return TDSA_ERR_PARSE;
    case tdsa::Errc::invalid_argument: return TDSA_ERR_INVALID_ARGUMENT;
    case tdsa::Errc::state: return TDSA_ERR_STATE;
    case tdsa::Errc::internal: return TDSA_ERR_INTERNAL;
  }
  return TDSA_ERR_INTERNAL;
}

template <typename Fn>
tdsa_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return TDSA_OK;
  } catch (const tdsa::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TDSA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return TDSA_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool cond, const char* what) {
  if (!cond) tdsa::fail(tdsa::Errc::invalid_argument, what);
}

tdsa::TomlTable load_config(const char* config_path, const char* const* overrides,
                            size_t n_overrides) {
  tdsa::TomlTable config;
  if (config_path && *config_path) config = tdsa::TomlTable::parse_file(config_path);
  for (size_t i = 0; i < n_overrides; ++i) {
    require(overrides && overrides[i], "null override");
    config.apply_override(overrides[i]);
  }
  return config;
}

}  // namespace

extern "C" {

const char* tdsa_version(void) { return tdsa::kVersion; }

const char* tdsa_last_error(void) { return g_last_error.c_str(); }

void tdsa_string_free(char* s) { delete[] s; }

tdsa_status tdsa_dataset_parse(const char* format, const char* in_path,
                               tdsa_parse_counts* counts, tdsa_dataset** out) {
  return guarded([&] {
    require(format && in_path && out, "null argument");
    tdsa::ParseReport report;
    auto* handle = new tdsa_dataset{tdsa::parse_path(format, in_path, &report)};
    if (counts) {
      counts->accepted = report.accepted;
      counts->rejected = report.rejected;
      counts->skipped_no_span = report.skipped_no_span;
      counts->dropped_conflict = report.dropped_conflict;
      counts->multi_occurrence = report.multi_occurrence;
    }
    *out = handle;
  });
}

tdsa_status tdsa_dataset_read_jsonl(const char* path, tdsa_dataset** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new tdsa_dataset{tdsa::read_jsonl_file(path)};
  });
}

tdsa_status tdsa_dataset_write_jsonl(const tdsa_dataset* dataset, const char* path) {
  return guarded([&] {
    require(dataset && path, "null argument");
    tdsa::write_jsonl_file(dataset->value, path);
  });
}

size_t tdsa_dataset_size(const tdsa_dataset* dataset) {
  return dataset ? dataset->value.instances.size() : 0;
}

tdsa_status tdsa_dataset_split(const tdsa_dataset* dataset, double test_fraction, uint64_t seed,
                               tdsa_dataset** train, tdsa_dataset** test) {
  return guarded([&] {
    require(dataset && train && test, "null argument");
    tdsa::SplitSpec spec;
    spec.test_fraction = test_fraction;
    spec.seed = seed;
    auto [train_set, test_set] = tdsa::make_split(dataset->value, spec);
    *train = new tdsa_dataset{std::move(train_set)};
    *test = new tdsa_dataset{std::move(test_set)};
  });
}

void tdsa_dataset_free(tdsa_dataset* dataset) { delete dataset; }

tdsa_status tdsa_dataset_stats(const tdsa_dataset* dataset, tdsa_stats* out) {
  return guarded([&] {
    require(dataset && out, "null argument");
    tdsa::DatasetStats stats = tdsa::dataset_stats(dataset->value);
    out->size = stats.size;
    out->ats = stats.ats;
    out->uniq = stats.uniq;
    out->avg_len = stats.avg_len;
    out->s1 = stats.s1;
    out->s2 = stats.s2;
    out->s3 = stats.s3;
    out->spoken = dataset->value.spoken ? 1 : 0;
  });
}

tdsa_status tdsa_dataset_stats_record(const tdsa_dataset* dataset, char** record_json) {
  return guarded([&] {
    require(dataset && record_json, "null argument");
    tdsa::DatasetStats stats = tdsa::dataset_stats(dataset->value);
    *record_json = dup_string(tdsa::stats_record_json(dataset->value, stats));
  });
}

tdsa_status tdsa_tokenize_file(const char* in_jsonl, const char* out_jsonl) {
  return guarded([&] {
    require(in_jsonl && out_jsonl, "null argument");
    tdsa::Dataset dataset = tdsa::read_jsonl_file(in_jsonl);
    std::string out;
    for (const tdsa::TargetInstance& inst : dataset.instances) {
      nlohmann::json tokens = nlohmann::json::array();
      for (const tdsa::Token& tok : tdsa::tokenize(inst.text))
        tokens.push_back({tok.surface, tok.span.start, tok.span.end});
      nlohmann::json spans = nlohmann::json::array();
      for (const tdsa::Span& s : inst.spans) spans.push_back({s.start, s.end});
      nlohmann::json obj = {{"id", inst.id},         {"text", inst.text},
                            {"target", inst.target}, {"spans", spans},
                            {"label", tdsa::label_name(inst.label)},
                            {"tokens", tokens}};
      out += obj.dump();
      out += '\n';
    }
    tdsa::write_file(out_jsonl, out);
  });
}

tdsa_status tdsa_lexicon_load(const char* kind, const char* path, tdsa_lexicon** out) {
  return guarded([&] {
    require(kind && path && out, "null argument");
    std::string k = tdsa::to_lower_ascii(kind);
    if (k == "mpqa")
      *out = new tdsa_lexicon{tdsa::parse_mpqa(tdsa::read_file(path))};
    else if (k == "nrc")
      *out = new tdsa_lexicon{tdsa::parse_nrc(tdsa::read_file(path))};
    else
      tdsa::fail(tdsa::Errc::invalid_argument,
                 "unknown lexicon kind '" + k + "' (hl needs tdsa_lexicon_load_hl)");
  });
}

tdsa_status tdsa_lexicon_load_hl(const char* pos_path, const char* neg_path, tdsa_lexicon** out) {
  return guarded([&] {
    require(pos_path && neg_path && out, "null argument");
    *out = new tdsa_lexicon{
        tdsa::parse_hl(tdsa::read_file(pos_path), tdsa::read_file(neg_path))};
  });
}

tdsa_status tdsa_lexicon_union(const tdsa_lexicon* const* lexicons, size_t count,
                               tdsa_lexicon** out) {
  return guarded([&] {
    require(lexicons && out && count > 0, "null argument");
    std::vector<const tdsa::SentimentLexicon*> refs;
    for (size_t i = 0; i < count; ++i) {
      require(lexicons[i], "null lexicon in union");
      refs.push_back(&lexicons[i]->value);
    }
    *out = new tdsa_lexicon{tdsa::lexicon_union(refs)};
  });
}

tdsa_status tdsa_lexicon_counts(const tdsa_lexicon* lexicon, int lowered, size_t* positive,
                                size_t* negative) {
  return guarded([&] {
    require(lexicon && positive && negative, "null argument");
    tdsa::LexiconCounts c = tdsa::counts(lexicon->value, lowered != 0);
    *positive = c.positive;
    *negative = c.negative;
  });
}

void tdsa_lexicon_free(tdsa_lexicon* lexicon) { delete lexicon; }

tdsa_status tdsa_lexicon_stats(const char* config_path, char** record_json) {
  return guarded([&] {
    require(config_path && record_json, "null argument");
    tdsa::TomlTable config = tdsa::TomlTable::parse_file(config_path);
    *record_json = dup_string(tdsa::lexicon_stats_record_json(config));
  });
}

tdsa_status tdsa_embedding_load(const char* path, tdsa_embedding** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new tdsa_embedding{tdsa::load_text_embeddings_file(path)};
  });
}

size_t tdsa_embedding_dim(const tdsa_embedding* embedding) {
  return embedding ? embedding->value.dim : 0;
}

size_t tdsa_embedding_vocab(const tdsa_embedding* embedding) {
  return embedding ? embedding->value.vocab.size() : 0;
}

tdsa_status tdsa_embedding_lookup(const tdsa_embedding* embedding, const char* word,
                                  double* out_buffer, size_t buffer_len) {
  return guarded([&] {
    require(embedding && word && out_buffer, "null argument");
    require(buffer_len >= embedding->value.dim, "lookup buffer too small");
    auto vec = embedding->value.lookup(word);
    std::memcpy(out_buffer, vec.data(), vec.size() * sizeof(double));
  });
}

void tdsa_embedding_free(tdsa_embedding* embedding) { delete embedding; }

tdsa_status tdsa_embed_info(const char* config_path, const char* name, char** info_json) {
  return guarded([&] {
    require(config_path && name && info_json, "null argument");
    tdsa::TomlTable config = tdsa::TomlTable::parse_file(config_path);
    std::string path = config.require_string(std::string("embeddings.") + name + ".path");
    tdsa::EmbeddingLoadReport report;
    tdsa::EmbeddingMatrix m =
        tdsa::load_text_embeddings_file(tdsa::resolve_data_path(path), &report, name);
    nlohmann::json info = {{"name", name},
                           {"path", path},
                           {"dim", m.dim},
                           {"vocab", m.vocab.size()},
                           {"duplicates", report.duplicates},
                           {"header_skipped", report.header_skipped}};
    *info_json = dup_string(info.dump(2) + "\n");
  });
}

tdsa_status tdsa_extract_features(const char* config_path, const char* const* overrides,
                                  size_t n_overrides, const char* in_jsonl, const char* conllu,
                                  const char* out_path, char** sidecar_json) {
  return guarded([&] {
    require(in_jsonl && out_path, "null argument");
    tdsa::TomlTable config = load_config(config_path, overrides, n_overrides);
    std::string sidecar = tdsa::extract_features_to_file(config, in_jsonl,
                                                         conllu ? conllu : "", out_path);
    if (sidecar_json) *sidecar_json = dup_string(sidecar);
  });
}

tdsa_status tdsa_run_experiment(const char* config_path, const char* const* overrides,
                                size_t n_overrides, const char* results_dir,
                                char** record_json) {
  return guarded([&] {
    tdsa::TomlTable config = load_config(config_path, overrides, n_overrides);
    tdsa::ExperimentRecord record = tdsa::run_experiment(config);
    if (results_dir && *results_dir) tdsa::store_record(record.json, results_dir);
    if (record_json) *record_json = dup_string(record.json);
  });
}

tdsa_status tdsa_run_multiseed(const char* config_path, const char* const* overrides,
                               size_t n_overrides, const char* dist_out_path,
                               const char* results_dir, char** record_json) {
  return guarded([&] {
    tdsa::TomlTable config = load_config(config_path, overrides, n_overrides);
    tdsa::MultiseedOutcome outcome = tdsa::run_multiseed(config);
    if (dist_out_path && *dist_out_path) tdsa::write_file(dist_out_path, outcome.json);
    if (results_dir && *results_dir) tdsa::store_record(outcome.json, results_dir);
    if (record_json) *record_json = dup_string(outcome.json);
  });
}

tdsa_status tdsa_cv_select(const char* config_path, const char* const* overrides,
                           size_t n_overrides, char** result_json) {
  return guarded([&] {
    require(result_json, "null argument");
    tdsa::TomlTable config = load_config(config_path, overrides, n_overrides);
    *result_json = dup_string(tdsa::run_cv(config));
  });
}

tdsa_status tdsa_report(const char* shape, const char* const* record_paths, size_t count,
                        char** text, char** json_out) {
  return guarded([&] {
    require(shape, "null argument");
    auto parsed_shape = tdsa::report_shape_from_name(shape);
    if (!parsed_shape)
      tdsa::fail(tdsa::Errc::invalid_argument, std::string("unknown report shape '") + shape + "'");
    std::vector<std::string> records;
    for (size_t i = 0; i < count; ++i) {
      require(record_paths && record_paths[i], "null record path");
      records.push_back(tdsa::load_record(record_paths[i]));
    }
    tdsa::Report rep = tdsa::report(records, *parsed_shape);
    if (text) *text = dup_string(rep.text);
    if (json_out) *json_out = dup_string(rep.json);
  });
}

}  // extern "C"
