#pragma once

#include <string>
#include <vector>

#include "tdsa/config.hpp"
#include "tdsa/corpus.hpp"
#include "tdsa/embedding.hpp"
#include "tdsa/lexicon.hpp"
#include "tdsa/metrics.hpp"
#include "tdsa/recurrent.hpp"

namespace tdsa {

struct ExperimentRecord {
  std::string json;  // full serialized record, content hash included
  std::string content_hash;
  MetricReport metrics;
  std::string method;
  std::string dataset;
};

// Full pipeline for one config: load data, tokenize, build features or model
// inputs, train, score the test set, and serialize a record. Deterministic
// for a fixed config.
ExperimentRecord run_experiment(const TomlTable& config);

struct MultiseedOutcome {
  SeedStudy study;
  std::string json;  // record of kind "seed_study"
};

// The multi-seed protocol: one fixed train/validation split, one model per
// seed, metric distribution on the fixed test set.
MultiseedOutcome run_multiseed(const TomlTable& config);

// Cross-validated C selection on the configured training features; returns a
// JSON summary (best C plus per-C fold scores).
std::string run_cv(const TomlTable& config);

// NP feature extraction for one jsonl input; writes the binary feature file
// plus its JSON sidecar, returns the sidecar JSON.
std::string extract_features_to_file(const TomlTable& config, const std::string& in_jsonl,
                                     const std::string& conllu, const std::string& out_path);

// Content-addressed results store. Returns the path written; loading
// re-verifies the stored hash.
std::string store_record(const std::string& record_json, const std::string& dir);
std::string load_record(const std::string& path);

Dataset load_configured_dataset(const TomlTable& config, const std::string& which);
SentimentLexicon load_configured_lexicon(const TomlTable& config, const std::string& selector);
EmbeddingMatrix load_configured_embeddings(const TomlTable& config);

std::string stats_record_json(const Dataset& dataset, const DatasetStats& stats);
std::string lexicon_stats_record_json(const TomlTable& config);

}  // namespace tdsa
