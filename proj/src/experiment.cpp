#include "tdsa/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <unordered_set>

#include <json.hpp>

#include "tdsa/features_io.hpp"
#include "tdsa/linear.hpp"
#include "tdsa/pooling.hpp"
#include "tdsa/text.hpp"
#include "tdsa/util.hpp"
#include "tdsa/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tdsa {

namespace {

std::string timestamp_utc() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json toml_to_json(const TomlValue& v) {
  switch (v.kind) {
    case TomlValue::Kind::String: return v.str;
    case TomlValue::Kind::Number: return v.number;
    case TomlValue::Kind::Boolean: return v.boolean;
    case TomlValue::Kind::Array: {
      json arr = json::array();
      for (const TomlValue& item : v.array) arr.push_back(toml_to_json(item));
      return arr;
    }
  }
  return nullptr;
}

json config_snapshot(const TomlTable& config) {
  json out = json::object();
  for (const auto& [key, value] : config.values()) out[key] = toml_to_json(value);
  return out;
}

json environment_json() {
  return {{"version", kVersion}, {"timestamp", timestamp_utc()}};
}

json metrics_json(const MetricReport& m) {
  json per_class = json::object();
  for (std::size_t c = 0; c < 3; ++c)
    per_class[kLabelNames[c]] = {{"precision", m.per_class[c].precision},
                                 {"recall", m.per_class[c].recall},
                                 {"f1", m.per_class[c].f1}};
  return {{"accuracy", m.accuracy}, {"macro_f1", m.macro_f1}, {"per_class", per_class}};
}

std::string finalize_record(json record, std::string* hash_out = nullptr) {
  std::string hash = hex64(fnv1a64(record.dump()));
  record["content_hash"] = hash;
  if (hash_out) *hash_out = hash;
  return record.dump(2) + "\n";
}

struct PreparedData {
  Dataset train;
  Dataset test;
  std::vector<std::vector<ContextBundle>> train_bundles;  // per instance
  std::vector<std::vector<ContextBundle>> test_bundles;
  std::vector<Label> train_labels;
  std::vector<Label> test_labels;
};

PreparedData prepare_data(const TomlTable& config) {
  PreparedData data;
  data.train = load_configured_dataset(config, "train");
  data.test = load_configured_dataset(config, "test");
  for (const TargetInstance& inst : data.train.instances) {
    data.train_bundles.push_back(extract_contexts(inst));
    data.train_labels.push_back(inst.label);
  }
  for (const TargetInstance& inst : data.test.instances) {
    data.test_bundles.push_back(extract_contexts(inst));
    data.test_labels.push_back(inst.label);
  }
  return data;
}

std::unordered_set<std::string> corpus_vocabulary(const PreparedData& data) {
  std::unordered_set<std::string> vocab;
  auto add = [&vocab](const std::vector<std::vector<ContextBundle>>& all) {
    for (const auto& bundles : all)
      for (const ContextBundle& b : bundles)
        for (const Token& tok : b.full) vocab.insert(tok.surface);
  };
  add(data.train_bundles);
  add(data.test_bundles);
  return vocab;
}

std::vector<DepGraph> load_graphs(const TomlTable& config, const std::string& key,
                                  std::size_t expected) {
  std::string path = config.get_string(key);
  if (path.empty())
    fail(Errc::invalid_argument, "config: missing '" + key + "' for a dependency-graph method");
  std::vector<DepGraph> graphs = parse_conll(read_file(resolve_data_path(path)));
  if (graphs.size() != expected)
    fail(Errc::invalid_argument, key + ": " + std::to_string(graphs.size()) +
                                     " parses for " + std::to_string(expected) + " instances");
  return graphs;
}

struct NpFeatures {
  Matrix train;
  Matrix test;
};

NpFeatures build_np_features(const TomlTable& config, const PreparedData& data,
                             MethodFamily family) {
  SentimentLexicon lexicon;
  MethodSpec spec;
  spec.family = family;
  if (family_needs_lexicon(family)) {
    lexicon = load_configured_lexicon(config, config.get_string("method.lexicon", "all"));
    spec.lexicon = &lexicon;
  }
  EmbeddingMatrix embedding = load_configured_embeddings(config);
  if (config.get_bool("embeddings.filter_vocab", false)) {
    auto vocab = corpus_vocabulary(data);
    embedding = filter_vocab(embedding, vocab);
  }

  std::vector<DepGraph> train_graphs, test_graphs;
  if (family_needs_graph(family)) {
    train_graphs = load_graphs(config, "method.conll_train", data.train.instances.size());
    test_graphs = load_graphs(config, "method.conll_test", data.test.instances.size());
  }
  int dep_depth = static_cast<int>(config.get_number("method.dep_context_depth", -1));

  auto build = [&](const std::vector<std::vector<ContextBundle>>& bundles,
                   const std::vector<DepGraph>& graphs) {
    Matrix m;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      FeatureVector fv = assemble_features(bundles[i], spec, embedding,
                                           graphs.empty() ? nullptr : &graphs[i], dep_depth);
      if (m.cols == 0) m = Matrix(bundles.size(), fv.values.size());
      std::copy(fv.values.begin(), fv.values.end(), m.row(i));
    }
    return m;
  };
  NpFeatures out;
  out.train = build(data.train_bundles, train_graphs);
  out.test = build(data.test_bundles, test_graphs);
  return out;
}

SvmConfig svm_config_from(const TomlTable& config) {
  SvmConfig svm;
  svm.tolerance = config.get_number("training.tolerance", svm.tolerance);
  svm.max_iterations =
      static_cast<std::size_t>(config.get_number("training.max_iterations",
                                                 static_cast<double>(svm.max_iterations)));
  svm.seed = static_cast<std::uint64_t>(config.get_number("training.seed", 1));
  return svm;
}

struct NpOutcome {
  MetricReport metrics;
  json extra;
};

NpOutcome run_np(const TomlTable& config, const PreparedData& data, MethodFamily family) {
  NpFeatures features = build_np_features(config, data, family);
  Matrix& train_x = features.train;
  Matrix& test_x = features.test;

  const bool scale = config.get_bool("method.scale", true);
  SvmConfig svm = svm_config_from(config);

  json extra = json::object();
  double c_value = config.get_number("training.c_value", 0.0);
  if (c_value <= 0.0) {
    std::vector<double> grid = config.get_number_array("training.grid");
    if (grid.empty()) grid.assign(std::begin(kDefaultCGrid), std::end(kDefaultCGrid));
    auto folds = static_cast<std::size_t>(config.get_number("training.folds", 5));
    CvResult cv = cv_select_c(train_x, data.train_labels, grid, folds, svm.seed, svm);
    c_value = cv.best_c;
    extra["cv"] = json::array();
    for (const CvEntry& e : cv.entries)
      extra["cv"].push_back({{"c", e.c}, {"mean_accuracy", e.mean_accuracy}});
    extra["best_c"] = cv.best_c;
  } else {
    extra["best_c"] = c_value;
  }
  svm.c_value = c_value;

  MaxMinScaler scaler;
  Matrix train_in = train_x, test_in = test_x;
  if (scale) {
    scaler.fit(train_x);
    train_in = scaler.transform(train_x);
    test_in = scaler.transform(test_x);
  }
  LinearModel model = train_svm(train_in, data.train_labels, svm);
  std::vector<Label> pred = model.predict_all(test_in);

  std::string model_path = config.get_string("output.model_path");
  if (!model_path.empty()) write_file(model_path, save_model(model));

  NpOutcome outcome;
  outcome.metrics = score(pred, data.test_labels);
  outcome.extra = std::move(extra);
  outcome.extra["scaled"] = scale;
  if (!model_path.empty()) outcome.extra["model_path"] = model_path;
  return outcome;
}

TrainSpec train_spec_from(const TomlTable& config) {
  TrainSpec spec;
  spec.learning_rate = config.get_number("training.learning_rate", spec.learning_rate);
  spec.max_epochs =
      static_cast<std::size_t>(config.get_number("training.max_epochs",
                                                 static_cast<double>(spec.max_epochs)));
  spec.patience = static_cast<std::size_t>(
      config.get_number("training.patience", static_cast<double>(spec.patience)));
  spec.seed = static_cast<std::uint64_t>(config.get_number("training.seed", 1));
  spec.validation_fraction =
      config.get_number("training.validation_fraction", spec.validation_fraction);
  spec.split_seed = static_cast<std::uint64_t>(
      config.get_number("training.split_seed", static_cast<double>(spec.split_seed)));
  spec.hidden_dim = static_cast<std::size_t>(config.get_number("training.hidden_dim", 0));
  return spec;
}

struct LstmData {
  std::vector<LabeledInput> train;
  std::vector<LabeledInput> test;
  std::size_t embed_dim = 0;
  std::size_t pad_length = 0;
};

LstmData prepare_lstm_data(const TomlTable& config, const PreparedData& data, Arch arch) {
  EmbeddingMatrix embedding = load_configured_embeddings(config);
  if (config.get_bool("embeddings.filter_vocab", false)) {
    auto vocab = corpus_vocabulary(data);
    embedding = filter_vocab(embedding, {vocab.begin(), vocab.end()});
  }

  // Multi-occurrence instances contribute their first occurrence.
  std::vector<ContextBundle> train_firsts;
  for (const auto& bundles : data.train_bundles) train_firsts.push_back(bundles.front());

  LstmData out;
  out.embed_dim = embedding.dim;
  out.pad_length = max_sequence_length(train_firsts, arch);
  std::size_t pad_override =
      static_cast<std::size_t>(config.get_number("training.pad_length", 0));
  if (pad_override > 0) out.pad_length = pad_override;

  for (std::size_t i = 0; i < data.train_bundles.size(); ++i)
    out.train.push_back(
        {build_inputs(data.train_bundles[i].front(), arch, embedding, out.pad_length),
         data.train_labels[i]});
  for (std::size_t i = 0; i < data.test_bundles.size(); ++i)
    out.test.push_back(
        {build_inputs(data.test_bundles[i].front(), arch, embedding, out.pad_length),
         data.test_labels[i]});
  return out;
}

}  // namespace

Dataset load_configured_dataset(const TomlTable& config, const std::string& which) {
  std::string format = config.get_string("dataset.format", "jsonl");
  std::string direct = config.get_string("dataset." + which);
  if (!direct.empty()) {
    Dataset d = parse_path(format, resolve_data_path(direct));
    if (!config.get_string("dataset.name").empty())
      d.name = config.get_string("dataset.name") + "-" + which;
    return d;
  }
  std::string whole = config.get_string("dataset.path");
  if (whole.empty())
    fail(Errc::invalid_argument,
         "config: need dataset." + which + " or dataset.path with a split");
  Dataset all = parse_path(format, resolve_data_path(whole));
  if (!config.get_string("dataset.name").empty()) all.name = config.get_string("dataset.name");
  SplitSpec split;
  split.test_fraction = config.get_number("dataset.split.test_fraction", 0.2);
  split.seed = static_cast<std::uint64_t>(config.get_number("dataset.split.seed", 1));
  auto [train, test] = make_split(all, split);
  return which == "train" ? train : test;
}

SentimentLexicon load_configured_lexicon(const TomlTable& config, const std::string& selector) {
  std::vector<std::string> names;
  std::string sel = to_lower_ascii(trim(selector));
  if (sel.empty() || sel == "all") {
    names = {"mpqa", "hl", "nrc"};
  } else {
    for (std::string_view part : split(sel, ','))
      if (!trim(part).empty()) names.emplace_back(trim(part));
  }

  std::vector<SentimentLexicon> loaded;
  for (const std::string& name : names) {
    if (name == "mpqa") {
      loaded.push_back(parse_mpqa(read_file(resolve_data_path(
          config.require_string("lexicons.mpqa_path")))));
    } else if (name == "hl") {
      loaded.push_back(
          parse_hl(read_file(resolve_data_path(config.require_string("lexicons.hl_pos_path"))),
                   read_file(resolve_data_path(config.require_string("lexicons.hl_neg_path")))));
    } else if (name == "nrc") {
      loaded.push_back(parse_nrc(read_file(resolve_data_path(
          config.require_string("lexicons.nrc_path")))));
    } else {
      fail(Errc::invalid_argument, "config: unknown lexicon '" + name + "'");
    }
  }
  if (loaded.size() == 1) return loaded[0];
  std::vector<const SentimentLexicon*> refs;
  for (const SentimentLexicon& lex : loaded) refs.push_back(&lex);
  return lexicon_union(refs);
}

EmbeddingMatrix load_configured_embeddings(const TomlTable& config) {
  std::vector<std::string> use = config.get_string_array("embeddings.use");
  if (use.empty()) {
    use = config.subtable_names("embeddings");
    if (use.empty()) fail(Errc::invalid_argument, "config: no embeddings configured");
  }
  EmbeddingMatrix combined;
  bool first = true;
  for (const std::string& name : use) {
    std::string path = config.require_string("embeddings." + name + ".path");
    EmbeddingMatrix m = load_text_embeddings_file(resolve_data_path(path), nullptr, name);
    double want = config.get_number("embeddings." + name + ".dim", 0.0);
    if (want > 0 && static_cast<std::size_t>(want) != m.dim)
      fail(Errc::invalid_argument, "embeddings." + name + ": dim " + std::to_string(m.dim) +
                                       " != configured " + std::to_string(want));
    if (first) {
      combined = std::move(m);
      first = false;
    } else {
      combined = concat(combined, m);
    }
  }
  return combined;
}

ExperimentRecord run_experiment(const TomlTable& config) {
  std::string method = to_lower_ascii(config.require_string("method.family"));
  PreparedData data = prepare_data(config);

  MetricReport metrics;
  json extra;
  if (auto family = method_family_from_name(method)) {
    NpOutcome outcome = run_np(config, data, *family);
    metrics = outcome.metrics;
    extra = std::move(outcome.extra);
  } else if (auto arch = arch_from_name(method)) {
    LstmData lstm = prepare_lstm_data(config, data, *arch);
    TrainSpec spec = train_spec_from(config);
    TrainResult result = train(*arch, lstm.embed_dim, lstm.train, spec);
    std::vector<Label> pred;
    for (const LabeledInput& li : lstm.test) pred.push_back(network_predict(result.net, li.input));
    metrics = score(pred, data.test_labels);
    extra = {{"best_epoch", result.best_epoch},
             {"epochs_run", result.history.size()},
             {"pad_length", lstm.pad_length}};
    std::string params_path = config.get_string("output.model_path");
    if (!params_path.empty()) {
      write_file(params_path, save_network(result.net));
      extra["model_path"] = params_path;
    }
  } else {
    fail(Errc::invalid_argument, "config: unknown method.family '" + method + "'");
  }

  std::string dataset_name = config.get_string("dataset.name");
  if (dataset_name.empty()) dataset_name = data.train.name;

  json record = {{"kind", "experiment"},
                 {"dataset", dataset_name},
                 {"method", method},
                 {"config", config_snapshot(config)},
                 {"metrics", metrics_json(metrics)},
                 {"extra", extra},
                 {"environment", environment_json()}};

  ExperimentRecord out;
  out.json = finalize_record(std::move(record), &out.content_hash);
  out.metrics = metrics;
  out.method = method;
  out.dataset = dataset_name;
  return out;
}

MultiseedOutcome run_multiseed(const TomlTable& config) {
  std::string method = to_lower_ascii(config.require_string("method.family"));
  auto arch = arch_from_name(method);
  if (!arch)
    fail(Errc::invalid_argument, "multiseed: method.family must be lstm, tdlstm or tclstm");

  PreparedData data = prepare_data(config);
  LstmData lstm = prepare_lstm_data(config, data, *arch);
  TrainSpec spec = train_spec_from(config);

  std::vector<std::uint64_t> seeds;
  for (double s : config.get_number_array("training.seeds"))
    seeds.push_back(static_cast<std::uint64_t>(s));
  if (seeds.empty()) {
    auto n = static_cast<std::size_t>(config.get_number("training.n_seeds", 30));
    for (std::size_t i = 1; i <= n; ++i) seeds.push_back(i);
  }

  MultiseedOutcome outcome;
  outcome.study = seed_study(*arch, lstm.embed_dim, lstm.train, lstm.test, seeds, spec);

  std::string dataset_name = config.get_string("dataset.name");
  if (dataset_name.empty()) dataset_name = data.train.name;

  json record = {{"kind", "seed_study"},
                 {"dataset", dataset_name},
                 {"method", method},
                 {"seeds", outcome.study.seeds},
                 {"macro_f1", outcome.study.macro_f1},
                 {"accuracy", outcome.study.accuracy},
                 {"summary",
                  {{"mean", outcome.study.mean},
                   {"max", outcome.study.max_value},
                   {"min", outcome.study.min_value},
                   {"std", outcome.study.stddev}}},
                 {"config", config_snapshot(config)},
                 {"environment", environment_json()}};
  outcome.json = finalize_record(std::move(record));
  return outcome;
}

std::string run_cv(const TomlTable& config) {
  std::string method = to_lower_ascii(config.require_string("method.family"));
  auto family = method_family_from_name(method);
  if (!family) fail(Errc::invalid_argument, "cv: method.family must be a pooling method");

  PreparedData data = prepare_data(config);
  NpFeatures features = build_np_features(config, data, *family);

  std::vector<double> grid = config.get_number_array("training.grid");
  if (grid.empty()) grid.assign(std::begin(kDefaultCGrid), std::end(kDefaultCGrid));
  auto folds = static_cast<std::size_t>(config.get_number("training.folds", 5));
  SvmConfig svm = svm_config_from(config);
  CvResult cv = cv_select_c(features.train, data.train_labels, grid, folds, svm.seed, svm);

  json out;
  out["kind"] = "cv";
  out["method"] = method;
  out["best_c"] = cv.best_c;
  out["folds"] = folds;
  out["entries"] = json::array();
  for (const CvEntry& e : cv.entries)
    out["entries"].push_back(
        {{"c", e.c}, {"fold_accuracy", e.fold_accuracy}, {"mean_accuracy", e.mean_accuracy}});
  return out.dump(2) + "\n";
}

std::string extract_features_to_file(const TomlTable& config, const std::string& in_jsonl,
                                     const std::string& conllu, const std::string& out_path) {
  std::string method = to_lower_ascii(config.require_string("method.family"));
  auto family = method_family_from_name(method);
  if (!family) fail(Errc::invalid_argument, "features: method.family must be a pooling method");

  Dataset dataset = read_jsonl_file(resolve_data_path(in_jsonl));

  SentimentLexicon lexicon;
  MethodSpec spec;
  spec.family = *family;
  if (family_needs_lexicon(*family)) {
    lexicon = load_configured_lexicon(config, config.get_string("method.lexicon", "all"));
    spec.lexicon = &lexicon;
  }
  EmbeddingMatrix embedding = load_configured_embeddings(config);

  std::vector<DepGraph> graphs;
  if (family_needs_graph(*family)) {
    if (conllu.empty())
      fail(Errc::invalid_argument, "features: method '" + method + "' needs a conllu file");
    graphs = parse_conll(read_file(resolve_data_path(conllu)));
    if (graphs.size() != dataset.instances.size())
      fail(Errc::invalid_argument,
           "features: " + std::to_string(graphs.size()) + " parses for " +
               std::to_string(dataset.instances.size()) + " instances");
  }
  int dep_depth = static_cast<int>(config.get_number("method.dep_context_depth", -1));

  FeatureFile file;
  for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
    const TargetInstance& inst = dataset.instances[i];
    FeatureVector fv = assemble_features(extract_contexts(inst), spec, embedding,
                                         graphs.empty() ? nullptr : &graphs[i], dep_depth);
    if (file.features.cols == 0)
      file.features = Matrix(dataset.instances.size(), fv.values.size());
    std::copy(fv.values.begin(), fv.values.end(), file.features.row(i));
    if (i == 0) file.layout = fv.layout;
    file.ids.push_back(inst.id);
    file.labels.push_back(inst.label);
  }
  write_features(file, out_path);
  return read_file(feature_sidecar_path(out_path));
}

std::string store_record(const std::string& record_json, const std::string& dir) {
  json record = json::parse(record_json, nullptr, false);
  if (record.is_discarded() || !record.is_object() || !record.contains("content_hash"))
    fail(Errc::invalid_argument, "store_record: not a finalized record");
  fs::create_directories(dir);
  std::string path = (fs::path(dir) / (record["content_hash"].get<std::string>() + ".json")).string();
  write_file(path, record_json);
  return path;
}

std::string load_record(const std::string& path) {
  std::string bytes = read_file(path);
  json record = json::parse(bytes, nullptr, false);
  if (record.is_discarded() || !record.is_object())
    fail(Errc::parse, "record: invalid JSON in " + path);
  if (!record.contains("content_hash")) fail(Errc::parse, "record: missing content hash");
  std::string stored = record["content_hash"].get<std::string>();
  record.erase("content_hash");
  std::string recomputed = hex64(fnv1a64(record.dump()));
  if (stored != recomputed)
    fail(Errc::parse, "record: content hash mismatch in " + path + " (stored " + stored +
                          ", computed " + recomputed + ")");
  return bytes;
}

std::string stats_record_json(const Dataset& dataset, const DatasetStats& stats) {
  json record = {{"kind", "dataset_stats"},
                 {"dataset", dataset.name},
                 {"medium", dataset.spoken ? "SP" : "W"},
                 {"stats",
                  {{"size", stats.size},
                   {"ats", stats.ats},
                   {"uniq", stats.uniq},
                   {"avg_len", stats.avg_len},
                   {"s1", stats.s1},
                   {"s2", stats.s2},
                   {"s3", stats.s3}}},
                 {"environment", environment_json()}};
  return finalize_record(std::move(record));
}

std::string lexicon_stats_record_json(const TomlTable& config) {
  SentimentLexicon mpqa = load_configured_lexicon(config, "mpqa");
  SentimentLexicon hl = load_configured_lexicon(config, "hl");
  SentimentLexicon nrc = load_configured_lexicon(config, "nrc");
  SentimentLexicon mpqa_hl = lexicon_union({&mpqa, &hl}, "mpqa+hl");
  SentimentLexicon all3 = lexicon_union({&mpqa, &hl, &nrc}, "all");

  json rows = json::array();
  for (const SentimentLexicon* lex : {&mpqa, &hl, &nrc, &mpqa_hl, &all3}) {
    LexiconCounts plain = counts(*lex, false);
    LexiconCounts low = counts(*lex, true);
    rows.push_back({{"name", lex->name},
                    {"positive", plain.positive},
                    {"positive_lowered", low.positive},
                    {"negative", plain.negative},
                    {"negative_lowered", low.negative}});
  }
  json record = {{"kind", "lexicon_stats"}, {"rows", rows}, {"environment", environment_json()}};
  return finalize_record(std::move(record));
}

}  // namespace tdsa
