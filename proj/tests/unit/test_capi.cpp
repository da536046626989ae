// Exercises the extern-C surface exactly as an external binding would: only
// tdsa.h, opaque handles and status codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "tdsa.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("tdsa-capi-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content = {}) const {
    std::string p = (path / name).string();
    if (!content.empty()) {
      std::ofstream out(p, std::ios::binary);
      out << content;
    }
    return p;
  }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  tdsa_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and error reporting") {
  CHECK(std::strlen(tdsa_version()) > 0);
  tdsa_dataset* dataset = nullptr;
  tdsa_status status = tdsa_dataset_read_jsonl("/no/such/file.jsonl", &dataset);
  CHECK(status == TDSA_ERR_IO);
  CHECK(std::strlen(tdsa_last_error()) > 0);
  CHECK(dataset == nullptr);
}

TEST_CASE("dataset parse, stats, split and jsonl round trip") {
  TempDir dir;
  std::string dong = dir.file("toy.txt",
                              "i love $T$\nnlp\n1\n"
                              "i hate $T$\nbugs\n-1\n"
                              "$T$ exists\ncode\n0\n"
                              "more $T$ love\nnlp\n1\n");
  tdsa_parse_counts counts{};
  tdsa_dataset* dataset = nullptr;
  REQUIRE(tdsa_dataset_parse("dong", dong.c_str(), &counts, &dataset) == TDSA_OK);
  CHECK(counts.accepted == 4);
  CHECK(tdsa_dataset_size(dataset) == 4);

  tdsa_stats stats{};
  REQUIRE(tdsa_dataset_stats(dataset, &stats) == TDSA_OK);
  CHECK(stats.size == 4);
  CHECK(stats.uniq == 3);

  std::string out = dir.file("toy.jsonl");
  REQUIRE(tdsa_dataset_write_jsonl(dataset, out.c_str()) == TDSA_OK);
  tdsa_dataset* reread = nullptr;
  REQUIRE(tdsa_dataset_read_jsonl(out.c_str(), &reread) == TDSA_OK);
  CHECK(tdsa_dataset_size(reread) == 4);

  tdsa_dataset* train = nullptr;
  tdsa_dataset* test = nullptr;
  REQUIRE(tdsa_dataset_split(reread, 0.5, 7, &train, &test) == TDSA_OK);
  CHECK(tdsa_dataset_size(train) + tdsa_dataset_size(test) == 4);

  char* record = nullptr;
  REQUIRE(tdsa_dataset_stats_record(dataset, &record) == TDSA_OK);
  std::string record_str = take(record);
  CHECK(record_str.find("dataset_stats") != std::string::npos);

  std::string tokens_out = dir.file("toy.tokens.jsonl");
  REQUIRE(tdsa_tokenize_file(out.c_str(), tokens_out.c_str()) == TDSA_OK);
  CHECK(fs::exists(tokens_out));

  tdsa_dataset_free(dataset);
  tdsa_dataset_free(reread);
  tdsa_dataset_free(train);
  tdsa_dataset_free(test);
}

TEST_CASE("lexicon handles expose counts and unions") {
  TempDir dir;
  std::string pos = dir.file("pos.txt", "good\ngreat\n");
  std::string neg = dir.file("neg.txt", "bad\n");
  std::string nrc = dir.file("nrc.txt", "calm\tjoy\t1\nugly\tnegative\t1\n");

  tdsa_lexicon* hl = nullptr;
  REQUIRE(tdsa_lexicon_load_hl(pos.c_str(), neg.c_str(), &hl) == TDSA_OK);
  size_t p = 0, n = 0;
  REQUIRE(tdsa_lexicon_counts(hl, 0, &p, &n) == TDSA_OK);
  CHECK(p == 2);
  CHECK(n == 1);

  tdsa_lexicon* nrc_lex = nullptr;
  REQUIRE(tdsa_lexicon_load("nrc", nrc.c_str(), &nrc_lex) == TDSA_OK);
  const tdsa_lexicon* both[] = {hl, nrc_lex};
  tdsa_lexicon* merged = nullptr;
  REQUIRE(tdsa_lexicon_union(both, 2, &merged) == TDSA_OK);
  REQUIRE(tdsa_lexicon_counts(merged, 1, &p, &n) == TDSA_OK);
  CHECK(p == 2);
  CHECK(n == 2);

  CHECK(tdsa_lexicon_load("unknown-kind", pos.c_str(), &nrc_lex) ==
        TDSA_ERR_INVALID_ARGUMENT);

  tdsa_lexicon_free(hl);
  tdsa_lexicon_free(nrc_lex);
  tdsa_lexicon_free(merged);
}

TEST_CASE("embedding handles load and look up vectors") {
  TempDir dir;
  std::string path = dir.file("emb.txt", "a 1 2\nb 3 4\n");
  tdsa_embedding* emb = nullptr;
  REQUIRE(tdsa_embedding_load(path.c_str(), &emb) == TDSA_OK);
  CHECK(tdsa_embedding_dim(emb) == 2);
  CHECK(tdsa_embedding_vocab(emb) == 2);
  double buf[2] = {-1, -1};
  REQUIRE(tdsa_embedding_lookup(emb, "b", buf, 2) == TDSA_OK);
  CHECK(buf[0] == 3.0);
  CHECK(buf[1] == 4.0);
  REQUIRE(tdsa_embedding_lookup(emb, "zzz", buf, 2) == TDSA_OK);
  CHECK(buf[0] == 0.0);
  CHECK(tdsa_embedding_lookup(emb, "b", buf, 1) == TDSA_ERR_INVALID_ARGUMENT);
  tdsa_embedding_free(emb);
}

namespace {

std::string write_experiment_fixture(TempDir& dir) {
  std::string train;
  std::string test;
  const char* words[3] = {"negword", "neuword", "posword"};
  const char* labels[3] = {"negative", "neutral", "positive"};
  int id = 0;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 6; ++i) {
      std::string line = std::string("{\"id\":\"i") + std::to_string(id++) +
                         "\",\"text\":\"padw " + words[c] + " tail\",\"target\":\"" + words[c] +
                         "\",\"spans\":[[5," + std::to_string(5 + std::strlen(words[c])) +
                         "]],\"label\":\"" + labels[c] + "\"}\n";
      if (i < 4)
        train += line;
      else
        test += line;
    }
  }
  dir.file("train.jsonl", train);
  dir.file("test.jsonl", test);
  dir.file("emb.txt",
           "padw 0.05 0.05 0.05\ntail 0.02 -0.02 0.01\n"
           "negword 1.0 0.0 0.0\nneuword 0.0 1.0 0.0\nposword 0.0 0.0 1.0\n");
  std::string config =
      "[dataset]\nname = \"toy\"\nformat = \"jsonl\"\n"
      "train = \"" + dir.file("train.jsonl") + "\"\n"
      "test = \"" + dir.file("test.jsonl") + "\"\n"
      "[method]\nfamily = \"target-dep\"\n"
      "[embeddings]\nuse = [\"toyvec\"]\n"
      "[embeddings.toyvec]\npath = \"" + dir.file("emb.txt") + "\"\ndim = 3\n"
      "[training]\nc_value = 1.0\nseed = 5\n";
  return dir.file("exp.toml", config);
}

}  // namespace

TEST_CASE("experiments, features and reports run through the C surface") {
  TempDir dir;
  std::string config = write_experiment_fixture(dir);
  std::string results = (dir.path / "results").string();

  char* record = nullptr;
  REQUIRE(tdsa_run_experiment(config.c_str(), nullptr, 0, results.c_str(), &record) == TDSA_OK);
  std::string record_str = take(record);
  CHECK(record_str.find("\"accuracy\": 1.0") != std::string::npos);

  // exactly one stored record; feed it to the report
  std::string stored;
  for (const auto& entry : fs::directory_iterator(results)) stored = entry.path().string();
  REQUIRE(!stored.empty());

  const char* paths[] = {stored.c_str()};
  char* text = nullptr;
  char* json = nullptr;
  REQUIRE(tdsa_report("table6", paths, 1, &text, &json) == TDSA_OK);
  std::string table = take(text);
  std::string table_json = take(json);
  CHECK(table.find("target-dep") != std::string::npos);
  CHECK(table.find("Mean") != std::string::npos);
  CHECK(table_json.find("rows") != std::string::npos);

  CHECK(tdsa_report("not-a-shape", paths, 1, &text, &json) == TDSA_ERR_INVALID_ARGUMENT);

  // feature extraction with a method override
  const char* overrides[] = {"method.family=\"target-dep-\""};
  std::string feat_out = (dir.path / "train.features.bin").string();
  char* sidecar = nullptr;
  REQUIRE(tdsa_extract_features(config.c_str(), overrides, 1,
                                dir.file("train.jsonl").c_str(), nullptr, feat_out.c_str(),
                                &sidecar) == TDSA_OK);
  std::string sidecar_str = take(sidecar);
  CHECK(sidecar_str.find("\"dim\": 45") != std::string::npos);  // 3 contexts x 5 ops x 3
  CHECK(fs::exists(feat_out));

  // cv through the C surface
  const char* cv_overrides[] = {"training.c_value=0.0", "training.grid=[0.1, 1.0]",
                                "training.folds=3"};
  char* cv_json = nullptr;
  REQUIRE(tdsa_cv_select(config.c_str(), cv_overrides, 3, &cv_json) == TDSA_OK);
  CHECK(take(cv_json).find("best_c") != std::string::npos);

  // multiseed on the lstm route
  const char* seed_overrides[] = {"method.family=\"tdlstm\"", "training.seeds=[1, 2]",
                                  "training.max_epochs=5", "training.patience=3",
                                  "training.hidden_dim=3", "training.learning_rate=0.05"};
  std::string dist = (dir.path / "dist.json").string();
  char* seed_record = nullptr;
  REQUIRE(tdsa_run_multiseed(config.c_str(), seed_overrides, 6, dist.c_str(), nullptr,
                             &seed_record) == TDSA_OK);
  CHECK(take(seed_record).find("seed_study") != std::string::npos);
  CHECK(fs::exists(dist));
}
