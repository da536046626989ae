#include "tdsa/embedding.hpp"

#include <algorithm>
#include <map>

#include "tdsa/lexicon.hpp"
#include "tdsa/util.hpp"

namespace tdsa {

std::span<const double> EmbeddingMatrix::lookup(std::string_view token) const {
  if (token != kZeroToken) {
    auto it = vocab.find(token);
    if (it != vocab.end()) return rows.row_span(it->second);
  }
  return {zero.data(), zero.size()};
}

EmbeddingMatrix load_text_embeddings(std::string_view bytes, EmbeddingLoadReport* report,
                                     std::string_view name) {
  EmbeddingLoadReport local;
  EmbeddingLoadReport& r = report ? *report : local;

  std::vector<std::string_view> lines = split_lines(bytes);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

  std::size_t first = 0;
  // Header detection: a first line of exactly two integers (count dim).
  if (!lines.empty()) {
    auto fields = split_ws(lines[0]);
    long long a = 0, b = 0;
    if (fields.size() == 2 && parse_int(fields[0], a) && parse_int(fields[1], b) && a > 0 &&
        b > 0) {
      first = 1;
      r.header_skipped = true;
    }
  }

  EmbeddingMatrix out;
  out.name = std::string(name);
  std::vector<std::string> words;
  std::vector<std::vector<double>> vectors;

  for (std::size_t i = first; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (trim(line).empty()) continue;
    auto fields = split_ws(line);
    if (fields.size() < 2)
      fail(Errc::parse, "embeddings: too few fields at line " + std::to_string(i + 1));
    std::vector<double> vec(fields.size() - 1);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      if (!parse_double(fields[k], vec[k - 1]))
        fail(Errc::parse, "embeddings: bad number at line " + std::to_string(i + 1));
    }
    if (out.dim == 0) out.dim = vec.size();
    if (vec.size() != out.dim)
      fail(Errc::parse, "embeddings: row of width " + std::to_string(vec.size()) +
                            " instead of " + std::to_string(out.dim) + " at line " +
                            std::to_string(i + 1));
    std::string word(fields[0]);
    if (out.vocab.contains(word)) {
      ++r.duplicates;  // first occurrence wins
      continue;
    }
    out.vocab.emplace(word, words.size());
    words.push_back(std::move(word));
    vectors.push_back(std::move(vec));
  }

  out.rows = Matrix(words.size(), out.dim);
  for (std::size_t i = 0; i < vectors.size(); ++i)
    std::copy(vectors[i].begin(), vectors[i].end(), out.rows.row(i));
  out.zero.assign(out.dim, 0.0);
  return out;
}

EmbeddingMatrix load_text_embeddings_file(const std::string& path, EmbeddingLoadReport* report,
                                          std::string_view name) {
  return load_text_embeddings(read_file(path), report, name);
}

EmbeddingMatrix filter_vocab(const EmbeddingMatrix& matrix,
                             const std::unordered_set<std::string>& keep) {
  EmbeddingMatrix out;
  out.name = matrix.name;
  out.dim = matrix.dim;

  // Deterministic row order: original row order, kept words only.
  std::vector<std::pair<std::size_t, const std::string*>> kept;
  for (const auto& [word, row] : matrix.vocab)
    if (keep.contains(word)) kept.emplace_back(row, &word);
  std::sort(kept.begin(), kept.end());

  out.rows = Matrix(kept.size(), matrix.dim);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out.vocab.emplace(*kept[i].second, i);
    std::copy(matrix.rows.row(kept[i].first), matrix.rows.row(kept[i].first) + matrix.dim,
              out.rows.row(i));
  }
  out.zero.assign(out.dim, 0.0);
  return out;
}

EmbeddingMatrix concat(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  EmbeddingMatrix out;
  out.name = a.name.empty() ? b.name : b.name.empty() ? a.name : a.name + "+" + b.name;
  out.dim = a.dim + b.dim;

  // Union vocabulary in a deterministic order: a's words by row, then b-only
  // words by b's row order.
  std::vector<const std::string*> order(a.vocab.size());
  for (const auto& [word, row] : a.vocab) order[row] = &word;
  std::vector<std::pair<std::size_t, const std::string*>> b_only;
  for (const auto& [word, row] : b.vocab)
    if (!a.vocab.contains(word)) b_only.emplace_back(row, &word);
  std::sort(b_only.begin(), b_only.end());

  out.rows = Matrix(order.size() + b_only.size(), out.dim);
  std::size_t next = 0;
  auto emit = [&](const std::string& word) {
    double* row = out.rows.row(next);
    if (auto it = a.vocab.find(word); it != a.vocab.end())
      std::copy(a.rows.row(it->second), a.rows.row(it->second) + a.dim, row);
    if (auto it = b.vocab.find(word); it != b.vocab.end())
      std::copy(b.rows.row(it->second), b.rows.row(it->second) + b.dim, row + a.dim);
    out.vocab.emplace(word, next);
    ++next;
  };
  for (const std::string* word : order) emit(*word);
  for (const auto& [row, word] : b_only) emit(*word);

  out.zero.assign(out.dim, 0.0);
  return out;
}

}  // namespace tdsa
