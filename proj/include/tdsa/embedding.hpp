#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tdsa/matrix.hpp"

namespace tdsa {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
};
using VocabMap = std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>>;

// Word vectors loaded from a whitespace text file. Immutable after load;
// lookups of unknown words and of the ZERO token return the all-zeros row.
struct EmbeddingMatrix {
  std::string name;
  std::size_t dim = 0;
  VocabMap vocab;
  Matrix rows;

  // Zero vector for OOV lookups; kept inside so lookup can return a span.
  std::vector<double> zero;

  std::span<const double> lookup(std::string_view token) const;
};

struct EmbeddingLoadReport {
  std::size_t duplicates = 0;
  bool header_skipped = false;
};

EmbeddingMatrix load_text_embeddings(std::string_view bytes,
                                     EmbeddingLoadReport* report = nullptr,
                                     std::string_view name = {});
EmbeddingMatrix load_text_embeddings_file(const std::string& path,
                                          EmbeddingLoadReport* report = nullptr,
                                          std::string_view name = {});

// Restricts the vocabulary to `keep`; surviving words map to bit-identical
// vectors.
EmbeddingMatrix filter_vocab(const EmbeddingMatrix& matrix,
                             const std::unordered_set<std::string>& keep);

// dim = a.dim + b.dim, vocab = union; a side missing a word contributes zeros.
EmbeddingMatrix concat(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

}  // namespace tdsa
