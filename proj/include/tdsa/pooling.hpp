#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdsa/embedding.hpp"
#include "tdsa/lexicon.hpp"
#include "tdsa/matrix.hpp"
#include "tdsa/text.hpp"

namespace tdsa {

enum class PoolOp { Max = 0, Min = 1, Avg = 2, Std = 3, Prod = 4 };

constexpr const char* kPoolOpNames[] = {"max", "min", "avg", "std", "prod"};
constexpr PoolOp kAllPoolOps[] = {PoolOp::Max, PoolOp::Min, PoolOp::Avg, PoolOp::Std,
                                  PoolOp::Prod};

// Per-dimension reduction of an n x d matrix. An empty matrix reduces to the
// zero vector for every op. Avg and Std sum strictly left to right; Std is
// the population deviation; Prod multiplies sequentially without rescaling.
std::vector<double> pool(const Matrix& context, PoolOp op);

// All five poolings of the token-embedding matrix, concatenated in the fixed
// order max, min, avg, std, prod. Length 5*dim.
std::vector<double> context_features(const std::vector<Token>& tokens,
                                     const EmbeddingMatrix& embedding);

enum class MethodFamily {
  TargetInd,
  TargetDepMinus,
  TargetDep,
  TargetDepPlus,
  TDParseMinus,
  TDParse,
  TDParsePlus,
};

const char* method_family_name(MethodFamily family);
std::optional<MethodFamily> method_family_from_name(std::string_view name);
bool family_needs_lexicon(MethodFamily family);
bool family_needs_graph(MethodFamily family);

struct MethodSpec {
  MethodFamily family = MethodFamily::TargetDep;
  const SentimentLexicon* lexicon = nullptr;  // required by the *_PLUS families
};

// One sentence's dependency parse as ingested from CoNLL-U. head == 0 means
// root; indices are 1-based in the file, stored 0-based with kRoot for the
// root's head.
struct DepGraph {
  static constexpr std::size_t kRoot = static_cast<std::size_t>(-1);

  std::string sentence_id;
  std::vector<Token> tokens;       // lowercased forms, spans over the joined text
  std::vector<std::size_t> heads;  // per token; kRoot for the single root
  std::vector<std::string> relations;
};

std::vector<DepGraph> parse_conll(std::string_view bytes);

// All tokens connected to any target token in the undirected dependency
// graph, in surface order, target included. max_depth < 0 means unbounded
// (the whole connected component).
std::vector<std::size_t> dep_context(const DepGraph& graph,
                                     const std::vector<std::size_t>& target_token_indices,
                                     int max_depth = -1);

struct LayoutEntry {
  std::string context;
  std::string op;
  std::size_t offset = 0;
  std::size_t length = 0;

  bool operator==(const LayoutEntry&) const = default;
};

struct FeatureVector {
  std::vector<double> values;
  std::vector<LayoutEntry> layout;
};

// Per-occurrence context features for the method's context set, median-pooled
// across occurrences (even count: mean of the two middle values). The graph
// is required by the TDParse* families and must parse the same sentence.
FeatureVector assemble_features(const std::vector<ContextBundle>& bundles,
                                const MethodSpec& spec, const EmbeddingMatrix& embedding,
                                const DepGraph* graph = nullptr, int dep_max_depth = -1);

}  // namespace tdsa
