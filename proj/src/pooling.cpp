#include "tdsa/pooling.hpp"

#include <algorithm>
#include <cmath>

#include "tdsa/utf8.hpp"
#include "tdsa/util.hpp"

namespace tdsa {

std::vector<double> pool(const Matrix& context, PoolOp op) {
  const std::size_t n = context.rows;
  const std::size_t d = context.cols;
  std::vector<double> out(d, 0.0);
  if (n == 0) return out;  // empty context pools to zeros

  switch (op) {
    case PoolOp::Max:
      for (std::size_t j = 0; j < d; ++j) {
        double v = context.at(0, j);
        for (std::size_t i = 1; i < n; ++i) v = std::max(v, context.at(i, j));
        out[j] = v;
      }
      break;
    case PoolOp::Min:
      for (std::size_t j = 0; j < d; ++j) {
        double v = context.at(0, j);
        for (std::size_t i = 1; i < n; ++i) v = std::min(v, context.at(i, j));
        out[j] = v;
      }
      break;
    case PoolOp::Avg:
      for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += context.at(i, j);
        out[j] = sum / static_cast<double>(n);
      }
      break;
    case PoolOp::Std:
      // population deviation; a singleton row has deviation 0
      for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += context.at(i, j);
        double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          double dev = context.at(i, j) - mean;
          sq += dev * dev;
        }
        out[j] = std::sqrt(sq / static_cast<double>(n));
      }
      break;
    case PoolOp::Prod:
      for (std::size_t j = 0; j < d; ++j) {
        double v = context.at(0, j);
        for (std::size_t i = 1; i < n; ++i) v *= context.at(i, j);
        out[j] = v;
      }
      break;
  }
  return out;
}

namespace {

Matrix embed_tokens(const std::vector<Token>& tokens, const EmbeddingMatrix& embedding) {
  Matrix m(tokens.size(), embedding.dim);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto vec = embedding.lookup(tokens[i].surface);
    std::copy(vec.begin(), vec.end(), m.row(i));
  }
  return m;
}

}  // namespace

std::vector<double> context_features(const std::vector<Token>& tokens,
                                     const EmbeddingMatrix& embedding) {
  Matrix m = embed_tokens(tokens, embedding);
  std::vector<double> out;
  out.reserve(5 * embedding.dim);
  for (PoolOp op : kAllPoolOps) {
    std::vector<double> v = pool(m, op);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

const char* method_family_name(MethodFamily family) {
  switch (family) {
    case MethodFamily::TargetInd: return "target-ind";
    case MethodFamily::TargetDepMinus: return "target-dep-";
    case MethodFamily::TargetDep: return "target-dep";
    case MethodFamily::TargetDepPlus: return "target-dep+";
    case MethodFamily::TDParseMinus: return "tdparse-";
    case MethodFamily::TDParse: return "tdparse";
    case MethodFamily::TDParsePlus: return "tdparse+";
  }
  return "?";
}

std::optional<MethodFamily> method_family_from_name(std::string_view name) {
  std::string n = to_lower_ascii(trim(name));
  if (n == "target-ind") return MethodFamily::TargetInd;
  if (n == "target-dep-") return MethodFamily::TargetDepMinus;
  if (n == "target-dep") return MethodFamily::TargetDep;
  if (n == "target-dep+") return MethodFamily::TargetDepPlus;
  if (n == "tdparse-") return MethodFamily::TDParseMinus;
  if (n == "tdparse") return MethodFamily::TDParse;
  if (n == "tdparse+") return MethodFamily::TDParsePlus;
  return std::nullopt;
}

bool family_needs_lexicon(MethodFamily family) {
  return family == MethodFamily::TargetDepPlus || family == MethodFamily::TDParsePlus;
}

bool family_needs_graph(MethodFamily family) {
  return family == MethodFamily::TDParseMinus || family == MethodFamily::TDParse ||
         family == MethodFamily::TDParsePlus;
}

std::vector<DepGraph> parse_conll(std::string_view bytes) {
  std::vector<DepGraph> graphs;

  struct Row {
    std::string form;
    long long head;
    std::string relation;
  };
  std::vector<Row> rows;
  std::string sent_id;
  std::size_t block_n = 0;

  auto flush = [&]() {
    if (rows.empty()) {
      sent_id.clear();
      return;
    }
    ++block_n;
    DepGraph g;
    g.sentence_id = sent_id.empty() ? "sentence-" + std::to_string(block_n) : sent_id;
    std::size_t roots = 0;
    std::size_t cp = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0) ++cp;  // joining space
      Token tok;
      std::u32string cps = utf8::decode(rows[i].form);
      tok.span = {cp, cp + cps.size()};
      tok.surface = utf8::encode(utf8::lower(cps));
      cp += cps.size();
      g.tokens.push_back(std::move(tok));
      if (rows[i].head == 0) {
        ++roots;
        g.heads.push_back(DepGraph::kRoot);
      } else {
        if (rows[i].head < 0 || static_cast<std::size_t>(rows[i].head) > rows.size())
          fail(Errc::parse, "conll " + g.sentence_id + ": head index out of range");
        g.heads.push_back(static_cast<std::size_t>(rows[i].head) - 1);
      }
      g.relations.push_back(rows[i].relation);
    }
    if (roots != 1)
      fail(Errc::parse, "conll " + g.sentence_id + ": expected exactly one root, found " +
                            std::to_string(roots));
    // cycle check: every token must reach the root
    for (std::size_t i = 0; i < g.heads.size(); ++i) {
      std::size_t cur = i;
      std::size_t steps = 0;
      while (g.heads[cur] != DepGraph::kRoot) {
        cur = g.heads[cur];
        if (++steps > g.heads.size())
          fail(Errc::parse, "conll " + g.sentence_id + ": head cycle involving token " +
                                std::to_string(i + 1));
      }
    }
    graphs.push_back(std::move(g));
    rows.clear();
    sent_id.clear();
  };

  for (std::string_view line : split_lines(bytes)) {
    std::string_view t = trim(line);
    if (t.empty()) {
      flush();
      continue;
    }
    if (t.front() == '#') {
      std::string_view body = trim(t.substr(1));
      if (body.starts_with("sent_id")) {
        std::size_t eq = body.find('=');
        if (eq != std::string_view::npos) sent_id = std::string(trim(body.substr(eq + 1)));
      }
      continue;
    }
    std::vector<std::string_view> fields = split(t, '\t');
    if (fields.size() == 1) fields = split_ws(t);
    if (fields.size() < 8) fail(Errc::parse, "conll: line with fewer than 8 columns");
    long long id = 0;
    if (!parse_int(fields[0], id)) continue;  // multiword ranges and empty nodes
    long long head = 0;
    if (!parse_int(fields[6], head)) fail(Errc::parse, "conll: non-numeric head column");
    rows.push_back({std::string(fields[1]), head, std::string(fields[7])});
  }
  flush();
  return graphs;
}

std::vector<std::size_t> dep_context(const DepGraph& graph,
                                     const std::vector<std::size_t>& target_token_indices,
                                     int max_depth) {
  const std::size_t n = graph.tokens.size();
  if (target_token_indices.empty())
    fail(Errc::invalid_argument, "dep_context: no target token indices");
  for (std::size_t idx : target_token_indices)
    if (idx >= n) fail(Errc::invalid_argument, "dep_context: target token index out of range");

  std::vector<std::vector<std::size_t>> adjacency(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (graph.heads[i] == DepGraph::kRoot) continue;
    adjacency[i].push_back(graph.heads[i]);
    adjacency[graph.heads[i]].push_back(i);
  }

  std::vector<int> depth(n, -1);
  std::vector<std::size_t> queue;
  for (std::size_t idx : target_token_indices) {
    if (depth[idx] == -1) {
      depth[idx] = 0;
      queue.push_back(idx);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::size_t cur = queue[head];
    if (max_depth >= 0 && depth[cur] >= max_depth) continue;
    for (std::size_t next : adjacency[cur]) {
      if (depth[next] == -1) {
        depth[next] = depth[cur] + 1;
        queue.push_back(next);
      }
    }
  }

  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (depth[i] >= 0) out.push_back(i);
  return out;
}

namespace {

// Graph token indices for the k-th occurrence of the bundle's target tokens.
// Falls back from full-sequence matching to first-token matching; the parse
// may tokenize slightly differently from the framework tokenizer.
std::vector<std::size_t> locate_target(const DepGraph& graph,
                                       const std::vector<Token>& target,
                                       std::size_t occurrence) {
  const std::size_t n = graph.tokens.size();
  std::vector<std::vector<std::size_t>> matches;
  if (!target.empty() && target.size() <= n) {
    for (std::size_t i = 0; i + target.size() <= n; ++i) {
      bool hit = true;
      for (std::size_t k = 0; k < target.size(); ++k) {
        if (graph.tokens[i + k].surface != target[k].surface) {
          hit = false;
          break;
        }
      }
      if (hit) {
        std::vector<std::size_t> m(target.size());
        for (std::size_t k = 0; k < target.size(); ++k) m[k] = i + k;
        matches.push_back(std::move(m));
      }
    }
  }
  if (matches.empty() && !target.empty()) {
    for (std::size_t i = 0; i < n; ++i)
      if (graph.tokens[i].surface == target[0].surface) matches.push_back({i});
  }
  if (matches.empty())
    fail(Errc::parse, "tdparse: target '" + (target.empty() ? std::string() : target[0].surface) +
                          "' not found in dependency parse of '" + graph.sentence_id + "'");
  return matches[std::min(occurrence, matches.size() - 1)];
}

std::vector<Token> graph_tokens(const DepGraph& graph, const std::vector<std::size_t>& indices) {
  std::vector<Token> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(graph.tokens[i]);
  return out;
}

}  // namespace

FeatureVector assemble_features(const std::vector<ContextBundle>& bundles, const MethodSpec& spec,
                                const EmbeddingMatrix& embedding, const DepGraph* graph,
                                int dep_max_depth) {
  if (bundles.empty()) fail(Errc::invalid_argument, "assemble_features: no occurrence bundles");
  if (family_needs_lexicon(spec.family) && !spec.lexicon)
    fail(Errc::invalid_argument, std::string("method ") + method_family_name(spec.family) +
                                     " requires a sentiment lexicon");
  if (family_needs_graph(spec.family) && !graph)
    fail(Errc::invalid_argument, std::string("method ") + method_family_name(spec.family) +
                                     " requires a dependency graph");

  std::vector<std::vector<double>> per_occurrence;
  FeatureVector out;

  for (std::size_t occ = 0; occ < bundles.size(); ++occ) {
    const ContextBundle& b = bundles[occ];
    std::vector<std::pair<std::string, std::vector<Token>>> contexts;

    auto dep_tokens = [&]() {
      std::vector<std::size_t> target_idx = locate_target(*graph, b.target, occ);
      return graph_tokens(*graph, dep_context(*graph, target_idx, dep_max_depth));
    };

    switch (spec.family) {
      case MethodFamily::TargetInd:
        contexts.emplace_back("full", b.full);
        break;
      case MethodFamily::TargetDepMinus:
        contexts.emplace_back("left", b.left);
        contexts.emplace_back("right", b.right);
        contexts.emplace_back("target", b.target);
        break;
      case MethodFamily::TargetDep:
        contexts.emplace_back("full", b.full);
        contexts.emplace_back("left", b.left);
        contexts.emplace_back("right", b.right);
        contexts.emplace_back("target", b.target);
        break;
      case MethodFamily::TargetDepPlus:
        contexts.emplace_back("full", b.full);
        contexts.emplace_back("left", b.left);
        contexts.emplace_back("right", b.right);
        contexts.emplace_back("target", b.target);
        contexts.emplace_back("left_s", mask_context(b.left, *spec.lexicon));
        contexts.emplace_back("right_s", mask_context(b.right, *spec.lexicon));
        break;
      case MethodFamily::TDParseMinus:
        contexts.emplace_back("dep", dep_tokens());
        break;
      case MethodFamily::TDParse:
        contexts.emplace_back("dep", dep_tokens());
        contexts.emplace_back("left", b.left);
        contexts.emplace_back("right", b.right);
        break;
      case MethodFamily::TDParsePlus:
        contexts.emplace_back("dep", dep_tokens());
        contexts.emplace_back("left", b.left);
        contexts.emplace_back("right", b.right);
        contexts.emplace_back("left_s", mask_context(b.left, *spec.lexicon));
        contexts.emplace_back("right_s", mask_context(b.right, *spec.lexicon));
        break;
    }

    std::vector<double> values;
    for (const auto& [name, tokens] : contexts) {
      std::vector<double> feats = context_features(tokens, embedding);
      if (occ == 0) {
        for (std::size_t k = 0; k < 5; ++k)
          out.layout.push_back({name, kPoolOpNames[k],
                                values.size() + k * embedding.dim, embedding.dim});
      }
      values.insert(values.end(), feats.begin(), feats.end());
    }
    per_occurrence.push_back(std::move(values));
  }

  const std::size_t width = per_occurrence[0].size();
  out.values.resize(width);
  if (per_occurrence.size() == 1) {
    out.values = std::move(per_occurrence[0]);
    return out;
  }

  // Median across occurrences, per dimension; even count takes the mean of
  // the two middle values.
  std::vector<double> column(per_occurrence.size());
  for (std::size_t j = 0; j < width; ++j) {
    for (std::size_t i = 0; i < per_occurrence.size(); ++i) column[i] = per_occurrence[i][j];
    std::sort(column.begin(), column.end());
    const std::size_t m = column.size() / 2;
    out.values[j] =
        column.size() % 2 == 1 ? column[m] : (column[m - 1] + column[m]) / 2.0;
  }
  return out;
}

}  // namespace tdsa
