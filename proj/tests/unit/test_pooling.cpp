#include <doctest.h>

#include <cmath>

#include "tdsa/pooling.hpp"
#include "tdsa/rng.hpp"
#include "tdsa/util.hpp"

using namespace tdsa;

namespace {

// Independent scalar-loop reference for the five pooling ops, kept free of
// any call into the implementation. Summation order is left to right over
// rows, matching the declared convention.
double reference_pool_one(const Matrix& m, PoolOp op, std::size_t j) {
  const std::size_t n = m.rows;
  if (n == 0) return 0.0;
  switch (op) {
    case PoolOp::Max: {
      double v = m.at(0, j);
      for (std::size_t i = 1; i < n; ++i)
        if (m.at(i, j) > v) v = m.at(i, j);
      return v;
    }
    case PoolOp::Min: {
      double v = m.at(0, j);
      for (std::size_t i = 1; i < n; ++i)
        if (m.at(i, j) < v) v = m.at(i, j);
      return v;
    }
    case PoolOp::Avg: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += m.at(i, j);
      return s / static_cast<double>(n);
    }
    case PoolOp::Std: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += m.at(i, j);
      double mean = s / static_cast<double>(n);
      double sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) sq += (m.at(i, j) - mean) * (m.at(i, j) - mean);
      return std::sqrt(sq / static_cast<double>(n));
    }
    case PoolOp::Prod: {
      double v = m.at(0, j);
      for (std::size_t i = 1; i < n; ++i) v *= m.at(i, j);
      return v;
    }
  }
  return 0.0;
}

EmbeddingMatrix tiny_embedding() {
  return load_text_embeddings(
      "good 0.5 1.0 -0.5\n"
      "bad -1.0 0.25 2.0\n"
      "phone 0.125 -0.75 0.375\n"
      "the 0.0625 0.0625 0.0625\n");
}

Token tok(const char* s, std::size_t at) {
  return {s, {at, at + std::string(s).size()}};
}

}  // namespace

TEST_CASE("pooling singleton and two-row examples") {
  Matrix single(1, 2);
  single.at(0, 0) = 1.0;
  single.at(0, 1) = -2.0;
  for (PoolOp op : {PoolOp::Max, PoolOp::Min, PoolOp::Avg, PoolOp::Prod})
    CHECK(pool(single, op) == std::vector<double>{1.0, -2.0});
  CHECK(pool(single, PoolOp::Std) == std::vector<double>{0.0, 0.0});

  Matrix two(2, 2);
  two.at(0, 0) = 1;
  two.at(0, 1) = 2;
  two.at(1, 0) = 3;
  two.at(1, 1) = 4;
  CHECK(pool(two, PoolOp::Max) == std::vector<double>{3, 4});
  CHECK(pool(two, PoolOp::Min) == std::vector<double>{1, 2});
  CHECK(pool(two, PoolOp::Avg) == std::vector<double>{2, 3});
  CHECK(pool(two, PoolOp::Prod) == std::vector<double>{3, 8});
  CHECK(pool(two, PoolOp::Std) == std::vector<double>{1, 1});

  Matrix empty(0, 3);
  for (PoolOp op : kAllPoolOps) CHECK(pool(empty, op) == std::vector<double>{0, 0, 0});
}

TEST_CASE("pooling agrees bit for bit with the scalar reference") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = rng.below(8);       // up to 7 rows, zero included
    std::size_t d = 1 + rng.below(5);   // 1..5 dims
    Matrix m(n, d);
    for (double& v : m.data) v = rng.uniform(-2.0, 2.0);
    for (PoolOp op : kAllPoolOps) {
      std::vector<double> got = pool(m, op);
      for (std::size_t j = 0; j < d; ++j) {
        double want = reference_pool_one(m, op, j);
        CHECK(got[j] == want);  // exact, same summation order
      }
    }
  }
}

TEST_CASE("context features concatenate the five ops in fixed order") {
  EmbeddingMatrix emb = tiny_embedding();
  std::vector<Token> tokens = {tok("good", 0), tok("phone", 5)};
  std::vector<double> feats = context_features(tokens, emb);
  REQUIRE(feats.size() == 5 * emb.dim);

  Matrix m(2, emb.dim);
  for (std::size_t i = 0; i < 2; ++i) {
    auto v = emb.lookup(tokens[i].surface);
    std::copy(v.begin(), v.end(), m.row(i));
  }
  for (std::size_t k = 0; k < 5; ++k) {
    std::vector<double> want = pool(m, kAllPoolOps[k]);
    for (std::size_t j = 0; j < emb.dim; ++j) CHECK(feats[k * emb.dim + j] == want[j]);
  }

  SUBCASE("single token, d=3: length 15") {
    CHECK(context_features({tok("good", 0)}, emb).size() == 15);
  }
  SUBCASE("OOV tokens pool as zero rows") {
    std::vector<double> z = context_features({tok("zzz", 0)}, emb);
    for (double v : z) CHECK(v == 0.0);
  }
}

TEST_CASE("conll parsing builds validated graphs") {
  const char* two =
      "# sent_id = a\n"
      "1\ti\t_\t_\t_\t_\t2\tnsubj\t_\t_\n"
      "2\tlove\t_\t_\t_\t_\t0\troot\t_\t_\n"
      "3\tnlp\t_\t_\t_\t_\t2\tobj\t_\t_\n"
      "\n"
      "# sent_id = b\n"
      "1\tyes\t_\t_\t_\t_\t0\troot\t_\t_\n";
  std::vector<DepGraph> graphs = parse_conll(two);
  REQUIRE(graphs.size() == 2);
  CHECK(graphs[0].sentence_id == "a");
  CHECK(graphs[0].tokens.size() == 3);
  CHECK(graphs[0].heads[1] == DepGraph::kRoot);  // root is "love"
  CHECK(graphs[0].heads[0] == 1);
  CHECK(graphs[0].tokens[2].surface == "nlp");

  SUBCASE("multiword token ranges are skipped") {
    std::vector<DepGraph> g = parse_conll(
        "1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_\n"
        "1\tde\t_\t_\t_\t_\t2\tcase\t_\t_\n"
        "2\tel\t_\t_\t_\t_\t0\troot\t_\t_\n");
    REQUIRE(g.size() == 1);
    CHECK(g[0].tokens.size() == 2);
  }
  SUBCASE("head cycles are an error") {
    CHECK_THROWS_AS(parse_conll("1\ta\t_\t_\t_\t_\t2\tdep\t_\t_\n"
                                "2\tb\t_\t_\t_\t_\t1\tdep\t_\t_\n"
                                "3\tc\t_\t_\t_\t_\t0\troot\t_\t_\n"),
                    Error);
  }
  SUBCASE("multiple roots are an error") {
    CHECK_THROWS_AS(parse_conll("1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n"
                                "2\tb\t_\t_\t_\t_\t0\troot\t_\t_\n"),
                    Error);
  }
}

TEST_CASE("dependency context walks the undirected graph") {
  // t0 -> t2, t1 -> t2, t2 root, t3 -> t2, t4 -> t3, t5 -> t4
  DepGraph g;
  g.sentence_id = "hand";
  const char* words[] = {"a", "b", "c", "d", "e", "f"};
  std::size_t at = 0;
  for (const char* w : words) {
    g.tokens.push_back(tok(w, at));
    at += 2;
  }
  g.heads = {2, 2, DepGraph::kRoot, 2, 3, 4};
  g.relations.assign(6, "dep");

  SUBCASE("whole connected component for a tree is the sentence") {
    CHECK(dep_context(g, {4}) == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  }
  SUBCASE("depth-bounded variants") {
    CHECK(dep_context(g, {4}, 0) == std::vector<std::size_t>{4});
    CHECK(dep_context(g, {4}, 1) == std::vector<std::size_t>{3, 4, 5});
    CHECK(dep_context(g, {4}, 2) == std::vector<std::size_t>{2, 3, 4, 5});
  }
  SUBCASE("single token sentence") {
    DepGraph one;
    one.tokens = {tok("solo", 0)};
    one.heads = {DepGraph::kRoot};
    one.relations = {"root"};
    CHECK(dep_context(one, {0}) == std::vector<std::size_t>{0});
  }
  SUBCASE("output is a superset of targets, subset of sentence") {
    std::vector<std::size_t> out = dep_context(g, {1, 5}, 1);
    for (std::size_t t : {std::size_t{1}, std::size_t{5}})
      CHECK(std::find(out.begin(), out.end(), t) != out.end());
    for (std::size_t i : out) CHECK(i < g.tokens.size());
  }
  SUBCASE("invalid target index errors") {
    CHECK_THROWS_AS(dep_context(g, {9}), Error);
  }
}

namespace {

ContextBundle make_bundle(const std::vector<const char*>& left,
                          const std::vector<const char*>& target,
                          const std::vector<const char*>& right) {
  ContextBundle b;
  std::size_t at = 0;
  auto push = [&](const std::vector<const char*>& words, std::vector<Token>& out) {
    for (const char* w : words) {
      Token t = tok(w, at);
      at += t.surface.size() + 1;
      out.push_back(t);
      b.full.push_back(t);
    }
  };
  push(left, b.left);
  push(target, b.target);
  push(right, b.right);
  return b;
}

}  // namespace

TEST_CASE("assemble_features layouts and median pooling") {
  EmbeddingMatrix emb = tiny_embedding();
  ContextBundle b1 = make_bundle({"the", "good"}, {"phone"}, {"bad"});
  ContextBundle b2 = make_bundle({}, {"phone"}, {"good", "bad", "the"});

  SUBCASE("context sets per family") {
    MethodSpec ind{MethodFamily::TargetInd, nullptr};
    FeatureVector fv = assemble_features({b1}, ind, emb);
    CHECK(fv.values.size() == 5 * emb.dim);
    REQUIRE(fv.layout.size() == 5);
    CHECK(fv.layout[0].context == "full");
    CHECK(fv.layout[0].op == "max");

    MethodSpec dep{MethodFamily::TargetDep, nullptr};
    FeatureVector fv2 = assemble_features({b1}, dep, emb);
    CHECK(fv2.values.size() == 4 * 5 * emb.dim);
    CHECK(fv2.layout.size() == 20);
    CHECK(fv2.layout.front().context == "full");
    CHECK(fv2.layout.back().context == "target");
  }

  SUBCASE("median across occurrences: even count is the middle-pair mean") {
    MethodSpec spec{MethodFamily::TargetDepMinus, nullptr};
    FeatureVector a = assemble_features({b1}, spec, emb);
    FeatureVector bv = assemble_features({b2}, spec, emb);
    FeatureVector median = assemble_features({b1, b2}, spec, emb);
    REQUIRE(a.values.size() == median.values.size());
    for (std::size_t j = 0; j < median.values.size(); ++j)
      CHECK(median.values[j] == (a.values[j] + bv.values[j]) / 2.0);

    FeatureVector swapped = assemble_features({b2, b1}, spec, emb);
    CHECK(swapped.values == median.values);
  }

  SUBCASE("single occurrence median is the identity") {
    MethodSpec spec{MethodFamily::TargetDep, nullptr};
    FeatureVector once = assemble_features({b1}, spec, emb);
    FeatureVector again = assemble_features({b1}, spec, emb);
    CHECK(once.values == again.values);
  }

  SUBCASE("layout is stable across instances under one spec") {
    MethodSpec spec{MethodFamily::TargetDepMinus, nullptr};
    CHECK(assemble_features({b1}, spec, emb).layout ==
          assemble_features({b2}, spec, emb).layout);
  }

  SUBCASE("missing lexicon or graph is an error") {
    MethodSpec plus{MethodFamily::TargetDepPlus, nullptr};
    CHECK_THROWS_AS(assemble_features({b1}, plus, emb), Error);
    MethodSpec parse{MethodFamily::TDParse, nullptr};
    CHECK_THROWS_AS(assemble_features({b1}, parse, emb), Error);
  }
}

TEST_CASE("tdparse families pool over the dependency context") {
  EmbeddingMatrix emb = tiny_embedding();
  // parse of "the good phone bad": heads chosen so the tree is connected
  DepGraph g;
  g.tokens = {tok("the", 0), tok("good", 4), tok("phone", 9), tok("bad", 15)};
  g.heads = {2, 2, DepGraph::kRoot, 2};
  g.relations = {"det", "amod", "root", "amod"};

  ContextBundle b = make_bundle({"the", "good"}, {"phone"}, {"bad"});
  MethodSpec spec{MethodFamily::TDParseMinus, nullptr};
  FeatureVector fv = assemble_features({b}, spec, emb, &g);
  // full component == whole sentence, so dep context features equal the
  // full-context features of target-ind
  MethodSpec ind{MethodFamily::TargetInd, nullptr};
  FeatureVector full = assemble_features({b}, ind, emb);
  CHECK(fv.values == full.values);
  CHECK(fv.layout[0].context == "dep");

  SUBCASE("tdparse = dep + left + right contexts") {
    MethodSpec td{MethodFamily::TDParse, nullptr};
    FeatureVector v = assemble_features({b}, td, emb, &g);
    CHECK(v.values.size() == 3 * 5 * emb.dim);
  }
  SUBCASE("depth bound shrinks the context") {
    FeatureVector shallow = assemble_features({b}, spec, emb, &g, 0);
    // depth 0 keeps only the target token
    ContextBundle only_target = make_bundle({}, {"phone"}, {});
    FeatureVector want =
        assemble_features({only_target}, MethodSpec{MethodFamily::TargetInd, nullptr}, emb);
    CHECK(shallow.values == want.values);
  }
  SUBCASE("target missing from the parse errors") {
    ContextBundle odd = make_bundle({}, {"zzz"}, {});
    CHECK_THROWS_AS(assemble_features({odd}, spec, emb, &g), Error);
  }
}
