#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tdsa/linear.hpp"
#include "tdsa/rng.hpp"
#include "tdsa/util.hpp"

using namespace tdsa;

namespace {

struct Problem {
  Matrix x;
  std::vector<Label> y;
};

// Three well-separated 2-D blobs, deterministic.
Problem blobs(std::size_t per_class, double spread = 0.3) {
  Problem p;
  p.x = Matrix(3 * per_class, 2);
  Rng rng(7);
  const double centers[3][2] = {{0.0, 0.0}, {4.0, 0.0}, {0.0, 4.0}};
  std::size_t row = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < per_class; ++i, ++row) {
      p.x.at(row, 0) = centers[c][0] + rng.uniform(-spread, spread);
      p.x.at(row, 1) = centers[c][1] + rng.uniform(-spread, spread);
      p.y.push_back(static_cast<Label>(c));
    }
  }
  return p;
}

// Primal objective of the one-vs-rest model, computed independently:
// sum over classes of 0.5*(|w|^2 + b^2) + C * sum_i max(0, 1 - y*s)^2.
double primal_objective(const LinearModel& model, const Matrix& x, const std::vector<Label>& y,
                        double c_value) {
  double total = 0.0;
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    double reg = model.biases[c] * model.biases[c];
    for (std::size_t j = 0; j < model.weights.cols; ++j)
      reg += model.weights.at(c, j) * model.weights.at(c, j);
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      double s = model.biases[c];
      for (std::size_t j = 0; j < x.cols; ++j) s += model.weights.at(c, j) * x.at(i, j);
      double yi = y[i] == model.classes[c] ? 1.0 : -1.0;
      double slack = std::max(0.0, 1.0 - yi * s);
      loss += slack * slack;
    }
    total += 0.5 * reg + c_value * loss;
  }
  return total;
}

}  // namespace

TEST_CASE("max-min scaler follows the affine examples") {
  Matrix col(3, 1);
  col.at(0, 0) = 2;
  col.at(1, 0) = 4;
  col.at(2, 0) = 6;
  MaxMinScaler scaler;
  scaler.fit(col);
  Matrix out = scaler.transform(col);
  CHECK(out.at(0, 0) == 0.0);
  CHECK(out.at(1, 0) == 0.5);
  CHECK(out.at(2, 0) == 1.0);

  SUBCASE("constant columns map to zero") {
    Matrix c(2, 1);
    c.at(0, 0) = 5;
    c.at(1, 0) = 5;
    MaxMinScaler s;
    s.fit(c);
    Matrix t = s.transform(c);
    CHECK(t.at(0, 0) == 0.0);
    CHECK(t.at(1, 0) == 0.0);
  }
  SUBCASE("test values extrapolate unclamped") {
    Matrix probe(1, 1);
    probe.at(0, 0) = 8;
    CHECK(scaler.transform(probe).at(0, 0) == doctest::Approx(1.5));
  }
  SUBCASE("transform before fit is an error") {
    MaxMinScaler fresh;
    CHECK_THROWS_AS(fresh.transform(col), Error);
  }
  SUBCASE("property: training transform always lands in [0,1]") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      Matrix m(2 + rng.below(20), 1 + rng.below(6));
      for (double& v : m.data) v = rng.uniform(-50.0, 50.0);
      if (trial % 3 == 0)
        for (std::size_t i = 0; i < m.rows; ++i) m.at(i, 0) = 7.0;  // constant column
      MaxMinScaler s;
      s.fit(m);
      Matrix t = s.transform(m);
      for (double v : t.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
}

TEST_CASE("svm separates blobs and is deterministic") {
  Problem p = blobs(20);
  SvmConfig config;
  config.c_value = 1.0;
  config.seed = 5;
  LinearModel model = train_svm(p.x, p.y, config);

  std::vector<Label> pred = model.predict_all(p.x);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == p.y[i]) ++hits;
  CHECK(hits == p.y.size());  // 100% training accuracy on separable data

  SUBCASE("identical weights across reruns") {
    LinearModel again = train_svm(p.x, p.y, config);
    CHECK(again.weights.data == model.weights.data);
    CHECK(again.biases == model.biases);
  }
  SUBCASE("per-class dual objective is non-increasing") {
    for (const auto& curve : model.objective_history) {
      REQUIRE(!curve.empty());
      for (std::size_t e = 1; e < curve.size(); ++e)
        CHECK(curve[e] <= curve[e - 1] + 1e-9);
    }
  }
  SUBCASE("positive rescaling of all scores never changes predictions") {
    LinearModel scaled = model;
    for (double& v : scaled.weights.data) v *= 3.5;
    for (double& v : scaled.biases) v *= 3.5;
    CHECK(scaled.predict_all(p.x) == pred);
  }
  SUBCASE("ties break toward the lowest class") {
    LinearModel zero = model;
    std::fill(zero.weights.data.begin(), zero.weights.data.end(), 0.0);
    std::fill(zero.biases.begin(), zero.biases.end(), 0.0);
    for (Label l : zero.predict_all(p.x)) CHECK(l == Label::Negative);
  }
}

TEST_CASE("trained objective beats random perturbations") {
  Problem p = blobs(7, 0.8);  // 21 points, some slack
  SvmConfig config;
  config.c_value = 1.0;
  config.tolerance = 1e-8;
  LinearModel model = train_svm(p.x, p.y, config);
  double trained = primal_objective(model, p.x, p.y, config.c_value);

  Rng rng(11);
  for (int k = 0; k < 1000; ++k) {
    LinearModel probe = model;
    double norm = 0.0;
    std::vector<double> direction(probe.weights.data.size() + probe.biases.size());
    for (double& v : direction) {
      v = rng.uniform(-1.0, 1.0);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    const double radius = 0.1;
    std::size_t at = 0;
    for (double& v : probe.weights.data) v += radius * direction[at++] / norm;
    for (double& v : probe.biases) v += radius * direction[at++] / norm;
    CHECK(primal_objective(probe, p.x, p.y, config.c_value) >= trained - 1e-9);
  }
}

TEST_CASE("svm rejects degenerate inputs") {
  Matrix x(2, 1);
  x.at(0, 0) = 0;
  x.at(1, 0) = 1;
  SUBCASE("single class") {
    CHECK_THROWS_AS(train_svm(x, {Label::Positive, Label::Positive}, {}), Error);
  }
  SUBCASE("non-finite feature") {
    x.at(0, 0) = std::nan("");
    CHECK_THROWS_AS(train_svm(x, {Label::Positive, Label::Negative}, {}), Error);
  }
  SUBCASE("non-positive C") {
    SvmConfig bad;
    bad.c_value = 0.0;
    CHECK_THROWS_AS(train_svm(x, {Label::Positive, Label::Negative}, bad), Error);
  }
}

namespace {

// Imbalanced nearly-1-D data where a weakly regularized model collapses to
// the majority class but C=1 fits the boundary.
Problem imbalanced() {
  Problem p;
  const std::size_t neg = 40, pos = 20;
  p.x = Matrix(neg + pos, 1);
  for (std::size_t i = 0; i < neg; ++i) {
    p.x.at(i, 0) = 0.40 + 0.002 * static_cast<double>(i % 5);
    p.y.push_back(Label::Negative);
  }
  for (std::size_t i = 0; i < pos; ++i) {
    p.x.at(neg + i, 0) = 0.60 + 0.002 * static_cast<double>(i % 5);
    p.y.push_back(Label::Positive);
  }
  return p;
}

double manual_fold_accuracy(const Problem& p, const std::vector<std::size_t>& test_idx,
                            double c_value, const SvmConfig& base) {
  std::vector<bool> in_test(p.y.size(), false);
  for (std::size_t i : test_idx) in_test[i] = true;
  std::vector<std::size_t> train_idx;
  for (std::size_t i = 0; i < p.y.size(); ++i)
    if (!in_test[i]) train_idx.push_back(i);

  auto gather = [&](const std::vector<std::size_t>& idx, Matrix& m, std::vector<Label>& y) {
    m = Matrix(idx.size(), p.x.cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      std::copy(p.x.row(idx[i]), p.x.row(idx[i]) + p.x.cols, m.row(i));
      y.push_back(p.y[idx[i]]);
    }
  };
  Matrix train_x, test_x;
  std::vector<Label> train_y, test_y;
  gather(train_idx, train_x, train_y);
  gather(test_idx, test_x, test_y);

  MaxMinScaler scaler;
  scaler.fit(train_x);
  SvmConfig config = base;
  config.c_value = c_value;
  LinearModel model = train_svm(scaler.transform(train_x), train_y, config);
  std::vector<Label> pred = model.predict_all(scaler.transform(test_x));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == test_y[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

}  // namespace

TEST_CASE("cross validation selects C by mean fold accuracy") {
  SUBCASE("a one-value grid returns that value") {
    Problem p = blobs(10);
    CvResult cv = cv_select_c(p.x, p.y, {0.5}, 5, 1);
    CHECK(cv.best_c == 0.5);
    CHECK(cv.entries.size() == 1);
  }
  SUBCASE("identical scores prefer the smallest C") {
    Problem p = blobs(10);  // separable at every C in the grid
    CvResult cv = cv_select_c(p.x, p.y, {10.0, 1.0, 0.1}, 5, 1);
    for (const CvEntry& e : cv.entries)
      CHECK(e.mean_accuracy == cv.entries[0].mean_accuracy);
    CHECK(cv.best_c == 0.1);
  }
  SUBCASE("only the larger C separates the imbalanced fixture") {
    Problem p = imbalanced();
    SvmConfig base;
    base.seed = 3;
    CvResult cv = cv_select_c(p.x, p.y, {0.01, 1.0}, 5, 3, base);

    // exhaustive fold evaluation oracle, fold membership taken from the result
    for (const CvEntry& entry : cv.entries) {
      for (std::size_t f = 0; f < cv.fold_test_indices.size(); ++f) {
        double want = manual_fold_accuracy(p, cv.fold_test_indices[f], entry.c, base);
        CHECK(entry.fold_accuracy[f] == want);
      }
    }
    const CvEntry& weak = cv.entries[0];
    const CvEntry& strong = cv.entries[1];
    CHECK(weak.mean_accuracy < strong.mean_accuracy);
    CHECK(weak.mean_accuracy == doctest::Approx(2.0 / 3.0).epsilon(0.01));
    CHECK(strong.mean_accuracy == doctest::Approx(1.0));
    CHECK(cv.best_c == 1.0);
  }
  SUBCASE("folds are stratified and cover everything exactly once") {
    Problem p = blobs(10);
    CvResult cv = cv_select_c(p.x, p.y, {1.0}, 5, 9);
    std::vector<std::size_t> seen;
    for (const auto& fold : cv.fold_test_indices) {
      std::array<std::size_t, 3> per_class{0, 0, 0};
      for (std::size_t i : fold) {
        seen.push_back(i);
        ++per_class[static_cast<std::size_t>(p.y[i])];
      }
      for (std::size_t c : per_class) CHECK(c == 2);  // 10 per class over 5 folds
    }
    std::sort(seen.begin(), seen.end());
    CHECK(seen.size() == p.y.size());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
  }
  SUBCASE("a class smaller than k is an error naming the class") {
    Matrix x(4, 1);
    std::vector<Label> y = {Label::Negative, Label::Negative, Label::Negative, Label::Positive};
    try {
      cv_select_c(x, y, {1.0}, 2, 1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("positive") != std::string::npos);
    }
  }
}

TEST_CASE("model serialization round trips") {
  Problem p = blobs(5);
  SvmConfig config;
  config.c_value = 2.0;
  config.seed = 17;
  LinearModel model = train_svm(p.x, p.y, config);
  std::string bytes = save_model(model);
  LinearModel back = load_model(bytes);
  CHECK(back.classes == model.classes);
  CHECK(back.weights.data == model.weights.data);
  CHECK(back.biases == model.biases);
  CHECK(back.config.c_value == model.config.c_value);
  CHECK(back.predict_all(p.x) == model.predict_all(p.x));

  CHECK_THROWS_AS(load_model("garbage"), Error);
}
