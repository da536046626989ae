#include "tdsa/linear.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>

#include <json.hpp>

#include "tdsa/rng.hpp"
#include "tdsa/util.hpp"

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

namespace tdsa {

void MaxMinScaler::fit(const Matrix& features) {
  if (features.rows == 0) fail(Errc::invalid_argument, "scaler: cannot fit on empty features");
  mins_.assign(features.cols, 0.0);
  maxs_.assign(features.cols, 0.0);
  for (std::size_t j = 0; j < features.cols; ++j) {
    double lo = features.at(0, j), hi = features.at(0, j);
    for (std::size_t i = 1; i < features.rows; ++i) {
      lo = std::min(lo, features.at(i, j));
      hi = std::max(hi, features.at(i, j));
    }
    mins_[j] = lo;
    maxs_[j] = hi;
  }
  fitted_ = true;
}

Matrix MaxMinScaler::transform(const Matrix& features) const {
  if (!fitted_) fail(Errc::state, "scaler: transform before fit");
  if (features.cols != mins_.size())
    fail(Errc::invalid_argument, "scaler: feature width mismatch");
  Matrix out(features.rows, features.cols);
  for (std::size_t j = 0; j < features.cols; ++j) {
    double range = maxs_[j] - mins_[j];
    for (std::size_t i = 0; i < features.rows; ++i) {
      out.at(i, j) = range == 0.0 ? 0.0 : (features.at(i, j) - mins_[j]) / range;
    }
  }
  return out;
}

namespace {

struct BinarySolution {
  std::vector<double> w;
  double bias = 0.0;
  std::vector<double> objective;  // dual objective after each epoch
};

// Dual coordinate descent for the L2-regularized L2-loss SVC, with the usual
// projected-gradient shrinking. The bias is an implicit unit feature and is
// regularized with the rest of w.
BinarySolution solve_l2r_l2loss_svc(const Matrix& x, const std::vector<signed char>& y,
                                    double C, double eps, std::size_t max_iter, Rng& rng) {
  const std::size_t l = x.rows;
  const std::size_t n = x.cols;
  const double diag = 1.0 / (2.0 * C);
  const double inf = std::numeric_limits<double>::infinity();

  BinarySolution sol;
  sol.w.assign(n, 0.0);
  std::vector<double> alpha(l, 0.0);
  std::vector<double> qd(l);
  std::vector<std::size_t> index(l);
  for (std::size_t i = 0; i < l; ++i) {
    double nrm = 1.0;  // bias column
    const double* xi = x.row(i);
    for (std::size_t j = 0; j < n; ++j) nrm += xi[j] * xi[j];
    qd[i] = diag + nrm;
    index[i] = i;
  }

  std::size_t active = l;
  double pg_max_old = inf;
  double pg_min_old = -inf;

  auto record_objective = [&]() {
    double v = sol.bias * sol.bias;
    for (std::size_t j = 0; j < n; ++j) v += sol.w[j] * sol.w[j];
    for (std::size_t i = 0; i < l; ++i) v += alpha[i] * (alpha[i] * diag - 2.0);
    sol.objective.push_back(v / 2.0);
  };

  std::size_t iter = 0;
  while (iter < max_iter) {
    double pg_max_new = -inf;
    double pg_min_new = inf;

    for (std::size_t i = 0; i < active; ++i) {
      std::size_t j = i + rng.below(active - i);
      std::swap(index[i], index[j]);
    }

    for (std::size_t s = 0; s < active; ++s) {
      std::size_t i = index[s];
      const double yi = y[i];
      const double* xi = x.row(i);

      double g = sol.bias;
      for (std::size_t j = 0; j < n; ++j) g += sol.w[j] * xi[j];
      g = yi * g - 1.0 + alpha[i] * diag;

      double pg = 0.0;
      if (alpha[i] == 0.0) {
        if (g > pg_max_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g < 0.0) pg = g;
      } else {
        pg = g;
      }
      pg_max_new = std::max(pg_max_new, pg);
      pg_min_new = std::min(pg_min_new, pg);

      if (std::fabs(pg) > 1.0e-12) {
        double alpha_old = alpha[i];
        alpha[i] = std::max(alpha[i] - g / qd[i], 0.0);
        double d = (alpha[i] - alpha_old) * yi;
        for (std::size_t j = 0; j < n; ++j) sol.w[j] += d * xi[j];
        sol.bias += d;
      }
    }

    ++iter;
    record_objective();

    if (pg_max_new - pg_min_new <= eps && std::fabs(pg_max_new) <= eps &&
        std::fabs(pg_min_new) <= eps) {
      if (active == l) break;
      active = l;
      pg_max_old = inf;
      pg_min_old = -inf;
      continue;
    }
    pg_max_old = pg_max_new <= 0.0 ? inf : pg_max_new;
    pg_min_old = pg_min_new >= 0.0 ? -inf : pg_min_new;
  }
  return sol;
}

}  // namespace

LinearModel train_svm(const Matrix& features, const std::vector<Label>& labels,
                      const SvmConfig& config) {
  if (features.rows != labels.size())
    fail(Errc::invalid_argument, "train_svm: feature/label count mismatch");
  if (features.rows == 0) fail(Errc::invalid_argument, "train_svm: empty training set");
  if (!(config.c_value > 0.0)) fail(Errc::invalid_argument, "train_svm: C must be positive");
  for (double v : features.data)
    if (!std::isfinite(v)) fail(Errc::invalid_argument, "train_svm: non-finite feature value");

  std::set<Label> present(labels.begin(), labels.end());
  if (present.size() < 2) fail(Errc::invalid_argument, "train_svm: need at least two classes");

  LinearModel model;
  model.classes.assign(present.begin(), present.end());  // NEG < NEU < POS
  model.config = config;
  model.weights = Matrix(model.classes.size(), features.cols);
  model.biases.assign(model.classes.size(), 0.0);

  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    std::vector<signed char> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
      y[i] = labels[i] == model.classes[c] ? 1 : -1;
    Rng rng(config.seed + 0x9E3779B97F4A7C15ULL * (c + 1));
    BinarySolution sol = solve_l2r_l2loss_svc(features, y, config.c_value, config.tolerance,
                                              config.max_iterations, rng);
    std::copy(sol.w.begin(), sol.w.end(), model.weights.row(c));
    model.biases[c] = sol.bias;
    model.objective_history.push_back(std::move(sol.objective));
  }
  return model;
}

std::vector<double> LinearModel::scores(std::span<const double> x) const {
  std::vector<double> out(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    double s = biases[c];
    const double* w = weights.row(c);
    for (std::size_t j = 0; j < weights.cols; ++j) s += w[j] * x[j];
    out[c] = s;
  }
  return out;
}

Label LinearModel::predict(std::span<const double> x) const {
  std::vector<double> s = scores(x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < s.size(); ++c)
    if (s[c] > s[best]) best = c;  // ties keep the lowest class index
  return classes[best];
}

std::vector<Label> LinearModel::predict_all(const Matrix& features) const {
  std::vector<Label> out;
  out.reserve(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) out.push_back(predict(features.row_span(i)));
  return out;
}

CvResult cv_select_c(const Matrix& features, const std::vector<Label>& labels,
                     const std::vector<double>& grid, std::size_t k, std::uint64_t seed,
                     const SvmConfig& base) {
  if (k < 2) fail(Errc::invalid_argument, "cv_select_c: need k >= 2 folds");
  if (grid.empty()) fail(Errc::invalid_argument, "cv_select_c: empty C grid");
  if (features.rows != labels.size())
    fail(Errc::invalid_argument, "cv_select_c: feature/label count mismatch");

  // Stratified fold assignment: shuffle each class then deal round-robin.
  std::vector<std::vector<std::size_t>> by_class(3);
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  for (std::size_t c = 0; c < 3; ++c) {
    if (!by_class[c].empty() && by_class[c].size() < k)
      fail(Errc::invalid_argument, std::string("cv_select_c: class ") + kLabelNames[c] +
                                       " has fewer instances than folds");
  }
  CvResult result;
  result.fold_test_indices.assign(k, {});
  Rng rng(seed);
  for (std::size_t c = 0; c < 3; ++c) {
    rng.shuffle(by_class[c]);
    for (std::size_t j = 0; j < by_class[c].size(); ++j)
      result.fold_test_indices[j % k].push_back(by_class[c][j]);
  }
  for (auto& fold : result.fold_test_indices) std::sort(fold.begin(), fold.end());

  auto gather = [&](const std::vector<std::size_t>& idx, Matrix& m, std::vector<Label>& y) {
    m = Matrix(idx.size(), features.cols);
    y.clear();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      std::copy(features.row(idx[i]), features.row(idx[i]) + features.cols, m.row(i));
      y.push_back(labels[idx[i]]);
    }
  };

  std::vector<bool> in_fold(labels.size());
  for (double c_value : grid) {
    CvEntry entry;
    entry.c = c_value;
    for (std::size_t f = 0; f < k; ++f) {
      std::fill(in_fold.begin(), in_fold.end(), false);
      for (std::size_t i : result.fold_test_indices[f]) in_fold[i] = true;
      std::vector<std::size_t> train_idx, test_idx;
      for (std::size_t i = 0; i < labels.size(); ++i)
        (in_fold[i] ? test_idx : train_idx).push_back(i);

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
      entry.fold_accuracy.push_back(static_cast<double>(hits) /
                                    static_cast<double>(std::max<std::size_t>(1, pred.size())));
    }
    double sum = 0.0;
    for (double a : entry.fold_accuracy) sum += a;
    entry.mean_accuracy = sum / static_cast<double>(entry.fold_accuracy.size());
    result.entries.push_back(std::move(entry));
  }

  const CvEntry* best = nullptr;
  for (const CvEntry& e : result.entries) {
    if (!best || e.mean_accuracy > best->mean_accuracy ||
        (e.mean_accuracy == best->mean_accuracy && e.c < best->c))
      best = &e;
  }
  result.best_c = best->c;
  return result;
}

std::string save_model(const LinearModel& model) {
  nlohmann::json header;
  header["kind"] = "linear-svm";
  for (Label c : model.classes) header["classes"].push_back(label_name(c));
  header["dims"] = model.weights.cols;
  header["config"] = {{"c_value", model.config.c_value},
                      {"tolerance", model.config.tolerance},
                      {"max_iterations", model.config.max_iterations},
                      {"seed", model.config.seed}};
  std::string out = header.dump();
  out.push_back('\n');
  auto append_doubles = [&out](const std::vector<double>& v) {
    std::size_t at = out.size();
    out.resize(at + v.size() * sizeof(double));
    std::memcpy(out.data() + at, v.data(), v.size() * sizeof(double));
  };
  append_doubles(model.weights.data);
  append_doubles(model.biases);
  return out;
}

LinearModel load_model(std::string_view bytes) {
  std::size_t nl = bytes.find('\n');
  if (nl == std::string_view::npos) fail(Errc::parse, "model: missing header line");
  nlohmann::json header = nlohmann::json::parse(bytes.substr(0, nl), nullptr, false);
  if (header.is_discarded() || header.value("kind", "") != "linear-svm")
    fail(Errc::parse, "model: bad header");

  LinearModel model;
  for (const auto& name : header["classes"]) {
    auto label = label_from_name(name.get<std::string>());
    if (!label) fail(Errc::parse, "model: unknown class name");
    model.classes.push_back(*label);
  }
  std::size_t dims = header["dims"].get<std::size_t>();
  model.config.c_value = header["config"]["c_value"].get<double>();
  model.config.tolerance = header["config"]["tolerance"].get<double>();
  model.config.max_iterations = header["config"]["max_iterations"].get<std::size_t>();
  model.config.seed = header["config"]["seed"].get<std::uint64_t>();

  std::string_view block = bytes.substr(nl + 1);
  std::size_t want = (model.classes.size() * dims + model.classes.size()) * sizeof(double);
  if (block.size() != want) fail(Errc::parse, "model: weight block size mismatch");
  model.weights = Matrix(model.classes.size(), dims);
  std::memcpy(model.weights.data.data(), block.data(), model.classes.size() * dims * sizeof(double));
  model.biases.assign(model.classes.size(), 0.0);
  std::memcpy(model.biases.data(), block.data() + model.classes.size() * dims * sizeof(double),
              model.classes.size() * sizeof(double));
  return model;
}

}  // namespace tdsa
