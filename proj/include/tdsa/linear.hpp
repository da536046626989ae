#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tdsa/corpus.hpp"
#include "tdsa/matrix.hpp"

namespace tdsa {

// Per-dimension affine map of training values onto [0,1]. Constant columns
// map to 0; transformed test values may leave [0,1] and are not clamped.
class MaxMinScaler {
 public:
  void fit(const Matrix& features);
  Matrix transform(const Matrix& features) const;
  bool fitted() const { return fitted_; }

  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }

 private:
  std::vector<double> mins_;
  std::vector<double> maxs_;
  bool fitted_ = false;
};

struct SvmConfig {
  double c_value = 1.0;
  double tolerance = 1e-4;
  std::size_t max_iterations = 10000;
  std::uint64_t seed = 1;
};

// One-vs-rest linear classifier. Prediction is the argmax of per-class
// scores; ties go to the lowest class in the fixed NEG < NEU < POS order.
struct LinearModel {
  std::vector<Label> classes;
  Matrix weights;               // classes x dims
  std::vector<double> biases;   // per class
  SvmConfig config;
  // Dual objective after each epoch, one curve per one-vs-rest problem.
  std::vector<std::vector<double>> objective_history;

  std::vector<double> scores(std::span<const double> x) const;
  Label predict(std::span<const double> x) const;
  std::vector<Label> predict_all(const Matrix& features) const;
};

// L2-regularized L2-loss SVM trained by dual coordinate descent, one
// one-vs-rest problem per class. Deterministic given (data, config).
LinearModel train_svm(const Matrix& features, const std::vector<Label>& labels,
                      const SvmConfig& config);

struct CvEntry {
  double c = 0.0;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
};

struct CvResult {
  double best_c = 0.0;
  std::vector<CvEntry> entries;  // grid order
  // Test-fold membership (indices into the input), exposed for audits.
  std::vector<std::vector<std::size_t>> fold_test_indices;
};

// Stratified k-fold selection of C by mean accuracy; ties prefer the smaller
// C. A fresh scaler is fitted inside each fold on that fold's training
// portion only.
CvResult cv_select_c(const Matrix& features, const std::vector<Label>& labels,
                     const std::vector<double>& grid, std::size_t k, std::uint64_t seed,
                     const SvmConfig& base = {});

// JSON header line + flat little-endian float64 block (weights, then biases).
std::string save_model(const LinearModel& model);
LinearModel load_model(std::string_view bytes);

constexpr double kDefaultCGrid[] = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};

}  // namespace tdsa
