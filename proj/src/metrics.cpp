#include "tdsa/metrics.hpp"

#include "tdsa/util.hpp"

namespace tdsa {

namespace {

void check_lengths(const std::vector<Label>& predictions, const std::vector<Label>& gold) {
  if (predictions.empty()) fail(Errc::invalid_argument, "metrics: empty prediction list");
  if (predictions.size() != gold.size())
    fail(Errc::invalid_argument, "metrics: prediction/gold length mismatch");
}

}  // namespace

double accuracy(const std::vector<Label>& predictions, const std::vector<Label>& gold) {
  check_lengths(predictions, gold);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (predictions[i] == gold[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

MetricReport score(const std::vector<Label>& predictions, const std::vector<Label>& gold) {
  check_lengths(predictions, gold);
  MetricReport report;
  report.accuracy = accuracy(predictions, gold);

  double f1_sum = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      bool pred_c = static_cast<std::size_t>(predictions[i]) == c;
      bool gold_c = static_cast<std::size_t>(gold[i]) == c;
      if (pred_c && gold_c) ++tp;
      if (pred_c && !gold_c) ++fp;
      if (!pred_c && gold_c) ++fn;
    }
    ClassScores& s = report.per_class[c];
    s.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    s.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    s.f1 = s.precision + s.recall == 0.0
               ? 0.0
               : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    f1_sum += s.f1;
  }
  report.macro_f1 = f1_sum / 3.0;
  return report;
}

double macro_f1(const std::vector<Label>& predictions, const std::vector<Label>& gold) {
  return score(predictions, gold).macro_f1;
}

}  // namespace tdsa
