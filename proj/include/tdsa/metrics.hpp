#pragma once

#include <array>
#include <vector>

#include "tdsa/corpus.hpp"

namespace tdsa {

double accuracy(const std::vector<Label>& predictions, const std::vector<Label>& gold);

// Unweighted mean of per-class F1 over all three classes. A class absent
// from both gold and predictions contributes F1 = 0; this is the strictest
// convention and it matters when comparing across datasets.
double macro_f1(const std::vector<Label>& predictions, const std::vector<Label>& gold);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::array<ClassScores, 3> per_class;  // NEG, NEU, POS
};

MetricReport score(const std::vector<Label>& predictions, const std::vector<Label>& gold);

}  // namespace tdsa
