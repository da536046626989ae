#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdsa/corpus.hpp"
#include "tdsa/embedding.hpp"
#include "tdsa/matrix.hpp"
#include "tdsa/text.hpp"

namespace tdsa {

enum class Arch { Lstm, TdLstm, TcLstm };

const char* arch_name(Arch arch);
std::optional<Arch> arch_from_name(std::string_view name);

// Gate parameters of one LSTM cell. All math is float64; that is what the
// finite-difference gradient tolerances are calibrated for.
struct LstmCell {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Matrix w_input, u_input;
  Matrix w_forget, u_forget;
  Matrix w_output, u_output;
  Matrix w_cand, u_cand;
  std::vector<double> b_input, b_forget, b_output, b_cand;
};

struct SoftmaxLayer {
  Matrix w;  // 3 x in_dim
  std::vector<double> b;
};

// A complete classifier: one cell for the plain LSTM, a left and a right
// cell for the two-sided architectures. The softmax consumes the final
// hidden state (plain) or the two concatenated final states.
struct Network {
  Arch arch = Arch::Lstm;
  std::size_t embed_dim = 0;  // raw embedding dim; TCLSTM steps carry 2x this
  std::size_t hidden_dim = 0;
  LstmCell left;
  LstmCell right;  // unused for Arch::Lstm
  SoftmaxLayer softmax;
};

struct ParamView {
  std::string name;
  std::span<double> values;
};

// Flat views over every parameter tensor, in a fixed order shared by
// initialization, SGD and the gradient checker.
std::vector<ParamView> param_views(Network& net);

Network init_network(Arch arch, std::size_t embed_dim, std::size_t hidden_dim,
                     std::uint64_t seed, double init_scale = 0.003);
Network zeros_like(const Network& net);

using Step = std::vector<double>;
using Sequence = std::vector<Step>;

struct CellCache {
  Sequence inputs;
  Sequence gate_i, gate_f, gate_o, gate_g, cell, hidden;
};

// Runs the cell over the sequence from zero initial state. Returns the final
// hidden state (zeros for an empty sequence); all per-step states go to the
// cache when given.
std::vector<double> cell_forward(const LstmCell& cell, const Sequence& inputs,
                                 CellCache* cache = nullptr);

// Exact BPTT given the forward cache and the gradient on the final hidden
// state. Parameter gradients accumulate into `grad`.
void cell_backward(const LstmCell& cell, const CellCache& cache,
                   std::span<const double> d_final_hidden, LstmCell& grad);

// Model input: sequences already embedded, padded and truncated.
struct ModelInput {
  Sequence full;   // Arch::Lstm
  Sequence left;   // left ++ target, processed left to right
  Sequence right;  // target ++ right, processed target-outward (reversed)
};

struct LabeledInput {
  ModelInput input;
  Label label = Label::Neutral;
};

// Builds the architecture's input from one occurrence bundle. Sequences are
// pre-padded with zero vectors to pad_length and truncated keeping the tokens
// nearest the target. TCLSTM steps are the token vector concatenated with the
// mean target vector.
ModelInput build_inputs(const ContextBundle& bundle, Arch arch, const EmbeddingMatrix& embedding,
                        std::size_t pad_length);

// Longest raw (untruncated) sequence the architecture would see, across all
// bundles; used to derive pad_length from the training data.
std::size_t max_sequence_length(const std::vector<ContextBundle>& bundles, Arch arch);

struct ForwardCache {
  CellCache left, right;
  std::vector<double> softmax_in;
  std::vector<double> probs;
};

std::vector<double> network_logits(const Network& net, const ModelInput& input,
                                   ForwardCache* cache = nullptr);
// Softmax cross-entropy of the gold label; fills the cache for backward.
double network_loss(const Network& net, const ModelInput& input, Label gold,
                    ForwardCache& cache);
void network_backward(const Network& net, const ForwardCache& cache, Label gold, Network& grad);
Label network_predict(const Network& net, const ModelInput& input);

struct TrainSpec {
  double learning_rate = 0.01;
  std::size_t max_epochs = 300;
  std::size_t patience = 10;
  std::uint64_t seed = 1;
  double validation_fraction = 0.2;
  // Dedicated seed for the train/validation split so every model seed sees
  // the same split.
  std::uint64_t split_seed = 92873;
  std::size_t hidden_dim = 0;  // 0: use the embedding dim
};

struct EpochStats {
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  Network net;  // parameters from the best-validation epoch
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;  // 1-based
};

// Plain SGD, batch size 1. Stops after `patience` epochs without a new best
// validation accuracy, or at max_epochs; returns the best epoch's parameters.
TrainResult train(Arch arch, std::size_t embed_dim, const std::vector<LabeledInput>& data,
                  const TrainSpec& spec);

struct SeedStudy {
  std::vector<std::uint64_t> seeds;
  std::vector<double> macro_f1;  // per seed, on the fixed test set
  std::vector<double> accuracy;
  double mean = 0.0;
  double max_value = 0.0;
  double min_value = 0.0;
  double stddev = 0.0;  // population
};

SeedStudy seed_study(Arch arch, std::size_t embed_dim, const std::vector<LabeledInput>& train_data,
                     const std::vector<LabeledInput>& test_data,
                     const std::vector<std::uint64_t>& seeds, const TrainSpec& base);

// JSON shape header line + concatenated little-endian float64 blocks in
// param_views order.
std::string save_network(const Network& net);
Network load_network(std::string_view bytes);

}  // namespace tdsa
