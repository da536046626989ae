#include "tdsa/recurrent.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "tdsa/metrics.hpp"
#include "tdsa/rng.hpp"
#include "tdsa/util.hpp"

static_assert(std::endian::native == std::endian::little,
              "network serialization assumes a little-endian host");

namespace tdsa {

const char* arch_name(Arch arch) {
  switch (arch) {
    case Arch::Lstm: return "lstm";
    case Arch::TdLstm: return "tdlstm";
    case Arch::TcLstm: return "tclstm";
  }
  return "?";
}

std::optional<Arch> arch_from_name(std::string_view name) {
  std::string n = to_lower_ascii(trim(name));
  if (n == "lstm") return Arch::Lstm;
  if (n == "tdlstm") return Arch::TdLstm;
  if (n == "tclstm") return Arch::TcLstm;
  return std::nullopt;
}

namespace {

LstmCell make_cell(std::size_t input_dim, std::size_t hidden_dim) {
  LstmCell cell;
  cell.input_dim = input_dim;
  cell.hidden_dim = hidden_dim;
  for (Matrix* m : {&cell.w_input, &cell.w_forget, &cell.w_output, &cell.w_cand})
    *m = Matrix(hidden_dim, input_dim);
  for (Matrix* m : {&cell.u_input, &cell.u_forget, &cell.u_output, &cell.u_cand})
    *m = Matrix(hidden_dim, hidden_dim);
  for (std::vector<double>* b : {&cell.b_input, &cell.b_forget, &cell.b_output, &cell.b_cand})
    b->assign(hidden_dim, 0.0);
  return cell;
}

void cell_views(LstmCell& cell, std::string_view prefix, std::vector<ParamView>& out) {
  auto add = [&](const char* name, std::vector<double>& v) {
    out.push_back({std::string(prefix) + name, {v.data(), v.size()}});
  };
  add("w_input", cell.w_input.data);
  add("u_input", cell.u_input.data);
  add("b_input", cell.b_input);
  add("w_forget", cell.w_forget.data);
  add("u_forget", cell.u_forget.data);
  add("b_forget", cell.b_forget);
  add("w_output", cell.w_output.data);
  add("u_output", cell.u_output.data);
  add("b_output", cell.b_output);
  add("w_cand", cell.w_cand.data);
  add("u_cand", cell.u_cand.data);
  add("b_cand", cell.b_cand);
}

}  // namespace

std::vector<ParamView> param_views(Network& net) {
  std::vector<ParamView> out;
  cell_views(net.left, net.arch == Arch::Lstm ? "cell." : "left.", out);
  if (net.arch != Arch::Lstm) cell_views(net.right, "right.", out);
  out.push_back({"softmax.w", {net.softmax.w.data.data(), net.softmax.w.data.size()}});
  out.push_back({"softmax.b", {net.softmax.b.data(), net.softmax.b.size()}});
  return out;
}

Network init_network(Arch arch, std::size_t embed_dim, std::size_t hidden_dim,
                     std::uint64_t seed, double init_scale) {
  if (embed_dim == 0 || hidden_dim == 0)
    fail(Errc::invalid_argument, "init_network: zero dimension");
  Network net;
  net.arch = arch;
  net.embed_dim = embed_dim;
  net.hidden_dim = hidden_dim;
  const std::size_t input_dim = arch == Arch::TcLstm ? 2 * embed_dim : embed_dim;
  const std::size_t softmax_in = arch == Arch::Lstm ? hidden_dim : 2 * hidden_dim;
  net.left = make_cell(input_dim, hidden_dim);
  if (arch != Arch::Lstm) net.right = make_cell(input_dim, hidden_dim);
  net.softmax.w = Matrix(3, softmax_in);
  net.softmax.b.assign(3, 0.0);

  Rng rng(seed);
  for (ParamView& view : param_views(net))
    for (double& v : view.values) v = rng.uniform(-init_scale, init_scale);
  return net;
}

Network zeros_like(const Network& net) {
  Network z = net;
  for (ParamView& view : param_views(z)) std::fill(view.values.begin(), view.values.end(), 0.0);
  return z;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// out = M v + b
void affine(const Matrix& m, std::span<const double> v, const std::vector<double>& b,
            std::vector<double>& out) {
  out.resize(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double s = b[i];
    const double* row = m.row(i);
    for (std::size_t j = 0; j < m.cols; ++j) s += row[j] * v[j];
    out[i] = s;
  }
}

// out += M^T v
void add_transposed(const Matrix& m, std::span<const double> v, std::vector<double>& out) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* row = m.row(i);
    for (std::size_t j = 0; j < m.cols; ++j) out[j] += row[j] * v[i];
  }
}

// grad += outer(d, v)
void add_outer(Matrix& grad, std::span<const double> d, std::span<const double> v) {
  for (std::size_t i = 0; i < grad.rows; ++i) {
    double* row = grad.row(i);
    for (std::size_t j = 0; j < grad.cols; ++j) row[j] += d[i] * v[j];
  }
}

}  // namespace

std::vector<double> cell_forward(const LstmCell& cell, const Sequence& inputs, CellCache* cache) {
  const std::size_t h = cell.hidden_dim;
  std::vector<double> hidden(h, 0.0), c(h, 0.0);
  std::vector<double> ai, af, ao, ag;

  if (cache) {
    *cache = CellCache{};
    cache->inputs = inputs;
  }

  auto preact = [&](const Matrix& w, const Matrix& u, const std::vector<double>& b,
                    const Step& x, std::vector<double>& out) {
    affine(w, x, b, out);
    for (std::size_t k = 0; k < h; ++k) {
      double s = out[k];
      const double* row = u.row(k);
      for (std::size_t j = 0; j < h; ++j) s += row[j] * hidden[j];
      out[k] = s;
    }
  };

  for (const Step& x : inputs) {
    if (x.size() != cell.input_dim)
      fail(Errc::invalid_argument, "cell_forward: input dim " + std::to_string(x.size()) +
                                       " != " + std::to_string(cell.input_dim));
    preact(cell.w_input, cell.u_input, cell.b_input, x, ai);
    preact(cell.w_forget, cell.u_forget, cell.b_forget, x, af);
    preact(cell.w_output, cell.u_output, cell.b_output, x, ao);
    preact(cell.w_cand, cell.u_cand, cell.b_cand, x, ag);

    std::vector<double> gi(h), gf(h), go(h), gg(h), nc(h), nh(h);
    for (std::size_t k = 0; k < h; ++k) {
      gi[k] = sigmoid(ai[k]);
      gf[k] = sigmoid(af[k]);
      go[k] = sigmoid(ao[k]);
      gg[k] = std::tanh(ag[k]);
      nc[k] = gf[k] * c[k] + gi[k] * gg[k];
      nh[k] = go[k] * std::tanh(nc[k]);
    }
    c = nc;
    hidden = nh;
    if (cache) {
      cache->gate_i.push_back(std::move(gi));
      cache->gate_f.push_back(std::move(gf));
      cache->gate_o.push_back(std::move(go));
      cache->gate_g.push_back(std::move(gg));
      cache->cell.push_back(c);
      cache->hidden.push_back(hidden);
    }
  }
  return hidden;
}

void cell_backward(const LstmCell& cell, const CellCache& cache,
                   std::span<const double> d_final_hidden, LstmCell& grad) {
  const std::size_t h = cell.hidden_dim;
  const std::size_t steps = cache.inputs.size();
  if (steps == 0) return;
  if (cache.hidden.size() != steps) fail(Errc::state, "cell_backward: missing forward cache");

  std::vector<double> dh(d_final_hidden.begin(), d_final_hidden.end());
  std::vector<double> dc(h, 0.0);
  std::vector<double> da_i(h), da_f(h), da_o(h), da_g(h);

  for (std::size_t t = steps; t-- > 0;) {
    const std::vector<double>& gi = cache.gate_i[t];
    const std::vector<double>& gf = cache.gate_f[t];
    const std::vector<double>& go = cache.gate_o[t];
    const std::vector<double>& gg = cache.gate_g[t];
    const std::vector<double>& ct = cache.cell[t];
    const std::vector<double> zero(h, 0.0);
    const std::vector<double>& c_prev = t == 0 ? zero : cache.cell[t - 1];
    const std::vector<double>& h_prev = t == 0 ? zero : cache.hidden[t - 1];

    for (std::size_t k = 0; k < h; ++k) {
      double tc = std::tanh(ct[k]);
      double d_o = dh[k] * tc;
      double d_c = dc[k] + dh[k] * go[k] * (1.0 - tc * tc);
      double d_f = d_c * c_prev[k];
      double d_i = d_c * gg[k];
      double d_g = d_c * gi[k];
      dc[k] = d_c * gf[k];  // becomes dc for t-1
      da_i[k] = d_i * gi[k] * (1.0 - gi[k]);
      da_f[k] = d_f * gf[k] * (1.0 - gf[k]);
      da_o[k] = d_o * go[k] * (1.0 - go[k]);
      da_g[k] = d_g * (1.0 - gg[k] * gg[k]);
    }

    const Step& x = cache.inputs[t];
    add_outer(grad.w_input, da_i, x);
    add_outer(grad.w_forget, da_f, x);
    add_outer(grad.w_output, da_o, x);
    add_outer(grad.w_cand, da_g, x);
    add_outer(grad.u_input, da_i, h_prev);
    add_outer(grad.u_forget, da_f, h_prev);
    add_outer(grad.u_output, da_o, h_prev);
    add_outer(grad.u_cand, da_g, h_prev);
    for (std::size_t k = 0; k < h; ++k) {
      grad.b_input[k] += da_i[k];
      grad.b_forget[k] += da_f[k];
      grad.b_output[k] += da_o[k];
      grad.b_cand[k] += da_g[k];
    }

    std::fill(dh.begin(), dh.end(), 0.0);
    add_transposed(cell.u_input, da_i, dh);
    add_transposed(cell.u_forget, da_f, dh);
    add_transposed(cell.u_output, da_o, dh);
    add_transposed(cell.u_cand, da_g, dh);
  }
}

std::vector<double> network_logits(const Network& net, const ModelInput& input,
                                   ForwardCache* cache) {
  std::vector<double> z;
  if (net.arch == Arch::Lstm) {
    z = cell_forward(net.left, input.full, cache ? &cache->left : nullptr);
  } else {
    std::vector<double> hl = cell_forward(net.left, input.left, cache ? &cache->left : nullptr);
    std::vector<double> hr = cell_forward(net.right, input.right, cache ? &cache->right : nullptr);
    z = std::move(hl);
    z.insert(z.end(), hr.begin(), hr.end());
  }
  std::vector<double> logits;
  affine(net.softmax.w, z, net.softmax.b, logits);
  if (cache) cache->softmax_in = std::move(z);
  return logits;
}

namespace {

std::vector<double> softmax(const std::vector<double>& logits) {
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

double network_loss(const Network& net, const ModelInput& input, Label gold,
                    ForwardCache& cache) {
  std::vector<double> logits = network_logits(net, input, &cache);
  cache.probs = softmax(logits);
  double p = cache.probs[static_cast<std::size_t>(gold)];
  return -std::log(std::max(p, 1e-300));
}

void network_backward(const Network& net, const ForwardCache& cache, Label gold, Network& grad) {
  std::vector<double> dlogits = cache.probs;
  dlogits[static_cast<std::size_t>(gold)] -= 1.0;

  add_outer(grad.softmax.w, dlogits, cache.softmax_in);
  for (std::size_t k = 0; k < dlogits.size(); ++k) grad.softmax.b[k] += dlogits[k];

  std::vector<double> dz(cache.softmax_in.size(), 0.0);
  add_transposed(net.softmax.w, dlogits, dz);

  if (net.arch == Arch::Lstm) {
    cell_backward(net.left, cache.left, dz, grad.left);
  } else {
    const std::size_t h = net.hidden_dim;
    cell_backward(net.left, cache.left, std::span<const double>(dz.data(), h), grad.left);
    cell_backward(net.right, cache.right, std::span<const double>(dz.data() + h, h), grad.right);
  }
}

Label network_predict(const Network& net, const ModelInput& input) {
  std::vector<double> logits = network_logits(net, input);
  std::size_t best = 0;
  for (std::size_t c = 1; c < logits.size(); ++c)
    if (logits[c] > logits[best]) best = c;
  return static_cast<Label>(best);
}

namespace {

Step embed_step(const EmbeddingMatrix& embedding, const Token& tok) {
  auto vec = embedding.lookup(tok.surface);
  return Step(vec.begin(), vec.end());
}

// Keep the window of `pad` sequence elements nearest the target, then
// pre-pad with zero steps up to `pad`.
Sequence finalize(Sequence seq, std::size_t pad, std::size_t step_dim, bool keep_tail,
                  std::size_t target_center = 0) {
  if (pad == 0) fail(Errc::invalid_argument, "build_inputs: pad_length must be positive");
  if (seq.size() > pad) {
    std::size_t start;
    if (keep_tail) {
      start = seq.size() - pad;
    } else {
      std::size_t half = pad / 2;
      start = target_center > half ? target_center - half : 0;
      start = std::min(start, seq.size() - pad);
    }
    seq.erase(seq.begin(), seq.begin() + static_cast<long>(start));
    seq.resize(pad, Step(step_dim, 0.0));
  }
  if (seq.size() < pad) {
    Sequence padded(pad - seq.size(), Step(step_dim, 0.0));
    padded.insert(padded.end(), seq.begin(), seq.end());
    return padded;
  }
  return seq;
}

}  // namespace

ModelInput build_inputs(const ContextBundle& bundle, Arch arch, const EmbeddingMatrix& embedding,
                        std::size_t pad_length) {
  if (bundle.target.empty()) fail(Errc::invalid_argument, "build_inputs: empty target");
  ModelInput out;
  const std::size_t d = embedding.dim;

  if (arch == Arch::Lstm) {
    Sequence seq;
    seq.reserve(bundle.full.size());
    for (const Token& tok : bundle.full) seq.push_back(embed_step(embedding, tok));
    // center of the target occurrence within the full sequence
    std::size_t t0 = 0;
    for (std::size_t i = 0; i < bundle.full.size(); ++i)
      if (bundle.full[i].span == bundle.target.front().span) {
        t0 = i;
        break;
      }
    std::size_t center = t0 + bundle.target.size() / 2;
    out.full = finalize(std::move(seq), pad_length, d, false, center);
    return out;
  }

  std::vector<double> target_vec(d, 0.0);
  if (arch == Arch::TcLstm) {
    for (const Token& tok : bundle.target) {
      auto vec = embedding.lookup(tok.surface);
      for (std::size_t j = 0; j < d; ++j) target_vec[j] += vec[j];
    }
    for (double& v : target_vec) v /= static_cast<double>(bundle.target.size());
  }

  auto make_step = [&](const Token& tok) {
    Step step = embed_step(embedding, tok);
    if (arch == Arch::TcLstm) step.insert(step.end(), target_vec.begin(), target_vec.end());
    return step;
  };
  const std::size_t step_dim = arch == Arch::TcLstm ? 2 * d : d;

  Sequence left_seq;
  for (const Token& tok : bundle.left) left_seq.push_back(make_step(tok));
  for (const Token& tok : bundle.target) left_seq.push_back(make_step(tok));

  Sequence right_seq;
  for (const Token& tok : bundle.target) right_seq.push_back(make_step(tok));
  for (const Token& tok : bundle.right) right_seq.push_back(make_step(tok));
  std::reverse(right_seq.begin(), right_seq.end());

  out.left = finalize(std::move(left_seq), pad_length, step_dim, true);
  out.right = finalize(std::move(right_seq), pad_length, step_dim, true);
  return out;
}

std::size_t max_sequence_length(const std::vector<ContextBundle>& bundles, Arch arch) {
  std::size_t mx = 1;
  for (const ContextBundle& b : bundles) {
    if (arch == Arch::Lstm) {
      mx = std::max(mx, b.full.size());
    } else {
      mx = std::max(mx, b.left.size() + b.target.size());
      mx = std::max(mx, b.target.size() + b.right.size());
    }
  }
  return mx;
}

namespace {

double evaluate_accuracy(const Network& net, const std::vector<LabeledInput>& data,
                         const std::vector<std::size_t>& indices) {
  if (indices.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i : indices)
    if (network_predict(net, data[i].input) == data[i].label) ++hits;
  return static_cast<double>(hits) / static_cast<double>(indices.size());
}

}  // namespace

TrainResult train(Arch arch, std::size_t embed_dim, const std::vector<LabeledInput>& data,
                  const TrainSpec& spec) {
  if (data.empty()) fail(Errc::invalid_argument, "train: no training data");
  if (spec.patience >= spec.max_epochs)
    fail(Errc::invalid_argument, "train: patience must be below max_epochs");
  if (!(spec.validation_fraction > 0.0 && spec.validation_fraction < 1.0))
    fail(Errc::invalid_argument, "train: validation_fraction must be in (0,1)");

  // Stratified train/validation split with a dedicated seed, identical for
  // every model seed.
  std::vector<std::vector<std::size_t>> by_class(3);
  for (std::size_t i = 0; i < data.size(); ++i)
    by_class[static_cast<std::size_t>(data[i].label)].push_back(i);
  std::vector<std::size_t> train_idx, val_idx;
  Rng split_rng(spec.split_seed);
  for (std::size_t c = 0; c < 3; ++c) {
    auto& idx = by_class[c];
    if (idx.empty()) continue;
    if (idx.size() < 2)
      fail(Errc::invalid_argument,
           std::string("train: class ") + kLabelNames[c] +
               " has one instance; the validation split would leave it empty");
    split_rng.shuffle(idx);
    auto want = static_cast<std::size_t>(
        std::llround(spec.validation_fraction * static_cast<double>(idx.size())));
    want = std::max<std::size_t>(1, std::min(want, idx.size() - 1));
    for (std::size_t i = 0; i < idx.size(); ++i)
      (i < want ? val_idx : train_idx).push_back(idx[i]);
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());

  const std::size_t hidden = spec.hidden_dim ? spec.hidden_dim : embed_dim;
  Network net = init_network(arch, embed_dim, hidden, spec.seed);
  Network grad = zeros_like(net);

  TrainResult result;
  result.net = net;
  double best_acc = -1.0;
  std::size_t since_best = 0;
  Rng order_rng(spec.seed ^ 0xD1B54A32D192ED03ULL);

  for (std::size_t epoch = 1; epoch <= spec.max_epochs; ++epoch) {
    std::vector<std::size_t> order = train_idx;
    order_rng.shuffle(order);

    double loss_sum = 0.0;
    ForwardCache cache;
    auto views = param_views(net);
    auto gviews = param_views(grad);
    for (std::size_t i : order) {
      for (ParamView& gv : gviews) std::fill(gv.values.begin(), gv.values.end(), 0.0);
      loss_sum += network_loss(net, data[i].input, data[i].label, cache);
      network_backward(net, cache, data[i].label, grad);
      for (std::size_t p = 0; p < views.size(); ++p) {
        std::span<double> w = views[p].values;
        std::span<double> g = gviews[p].values;
        for (std::size_t k = 0; k < w.size(); ++k) w[k] -= spec.learning_rate * g[k];
      }
    }

    EpochStats stats;
    stats.train_loss = loss_sum / static_cast<double>(std::max<std::size_t>(1, order.size()));
    stats.val_accuracy = evaluate_accuracy(net, data, val_idx);
    result.history.push_back(stats);

    if (stats.val_accuracy > best_acc) {
      best_acc = stats.val_accuracy;
      result.net = net;
      result.best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
      if (since_best >= spec.patience) break;
    }
  }
  return result;
}

SeedStudy seed_study(Arch arch, std::size_t embed_dim, const std::vector<LabeledInput>& train_data,
                     const std::vector<LabeledInput>& test_data,
                     const std::vector<std::uint64_t>& seeds, const TrainSpec& base) {
  if (seeds.empty()) fail(Errc::invalid_argument, "seed_study: no seeds");
  SeedStudy study;
  study.seeds = seeds;

  std::vector<Label> gold;
  gold.reserve(test_data.size());
  for (const LabeledInput& li : test_data) gold.push_back(li.label);

  for (std::uint64_t seed : seeds) {
    TrainSpec spec = base;
    spec.seed = seed;
    TrainResult result = train(arch, embed_dim, train_data, spec);
    std::vector<Label> pred;
    pred.reserve(test_data.size());
    for (const LabeledInput& li : test_data) pred.push_back(network_predict(result.net, li.input));
    study.macro_f1.push_back(macro_f1(pred, gold));
    study.accuracy.push_back(accuracy(pred, gold));
  }

  double sum = 0.0;
  study.max_value = study.macro_f1[0];
  study.min_value = study.macro_f1[0];
  for (double v : study.macro_f1) {
    sum += v;
    study.max_value = std::max(study.max_value, v);
    study.min_value = std::min(study.min_value, v);
  }
  study.mean = sum / static_cast<double>(study.macro_f1.size());
  double sq = 0.0;
  for (double v : study.macro_f1) sq += (v - study.mean) * (v - study.mean);
  study.stddev = std::sqrt(sq / static_cast<double>(study.macro_f1.size()));
  return study;
}

std::string save_network(const Network& net) {
  Network copy = net;
  auto views = param_views(copy);
  nlohmann::json header;
  header["kind"] = "lstm-net";
  header["arch"] = arch_name(net.arch);
  header["embed_dim"] = net.embed_dim;
  header["hidden_dim"] = net.hidden_dim;
  header["params"] = nlohmann::json::array();
  for (const ParamView& v : views)
    header["params"].push_back({{"name", v.name}, {"size", v.values.size()}});

  std::string out = header.dump();
  out.push_back('\n');
  for (const ParamView& v : views) {
    std::size_t at = out.size();
    out.resize(at + v.values.size() * sizeof(double));
    std::memcpy(out.data() + at, v.values.data(), v.values.size() * sizeof(double));
  }
  return out;
}

Network load_network(std::string_view bytes) {
  std::size_t nl = bytes.find('\n');
  if (nl == std::string_view::npos) fail(Errc::parse, "network: missing header line");
  nlohmann::json header = nlohmann::json::parse(bytes.substr(0, nl), nullptr, false);
  if (header.is_discarded() || header.value("kind", "") != "lstm-net")
    fail(Errc::parse, "network: bad header");
  auto arch = arch_from_name(header["arch"].get<std::string>());
  if (!arch) fail(Errc::parse, "network: unknown arch");

  Network net = init_network(*arch, header["embed_dim"].get<std::size_t>(),
                             header["hidden_dim"].get<std::size_t>(), 0, 0.0);
  auto views = param_views(net);
  if (views.size() != header["params"].size())
    fail(Errc::parse, "network: parameter list mismatch");

  std::string_view block = bytes.substr(nl + 1);
  std::size_t at = 0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const nlohmann::json& p = header["params"][i];
    if (p["name"].get<std::string>() != views[i].name ||
        p["size"].get<std::size_t>() != views[i].values.size())
      fail(Errc::parse, "network: parameter '" + views[i].name + "' shape mismatch");
    std::size_t nbytes = views[i].values.size() * sizeof(double);
    if (at + nbytes > block.size()) fail(Errc::parse, "network: truncated weight block");
    std::memcpy(views[i].values.data(), block.data() + at, nbytes);
    at += nbytes;
  }
  if (at != block.size()) fail(Errc::parse, "network: trailing bytes after weights");
  return net;
}

}  // namespace tdsa
