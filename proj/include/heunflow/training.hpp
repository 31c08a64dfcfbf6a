// Optimizers, training loops, and metric logging.
//
// Runs are deterministic functions of (seed, config, dataset). The wall_time
// column is measured but written as 0 unless record_wall_time is set, so a
// metrics file is byte-reproducible by default.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "heunflow/data.hpp"
#include "heunflow/models.hpp"

namespace heunflow {

enum class OptKind { Sgd, Adam };

struct OptimizerConfig {
  OptKind kind = OptKind::Adam;
  double lr = 1e-3;
  double momentum = 0.0;  // sgd
  double beta1 = 0.9;     // adam
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg) : cfg_(cfg) {
    if (!(cfg.lr > 0.0)) throw Error("learning rate must be positive");
  }

  void step(const std::vector<Parameter*>& params) {
    if (slot_a_.empty()) {
      slot_a_.resize(params.size());
      slot_b_.resize(params.size());
      for (std::size_t i = 0; i < params.size(); ++i) {
        slot_a_[i].assign(params[i]->value.numel(), 0.0);
        slot_b_[i].assign(params[i]->value.numel(), 0.0);
      }
    }
    ++t_;
    for (std::size_t i = 0; i < params.size(); ++i) {
      Parameter& p = *params[i];
      std::vector<double> w = p.value.copy_values();
      const std::vector<double>& g = p.grad.values();
      if (cfg_.kind == OptKind::Sgd) {
        std::vector<double>& vel = slot_a_[i];
        for (std::size_t k = 0; k < w.size(); ++k) {
          vel[k] = cfg_.momentum * vel[k] + g[k];
          w[k] -= cfg_.lr * vel[k];
        }
      } else {
        std::vector<double>& m = slot_a_[i];
        std::vector<double>& v = slot_b_[i];
        const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
        const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
        for (std::size_t k = 0; k < w.size(); ++k) {
          m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g[k];
          v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g[k] * g[k];
          const double mhat = m[k] / bc1;
          const double vhat = v[k] / bc2;
          w[k] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
      }
      p.value = Tensor(p.value.shape(), std::move(w));
    }
  }

 private:
  OptimizerConfig cfg_;
  int t_ = 0;
  std::vector<std::vector<double>> slot_a_;  // sgd velocity / adam m
  std::vector<std::vector<double>> slot_b_;  // adam v
};

struct MetricsRow {
  int iteration = 0;
  double train_loss = 0.0;
  double eval_loss = 0.0;
  double eval_accuracy = 0.0;
  double wall_time_s = 0.0;
};

struct MetricsHistory {
  std::vector<MetricsRow> rows;
  bool aborted = false;
  std::string abort_reason;

  void write_csv(std::ostream& os, bool include_wall_time) const {
    os << "iteration,train_loss,eval_loss,eval_accuracy,wall_time_s\n";
    char buf[128];
    for (const MetricsRow& r : rows) {
      std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.9g\n", r.iteration, r.train_loss,
                    r.eval_loss, r.eval_accuracy, include_wall_time ? r.wall_time_s : 0.0);
      os << buf;
    }
  }
};

enum class ModelKind { Block, Lstm, Gru };

inline const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Block: return "block";
    case ModelKind::Lstm: return "lstm";
    case ModelKind::Gru: return "gru";
  }
  return "?";
}

struct TrainConfig {
  ModelKind model = ModelKind::Block;
  BlockSpec block{};
  std::size_t hidden = 128;
  std::size_t seq_step_dim = 0;  // recurrent classifiers: features per step
  OptimizerConfig optimizer{};
  int epochs = 10;
  std::size_t batch_size = 128;
  std::uint64_t seed = 1;
  bool record_wall_time = false;
};

inline std::unique_ptr<Classifier> make_classifier(const TrainConfig& cfg, std::size_t in_dim,
                                                   std::size_t n_classes, Rng& rng) {
  switch (cfg.model) {
    case ModelKind::Block:
      return std::make_unique<BlockClassifier>(cfg.block, in_dim, cfg.hidden, n_classes, rng);
    case ModelKind::Lstm:
    case ModelKind::Gru: {
      const std::size_t step = cfg.seq_step_dim ? cfg.seq_step_dim : in_dim;
      if (in_dim % step != 0)
        throw Error("feature width " + std::to_string(in_dim) + " is not a multiple of step " +
                    std::to_string(step));
      return std::make_unique<RecurrentClassifier>(
          cfg.model == ModelKind::Lstm ? CellKind::Lstm : CellKind::Gru, step, cfg.hidden,
          n_classes, rng);
    }
  }
  throw Error("unknown model kind");
}

inline double argmax_accuracy(const Tensor& logits, const std::vector<int>& labels,
                              std::size_t offset = 0) {
  std::size_t hits = 0;
  const std::size_t rows = logits.rows(), cols = logits.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < cols; ++c)
      if (logits.at(r, c) > logits.at(r, best)) best = c;
    if (static_cast<int>(best) == labels[offset + r]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(rows);
}

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

// Forward-only pass over the dataset in fixed-order batches; nothing is
// recorded on a tape.
inline EvalResult evaluate(Classifier& model, const LabeledDataset& data,
                           std::size_t eval_batch = 256) {
  TapeBinding none(nullptr);
  const std::size_t n = data.size();
  const std::size_t dim = data.dim();
  double loss_sum = 0.0;
  double hit_sum = 0.0;
  for (std::size_t begin = 0; begin < n; begin += eval_batch) {
    const std::size_t b = std::min(eval_batch, n - begin);
    std::vector<double> feats(data.features.raw() + begin * dim,
                              data.features.raw() + (begin + b) * dim);
    std::vector<double> labs(b);
    for (std::size_t r = 0; r < b; ++r) labs[r] = data.labels[begin + r];
    Tensor x(Shape{b, dim}, std::move(feats));
    Tensor logits = model.forward(none, x);
    loss_sum += softmax_cross_entropy(logits, Tensor(Shape{b}, std::move(labs))).item() * b;
    hit_sum += argmax_accuracy(logits, data.labels, begin) * b;
  }
  return {loss_sum / n, hit_sum / n};
}

struct TrainResult {
  MetricsHistory history;
  std::unique_ptr<Classifier> model;
};

// Epoch loop over a classification dataset. Deterministic under a fixed
// config; a non-finite loss aborts and returns the history so far.
inline TrainResult train_classifier(const TrainConfig& cfg, const LabeledDataset& train,
                                    const LabeledDataset& eval_set) {
  Rng rng(cfg.seed);
  std::unique_ptr<Classifier> model = make_classifier(cfg, train.dim(), train.n_classes, rng);
  Optimizer opt(cfg.optimizer);
  std::vector<Parameter*> params = model->parameters();

  TrainResult out;
  const auto t0 = std::chrono::steady_clock::now();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    try {
      for (Batch& batch : shuffled_batches(train, cfg.batch_size, rng)) {
        Tape tape;
        TapeBinding bind(&tape);
        Tensor logits = model->forward(bind, batch.features);
        Tensor l = softmax_cross_entropy(logits, batch.label_tensor);
        loss_sum += l.item() * batch.labels.size();
        tape.backward(l);
        bind.collect();
        opt.step(params);
      }
    } catch (const NonFiniteLoss& e) {
      out.history.aborted = true;
      out.history.abort_reason = e.what();
      break;
    }
    EvalResult ev = evaluate(*model, eval_set);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.history.rows.push_back({epoch, loss_sum / train.size(), ev.loss, ev.accuracy, elapsed});
  }
  out.model = std::move(model);
  return out;
}

struct SeqTrainConfig {
  BlockFamily family = BlockFamily::Heun;
  double alpha = 0.5;
  std::size_t hidden = 32;
  OptimizerConfig optimizer{OptKind::Adam, 1e-2};
  int iterations = 100;
  std::uint64_t seed = 1;
  std::size_t gen_seed_len = 48;    // true values fed before free running
  std::size_t gen_window = 64;      // scored steps right after the seed
  bool record_wall_time = false;
};

struct SeqTrainResult {
  MetricsHistory history;
  std::vector<double> generated;   // full free-running wave
  double gen_mse = 0.0;            // over the scored window
  double gen_score = 0.0;          // 1 - mse/var, clamped to [0, 1]
};

namespace detail {

// Generation quality in [0, 1]: fraction of the target window's variance
// explained by the free-running prediction.
inline std::pair<double, double> generation_scores(const std::vector<double>& generated,
                                                   const SequencePair& pair,
                                                   std::size_t seed_len, std::size_t window) {
  const std::size_t end = std::min(generated.size(), pair.targets.size());
  const std::size_t begin = std::min(seed_len, end);
  const std::size_t stop = std::min(begin + window, end);
  if (stop <= begin) return {0.0, 0.0};
  double se = 0.0, mean = 0.0;
  for (std::size_t t = begin; t < stop; ++t) mean += pair.targets[t];
  mean /= static_cast<double>(stop - begin);
  double var = 0.0;
  for (std::size_t t = begin; t < stop; ++t) {
    const double d = generated[t] - pair.targets[t];
    se += d * d;
    const double dv = pair.targets[t] - mean;
    var += dv * dv;
  }
  const double mse = se / static_cast<double>(stop - begin);
  var /= static_cast<double>(stop - begin);
  const double score = var > 0.0 ? std::max(0.0, std::min(1.0, 1.0 - mse / var)) : 0.0;
  return {mse, score};
}

}  // namespace detail

// Teacher-forced training on the series, one full pass per iteration, with
// a free-running generation score per iteration.
inline SeqTrainResult train_seq_predictor(const SeqTrainConfig& cfg, const SequenceDataset& data) {
  if (data.series.empty()) throw Error("empty sequence dataset");
  Rng rng(cfg.seed);
  SeqPredictor model(cfg.family, cfg.alpha, cfg.hidden, rng);
  Optimizer opt(cfg.optimizer);
  std::vector<Parameter*> params = model.parameters();

  SeqTrainResult out;
  const auto t0 = std::chrono::steady_clock::now();
  for (int it = 1; it <= cfg.iterations; ++it) {
    double loss_sum = 0.0;
    try {
      for (const SequencePair& pair : data.series) {
        Tape tape;
        TapeBinding bind(&tape);
        SeqPredictor::ForwardResult fr = model.forward(bind, pair);
        loss_sum += fr.loss.item();
        tape.backward(fr.loss);
        bind.collect();
        opt.step(params);
      }
    } catch (const NonFiniteLoss& e) {
      out.history.aborted = true;
      out.history.abort_reason = e.what();
      break;
    }
    const SequencePair& probe = data.series.front();
    std::vector<double> gen =
        model.generate(probe.inputs, cfg.gen_seed_len, probe.inputs.size());
    auto [mse, score] = detail::generation_scores(gen, probe, cfg.gen_seed_len, cfg.gen_window);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.history.rows.push_back({it, loss_sum / static_cast<double>(data.series.size()),
                                mse, score, elapsed});
    if (it == cfg.iterations) {
      out.generated = std::move(gen);
      out.gen_mse = mse;
      out.gen_score = score;
    }
  }
  return out;
}

}  // namespace heunflow
