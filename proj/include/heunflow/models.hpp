// Trainable models assembled from the block and recurrent primitives:
// block-stack classifiers over flat feature rows, LSTM/GRU classifiers over
// row sequences, and the sequence predictor used for wave generation.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heunflow/blocks.hpp"
#include "heunflow/recurrent.hpp"

namespace heunflow {

// Affine layer with optional activation; weight rows are output units.
struct DenseLayer {
  Parameter weight;
  Parameter bias;
  std::optional<Act> act;

  DenseLayer(const std::string& prefix, std::size_t in, std::size_t out,
             std::optional<Act> activation, Rng& rng)
      : weight(prefix + ".w", Tensor(Shape{out, in},
                                     rng.uniform_vec(out * in, -1.0 / std::sqrt(double(in)),
                                                     1.0 / std::sqrt(double(in))))),
        bias(prefix + ".b", Tensor::zeros(Shape{out})),
        act(activation) {}

  Tensor apply(TapeBinding& bind, const Tensor& x) {
    Tensor z = add_bias(matmul_nt(x, bind(weight)), bind(bias));
    return act ? activation(*act, z) : z;
  }

  std::vector<Parameter*> parameters() { return {&weight, &bias}; }
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Tensor forward(TapeBinding& bind, const Tensor& x) = 0;
  virtual std::vector<Parameter*> parameters() = 0;
};

// input projection -> L residual blocks on the hidden width -> logits.
class BlockClassifier final : public Classifier {
 public:
  BlockClassifier(BlockSpec spec, std::size_t in_dim, std::size_t hidden, std::size_t n_classes,
                  Rng& rng, Act block_act = Act::Tanh)
      : spec_(spec),
        input_("input", in_dim, hidden, Act::Tanh, rng),
        output_("output", hidden, n_classes, std::nullopt, rng) {
    const std::size_t n_maps = spec.share_weights ? 1 : static_cast<std::size_t>(spec.depth);
    for (std::size_t i = 0; i < n_maps; ++i)
      maps_.push_back(std::make_unique<DenseMap>(
          DenseMap::init("block" + std::to_string(i), hidden, rng, block_act)));
  }

  Tensor forward(TapeBinding& bind, const Tensor& x) override {
    Tensor h = input_.apply(bind, x);
    std::vector<const TransitionMap*> ptrs;
    ptrs.reserve(maps_.size());
    for (const auto& m : maps_) ptrs.push_back(m.get());
    h = stack_forward(spec_, std::span<const TransitionMap* const>(ptrs.data(), ptrs.size()),
                      bind, h)
            .output;
    return output_.apply(bind, h);
  }

  std::vector<Parameter*> parameters() override {
    std::vector<Parameter*> out = input_.parameters();
    for (const auto& m : maps_)
      for (Parameter* p : m->parameters()) out.push_back(p);
    for (Parameter* p : output_.parameters()) out.push_back(p);
    return out;
  }

  const BlockSpec& spec() const { return spec_; }

 private:
  BlockSpec spec_;
  DenseLayer input_;
  std::vector<std::unique_ptr<DenseMap>> maps_;
  DenseLayer output_;
};

enum class CellKind { Lstm, Gru };

// Consumes each feature row as a sequence of fixed-width steps and
// classifies from the last hidden state.
class RecurrentClassifier final : public Classifier {
 public:
  RecurrentClassifier(CellKind kind, std::size_t step_dim, std::size_t hidden,
                      std::size_t n_classes, Rng& rng)
      : kind_(kind), step_dim_(step_dim), hidden_(hidden),
        output_("output", hidden, n_classes, std::nullopt, rng) {
    if (kind == CellKind::Lstm)
      lstm_.emplace("lstm", step_dim, hidden, rng);
    else
      gru_.emplace("gru", step_dim, hidden, rng);
  }

  Tensor forward(TapeBinding& bind, const Tensor& x) override {
    if (x.rank() != 2 || x.cols() % step_dim_ != 0)
      throw ShapeMismatch("sequence classifier: " + shape_str(x.shape()) +
                          " does not divide into steps of " + std::to_string(step_dim_));
    const std::size_t steps = x.cols() / step_dim_;
    const std::size_t batch = x.rows();
    Tensor h = Tensor::zeros(Shape{batch, hidden_});
    LstmState state{h, h};
    for (std::size_t t = 0; t < steps; ++t) {
      Tensor xt = slice_cols(x, t * step_dim_, step_dim_);
      if (kind_ == CellKind::Lstm) {
        state = lstm_step(*lstm_, bind, xt, state);
        h = state.h;
      } else {
        h = gru_step(*gru_, bind, xt, h);
      }
    }
    return output_.apply(bind, h);
  }

  std::vector<Parameter*> parameters() override {
    std::vector<Parameter*> out =
        kind_ == CellKind::Lstm ? lstm_->parameters() : gru_->parameters();
    for (Parameter* p : output_.parameters()) out.push_back(p);
    return out;
  }

 private:
  CellKind kind_;
  std::size_t step_dim_;
  std::size_t hidden_;
  std::optional<LstmParams> lstm_;
  std::optional<GruParams> gru_;
  DenseLayer output_;
};

// Next-value predictor for scalar series. The LSTM hidden update is either
// used directly (Plain) or wrapped by the weighted corrector; the readout
// maps the hidden state to the predicted value.
class SeqPredictor {
 public:
  SeqPredictor(BlockFamily family, double alpha, std::size_t hidden, Rng& rng)
      : family_(family),
        alpha_(family == BlockFamily::ResNet ? 0.0
               : family == BlockFamily::Heun ? 0.5
                                             : alpha),
        hidden_(hidden),
        cell_("cell", 1, hidden, rng),
        readout_("readout", hidden, 1, std::nullopt, rng) {
    if (family == BlockFamily::ExtendedHeun && !(alpha >= 0.0 && alpha <= 1.0))
      throw AlphaOutOfRange("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }

  struct ForwardResult {
    Tensor loss;                      // mean squared next-step error
    std::vector<double> predictions;  // one per input step
  };

  // Teacher-forced pass over one series.
  ForwardResult forward(TapeBinding& bind, const SequencePair& pair) {
    if (pair.inputs.size() != pair.targets.size())
      throw ShapeMismatch("sequence pair with unequal input/target lengths");
    LstmState state = lstm_zero_state(1, hidden_);
    Tensor total = Tensor::scalar(0.0);
    ForwardResult out;
    out.predictions.reserve(pair.inputs.size());
    for (std::size_t t = 0; t < pair.inputs.size(); ++t) {
      Tensor x = Tensor::matrix(1, 1, {pair.inputs[t]});
      state = advance(bind, x, state);
      Tensor pred = readout_.apply(bind, state.h);
      out.predictions.push_back(pred[0]);
      total = add(total, mse(pred, Tensor::matrix(1, 1, {pair.targets[t]})));
    }
    out.loss = scale(1.0 / static_cast<double>(pair.inputs.size()), total);
    return out;
  }

  // Free running: feed the first seed_len true inputs, then the model's own
  // predictions, for n_steps total outputs.
  std::vector<double> generate(const std::vector<double>& true_inputs, std::size_t seed_len,
                               std::size_t n_steps) {
    TapeBinding none(nullptr);
    LstmState state = lstm_zero_state(1, hidden_);
    std::vector<double> out;
    out.reserve(n_steps);
    double feed = true_inputs.empty() ? 0.0 : true_inputs[0];
    for (std::size_t t = 0; t < n_steps; ++t) {
      if (t < seed_len && t < true_inputs.size()) feed = true_inputs[t];
      state = advance(none, Tensor::matrix(1, 1, {feed}), state);
      const double pred = readout_.apply(none, state.h)[0];
      out.push_back(pred);
      feed = pred;
    }
    return out;
  }

  std::vector<Parameter*> parameters() {
    std::vector<Parameter*> out = cell_.parameters();
    for (Parameter* p : readout_.parameters()) out.push_back(p);
    return out;
  }

  BlockFamily family() const { return family_; }
  double alpha() const { return alpha_; }

 private:
  LstmState advance(TapeBinding& bind, const Tensor& x, const LstmState& state) {
    if (family_ == BlockFamily::Plain) return lstm_step(cell_, bind, x, state);
    return heun_lstm_step(cell_, bind, x, state, alpha_);
  }

  BlockFamily family_;
  double alpha_;
  std::size_t hidden_;
  LstmParams cell_;
  DenseLayer readout_;
};

}  // namespace heunflow
