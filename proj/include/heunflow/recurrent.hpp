// LSTM and GRU cells, and the Heun-wrapped LSTM sequence update.
//
// The wrap treats the hidden state as the integrated quantity: the residual
// F(h) = lstm(x, h, c).h - h plays the role of the field, the predictor is
// h + F(h), and the corrected state is h + ((1-a)*F(h) + a*F(h~)). The cell
// state advances from the corrector evaluation; at a=0 the step collapses
// to a single-evaluation residual update so the plain residual sequence is
// exactly the a=0 case.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "heunflow/autodiff.hpp"
#include "heunflow/rng.hpp"

namespace heunflow {

struct LstmState {
  Tensor h;
  Tensor c;
};

inline LstmState lstm_zero_state(std::size_t batch, std::size_t hidden) {
  return {Tensor::zeros(Shape{batch, hidden}), Tensor::zeros(Shape{batch, hidden})};
}

namespace detail {

inline Tensor gate_weight(std::size_t hidden, std::size_t in_plus_hidden, Rng& rng) {
  const double s = 1.0 / std::sqrt(static_cast<double>(in_plus_hidden));
  return Tensor(Shape{hidden, in_plus_hidden}, rng.uniform_vec(hidden * in_plus_hidden, -s, s));
}

}  // namespace detail

// Gate matrices act on the concatenated [input, hidden] row.
struct LstmParams {
  std::size_t input_size;
  std::size_t hidden_size;
  Parameter w_i, w_f, w_o, w_g;
  Parameter b_i, b_f, b_o, b_g;

  LstmParams(const std::string& prefix, std::size_t in, std::size_t hidden, Rng& rng)
      : input_size(in),
        hidden_size(hidden),
        w_i(prefix + ".w_i", detail::gate_weight(hidden, in + hidden, rng)),
        w_f(prefix + ".w_f", detail::gate_weight(hidden, in + hidden, rng)),
        w_o(prefix + ".w_o", detail::gate_weight(hidden, in + hidden, rng)),
        w_g(prefix + ".w_g", detail::gate_weight(hidden, in + hidden, rng)),
        b_i(prefix + ".b_i", Tensor::zeros(Shape{hidden})),
        // Forget bias starts at +1 so early training does not erase memory.
        b_f(prefix + ".b_f", Tensor::full(Shape{hidden}, 1.0)),
        b_o(prefix + ".b_o", Tensor::zeros(Shape{hidden})),
        b_g(prefix + ".b_g", Tensor::zeros(Shape{hidden})) {}

  std::vector<Parameter*> parameters() {
    return {&w_i, &w_f, &w_o, &w_g, &b_i, &b_f, &b_o, &b_g};
  }
};

inline LstmState lstm_step(LstmParams& p, TapeBinding& bind, const Tensor& input,
                           const LstmState& state) {
  if (input.rank() != 2 || input.cols() != p.input_size)
    throw ShapeMismatch("lstm_step: input " + shape_str(input.shape()) + " expected (batch x " +
                        std::to_string(p.input_size) + ")");
  Tensor xh = concat_cols(input, state.h);
  Tensor gi = sigmoid(add_bias(matmul_nt(xh, bind(p.w_i)), bind(p.b_i)));
  Tensor gf = sigmoid(add_bias(matmul_nt(xh, bind(p.w_f)), bind(p.b_f)));
  Tensor go = sigmoid(add_bias(matmul_nt(xh, bind(p.w_o)), bind(p.b_o)));
  Tensor gg = tanh(add_bias(matmul_nt(xh, bind(p.w_g)), bind(p.b_g)));
  Tensor c = add(mul(gf, state.c), mul(gi, gg));
  Tensor h = mul(go, tanh(c));
  return {h, c};
}

struct GruParams {
  std::size_t input_size;
  std::size_t hidden_size;
  Parameter w_z, w_r, w_h;
  Parameter b_z, b_r, b_h;

  GruParams(const std::string& prefix, std::size_t in, std::size_t hidden, Rng& rng)
      : input_size(in),
        hidden_size(hidden),
        w_z(prefix + ".w_z", detail::gate_weight(hidden, in + hidden, rng)),
        w_r(prefix + ".w_r", detail::gate_weight(hidden, in + hidden, rng)),
        w_h(prefix + ".w_h", detail::gate_weight(hidden, in + hidden, rng)),
        b_z(prefix + ".b_z", Tensor::zeros(Shape{hidden})),
        b_r(prefix + ".b_r", Tensor::zeros(Shape{hidden})),
        b_h(prefix + ".b_h", Tensor::zeros(Shape{hidden})) {}

  std::vector<Parameter*> parameters() { return {&w_z, &w_r, &w_h, &b_z, &b_r, &b_h}; }
};

// h' = (1-z) . h + z . tanh(W_h [x, r . h]); z=0 keeps h unchanged.
inline Tensor gru_step(GruParams& p, TapeBinding& bind, const Tensor& input, const Tensor& h) {
  if (input.rank() != 2 || input.cols() != p.input_size)
    throw ShapeMismatch("gru_step: input " + shape_str(input.shape()) + " expected (batch x " +
                        std::to_string(p.input_size) + ")");
  Tensor xh = concat_cols(input, h);
  Tensor z = sigmoid(add_bias(matmul_nt(xh, bind(p.w_z)), bind(p.b_z)));
  Tensor r = sigmoid(add_bias(matmul_nt(xh, bind(p.w_r)), bind(p.b_r)));
  Tensor xrh = concat_cols(input, mul(r, h));
  Tensor hbar = tanh(add_bias(matmul_nt(xrh, bind(p.w_h)), bind(p.b_h)));
  return add(mul(sub(1.0, z), h), mul(z, hbar));
}

// One Heun-wrapped hidden-state update around the LSTM cell.
inline LstmState heun_lstm_step(LstmParams& p, TapeBinding& bind, const Tensor& input,
                                const LstmState& state, double alpha = 0.5) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw AlphaOutOfRange("alpha must lie in [0, 1], got " + std::to_string(alpha));
  LstmState eval1 = lstm_step(p, bind, input, state);
  Tensor r1 = sub(eval1.h, state.h);
  if (alpha == 0.0) return {add(state.h, r1), eval1.c};
  Tensor pred = add(state.h, r1);
  LstmState eval2 = lstm_step(p, bind, input, {pred, state.c});
  Tensor r2 = sub(eval2.h, pred);
  Tensor h = add(state.h, add(scale(1.0 - alpha, r1), scale(alpha, r2)));
  return {h, eval2.c};
}

struct SequenceResult {
  std::vector<Tensor> hiddens;  // one per input step
  LstmState final_state;
};

inline SequenceResult lstm_sequence(LstmParams& p, TapeBinding& bind,
                                    const std::vector<Tensor>& inputs, LstmState state) {
  SequenceResult out;
  out.hiddens.reserve(inputs.size());
  for (const Tensor& x : inputs) {
    state = lstm_step(p, bind, x, state);
    out.hiddens.push_back(state.h);
  }
  out.final_state = std::move(state);
  return out;
}

inline SequenceResult heun_lstm_sequence(LstmParams& p, TapeBinding& bind,
                                         const std::vector<Tensor>& inputs, LstmState state,
                                         double alpha = 0.5) {
  SequenceResult out;
  out.hiddens.reserve(inputs.size());
  for (const Tensor& x : inputs) {
    state = heun_lstm_step(p, bind, x, state, alpha);
    out.hiddens.push_back(state.h);
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace heunflow
