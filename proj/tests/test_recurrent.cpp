#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "heunflow/recurrent.hpp"
#include "support/finite_diff.hpp"

using namespace heunflow;

namespace {

LstmParams zero_lstm(std::size_t in, std::size_t hid) {
  Rng rng(1);
  LstmParams p("z", in, hid, rng);
  for (Parameter* q : p.parameters()) q->value = Tensor::zeros(q->value.shape());
  return p;
}

std::vector<Tensor> random_inputs(Rng& rng, std::size_t steps, std::size_t batch, std::size_t dim) {
  std::vector<Tensor> v;
  for (std::size_t t = 0; t < steps; ++t)
    v.push_back(Tensor(Shape{batch, dim}, rng.uniform_vec(batch * dim, -1, 1)));
  return v;
}

}  // namespace

TEST_CASE("lstm with zero parameters maps any input to the zero state") {
  LstmParams p = zero_lstm(3, 4);
  TapeBinding none(nullptr);
  Tensor x = Tensor::matrix(2, 3, {1, -2, 3, 0.5, 0, -1});
  LstmState s = lstm_step(p, none, x, lstm_zero_state(2, 4));
  CHECK(s.h.copy_values() == std::vector<double>(8, 0.0));
  CHECK(s.c.copy_values() == std::vector<double>(8, 0.0));
}

TEST_CASE("saturated forget gate with closed input gate preserves the cell") {
  Rng rng(2);
  LstmParams p("m", 2, 3, rng);
  p.b_f.value = Tensor::full(Shape{3}, 50.0);   // forget ~ 1
  p.b_i.value = Tensor::full(Shape{3}, -50.0);  // input ~ 0
  p.w_f.value = Tensor::zeros(p.w_f.value.shape());
  p.w_i.value = Tensor::zeros(p.w_i.value.shape());

  TapeBinding none(nullptr);
  Tensor c0(Shape{1, 3}, {0.4, -0.2, 0.9});
  LstmState s0{Tensor::zeros(Shape{1, 3}), c0};
  LstmState s1 = lstm_step(p, none, Tensor::matrix(1, 2, {0.3, -0.8}), s0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(s1.c[i] == Catch::Approx(c0[i]).margin(1e-12));
}

TEST_CASE("lstm step shape contract") {
  Rng rng(3);
  LstmParams p("m", 2, 3, rng);
  TapeBinding none(nullptr);
  CHECK_THROWS_AS(lstm_step(p, none, Tensor::matrix(1, 5, {1, 2, 3, 4, 5}), lstm_zero_state(1, 3)),
                  ShapeMismatch);
}

TEST_CASE("gru with zero parameters stays at zero") {
  Rng rng(4);
  GruParams p("g", 3, 4, rng);
  for (Parameter* q : p.parameters()) q->value = Tensor::zeros(q->value.shape());
  TapeBinding none(nullptr);
  Tensor h = gru_step(p, none, Tensor::matrix(1, 3, {1, 2, -3}), Tensor::zeros(Shape{1, 4}));
  CHECK(h.copy_values() == std::vector<double>(4, 0.0));
}

TEST_CASE("gru with closed update gate keeps the hidden state") {
  Rng rng(5);
  GruParams p("g", 2, 3, rng);
  p.w_z.value = Tensor::zeros(p.w_z.value.shape());
  p.b_z.value = Tensor::full(Shape{3}, -50.0);  // z ~ 0
  TapeBinding none(nullptr);
  Tensor h0(Shape{1, 3}, {0.1, -0.5, 0.8});
  Tensor h1 = gru_step(p, none, Tensor::matrix(1, 2, {1.0, -1.0}), h0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(h1[i] == Catch::Approx(h0[i]).margin(1e-12));
}

TEST_CASE("gate activations stay inside their ranges") {
  Rng rng(6);
  LstmParams p("m", 3, 5, rng);
  TapeBinding none(nullptr);
  LstmState s = lstm_zero_state(4, 5);
  for (const Tensor& x : random_inputs(rng, 10, 4, 3)) {
    s = lstm_step(p, none, x, s);
    for (double v : s.h.values()) {
      CHECK(v > -1.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_CASE("lstm and gru gradients match finite differences") {
  Rng rng(20240305);
  for (int trial = 0; trial < 3; ++trial) {
    LstmParams lstm("m", 2, 3, rng);
    Tensor x(Shape{2, 2}, rng.uniform_vec(4, -1, 1));
    Tensor target(Shape{2, 3}, rng.uniform_vec(6, -1, 1));
    LstmState s0{Tensor(Shape{2, 3}, rng.uniform_vec(6, -0.5, 0.5)),
                 Tensor(Shape{2, 3}, rng.uniform_vec(6, -0.5, 0.5))};

    {
      Tape tape;
      TapeBinding bind(&tape);
      LstmState s1 = lstm_step(lstm, bind, x, s0);
      tape.backward(mse(s1.h, target));
      bind.collect();
    }
    for (Parameter* p : lstm.parameters()) {
      auto value = [&] {
        TapeBinding none(nullptr);
        return mse(lstm_step(lstm, none, x, s0).h, target).item();
      };
      INFO("lstm " << p->name);
      CHECK(testsupport::check_param_grad(*p, value, p->grad.copy_values()) < 1e-6);
    }

    GruParams gru("g", 2, 3, rng);
    Tensor h0(Shape{2, 3}, rng.uniform_vec(6, -0.5, 0.5));
    {
      Tape tape;
      TapeBinding bind(&tape);
      Tensor h1 = gru_step(gru, bind, x, h0);
      tape.backward(mse(h1, target));
      bind.collect();
    }
    for (Parameter* p : gru.parameters()) {
      auto value = [&] {
        TapeBinding none(nullptr);
        return mse(gru_step(gru, none, x, h0), target).item();
      };
      INFO("gru " << p->name);
      CHECK(testsupport::check_param_grad(*p, value, p->grad.copy_values()) < 1e-6);
    }
  }
}

TEST_CASE("heun-wrapped sequence with zero parameters stays at zero") {
  LstmParams p = zero_lstm(1, 3);
  TapeBinding none(nullptr);
  Rng rng(7);
  SequenceResult r =
      heun_lstm_sequence(p, none, random_inputs(rng, 5, 1, 1), lstm_zero_state(1, 3));
  REQUIRE(r.hiddens.size() == 5);
  for (const Tensor& h : r.hiddens) CHECK(h.copy_values() == std::vector<double>(3, 0.0));
}

TEST_CASE("zero residual leaves the hidden state unchanged") {
  // Zero parameters map (h=0, c=0) to (0, 0), so the residual is exactly
  // zero and the wrapped step must return h as-is.
  LstmParams p = zero_lstm(2, 3);
  TapeBinding none(nullptr);
  LstmState s0 = lstm_zero_state(1, 3);
  LstmState s1 = heun_lstm_step(p, none, Tensor::matrix(1, 2, {0.4, -0.6}), s0, 0.5);
  CHECK(s1.h.copy_values() == s0.h.copy_values());
}

TEST_CASE("sequence output shape contract") {
  Rng rng(8);
  LstmParams p("m", 1, 4, rng);
  TapeBinding none(nullptr);
  std::vector<Tensor> inputs = random_inputs(rng, 7, 2, 1);
  SequenceResult r = heun_lstm_sequence(p, none, inputs, lstm_zero_state(2, 4));
  CHECK(r.hiddens.size() == 7);
  for (const Tensor& h : r.hiddens) CHECK(h.shape() == Shape{2, 4});
}

TEST_CASE("sequence processing is causal") {
  Rng rng(9);
  LstmParams p("m", 1, 3, rng);
  TapeBinding none(nullptr);
  std::vector<Tensor> inputs = random_inputs(rng, 6, 1, 1);

  SequenceResult base = heun_lstm_sequence(p, none, inputs, lstm_zero_state(1, 3));
  std::vector<Tensor> edited = inputs;
  edited[4] = Tensor::matrix(1, 1, {9.0});
  edited[5] = Tensor::matrix(1, 1, {-9.0});
  SequenceResult changed = heun_lstm_sequence(p, none, edited, lstm_zero_state(1, 3));

  for (std::size_t t = 0; t < 4; ++t)
    CHECK(base.hiddens[t].copy_values() == changed.hiddens[t].copy_values());
  CHECK(base.hiddens[4].copy_values() != changed.hiddens[4].copy_values());
}

TEST_CASE("alpha=0 wrap equals the plain residual sequence step for step") {
  Rng rng(10);
  LstmParams p("m", 1, 4, rng);
  TapeBinding none(nullptr);
  std::vector<Tensor> inputs = random_inputs(rng, 8, 2, 1);

  SequenceResult wrapped = heun_lstm_sequence(p, none, inputs, lstm_zero_state(2, 4), 0.0);

  // Hand-rolled residual LSTM: h' = h + (cell.h - h), c' = cell.c.
  LstmState s = lstm_zero_state(2, 4);
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    LstmState e = lstm_step(p, none, inputs[t], s);
    s = {add(s.h, sub(e.h, s.h)), e.c};
    CHECK(wrapped.hiddens[t].copy_values() == s.h.copy_values());
  }
}

TEST_CASE("heun-wrapped step gradients match finite differences") {
  Rng rng(11);
  LstmParams p("m", 2, 3, rng);
  Tensor x(Shape{1, 2}, rng.uniform_vec(2, -1, 1));
  Tensor target(Shape{1, 3}, rng.uniform_vec(3, -1, 1));
  LstmState s0{Tensor(Shape{1, 3}, rng.uniform_vec(3, -0.5, 0.5)),
               Tensor(Shape{1, 3}, rng.uniform_vec(3, -0.5, 0.5))};

  {
    Tape tape;
    TapeBinding bind(&tape);
    LstmState s1 = heun_lstm_step(p, bind, x, s0, 0.7);
    tape.backward(mse(s1.h, target));
    bind.collect();
  }
  for (Parameter* q : p.parameters()) {
    auto value = [&] {
      TapeBinding none(nullptr);
      return mse(heun_lstm_step(p, none, x, s0, 0.7).h, target).item();
    };
    INFO(q->name);
    CHECK(testsupport::check_param_grad(*q, value, q->grad.copy_values()) < 1e-6);
  }
}
