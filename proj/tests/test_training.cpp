#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "heunflow/training.hpp"

using namespace heunflow;

namespace {

// Two well-separated 2-d blobs; solvable by construction.
LabeledDataset blobs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> feats(n * 2);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % 2);
    const double cx = cls ? 1.5 : -1.5;
    feats[i * 2] = cx + rng.normal() * 0.3;
    feats[i * 2 + 1] = -cx + rng.normal() * 0.3;
    labels[i] = cls;
  }
  LabeledDataset d;
  d.features = Tensor(Shape{n, 2}, std::move(feats));
  d.labels = std::move(labels);
  d.n_classes = 2;
  return d;
}

TrainConfig toy_config(int epochs, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.model = ModelKind::Block;
  cfg.block = {BlockFamily::Heun, 2, true, 0.5};
  cfg.hidden = 16;
  cfg.optimizer = {OptKind::Adam, 1e-2};
  cfg.epochs = epochs;
  cfg.batch_size = 16;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("sgd step") {
  Parameter w("w", Tensor::vec({0.0}));
  w.grad = Tensor::vec({1.0});
  Optimizer opt({OptKind::Sgd, 0.1});
  opt.step({&w});
  CHECK(w.value[0] == Catch::Approx(-0.1).epsilon(1e-15));

  w.grad = Tensor::vec({0.0});
  opt.step({&w});
  CHECK(w.value[0] == Catch::Approx(-0.1).epsilon(1e-15));
}

TEST_CASE("adam first step is the sign-scaled gradient") {
  Parameter w("w", Tensor::vec({0.5, -0.25}));
  w.grad = Tensor::vec({2.0, -0.01});
  OptimizerConfig cfg{OptKind::Adam, 1e-3};
  Optimizer opt(cfg);
  opt.step({&w});
  for (std::size_t i = 0; i < 2; ++i) {
    const double g = i == 0 ? 2.0 : -0.01;
    const double expect = (i == 0 ? 0.5 : -0.25) - cfg.lr * g / (std::abs(g) + cfg.eps);
    CHECK(w.value[i] == Catch::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("zero-epoch run yields an empty history") {
  LabeledDataset d = blobs(32, 1);
  TrainResult r = train_classifier(toy_config(0, 1), d, d);
  CHECK(r.history.rows.empty());
  CHECK_FALSE(r.history.aborted);
}

TEST_CASE("separable blobs train to full accuracy") {
  LabeledDataset train = blobs(128, 2);
  LabeledDataset test = blobs(64, 3);
  TrainResult r = train_classifier(toy_config(50, 7), train, test);
  REQUIRE_FALSE(r.history.rows.empty());
  CHECK(r.history.rows.back().eval_accuracy == 1.0);
}

TEST_CASE("loss decreases over the first three epochs") {
  LabeledDataset train = blobs(128, 4);
  TrainResult r = train_classifier(toy_config(3, 5), train, train);
  REQUIRE(r.history.rows.size() == 3);
  CHECK(r.history.rows[1].train_loss < r.history.rows[0].train_loss);
  CHECK(r.history.rows[2].train_loss < r.history.rows[1].train_loss);
}

TEST_CASE("identical configs give identical histories") {
  LabeledDataset train = blobs(64, 6);
  LabeledDataset test = blobs(32, 7);
  auto csv = [&] {
    TrainResult r = train_classifier(toy_config(4, 11), train, test);
    std::ostringstream os;
    r.history.write_csv(os, false);
    return os.str();
  };
  CHECK(csv() == csv());
}

TEST_CASE("metrics csv format") {
  MetricsHistory h;
  h.rows.push_back({1, 0.123456789123, 0.5, 0.25, 3.25});
  std::ostringstream os;
  h.write_csv(os, false);
  CHECK(os.str() == "iteration,train_loss,eval_loss,eval_accuracy,wall_time_s\n"
                    "1,0.123456789,0.5,0.25,0\n");
  std::ostringstream os2;
  h.write_csv(os2, true);
  CHECK(os2.str().find("3.25") != std::string::npos);
}

TEST_CASE("a non-finite loss aborts classifier training") {
  LabeledDataset train = blobs(64, 8);
  std::vector<double> feats = train.features.copy_values();
  feats[10] = std::numeric_limits<double>::infinity();
  train.features = Tensor(train.features.shape(), std::move(feats));
  TrainResult r = train_classifier(toy_config(10, 9), train, train);
  CHECK(r.history.aborted);
  CHECK(r.history.rows.size() < 10);
}

TEST_CASE("a diverging sequence run aborts with the history so far") {
  SequenceDataset data = gen_sine(6.28, 32);
  SeqTrainConfig cfg;
  cfg.iterations = 30;
  cfg.hidden = 4;
  cfg.seed = 2;
  cfg.optimizer = {OptKind::Sgd, 1e18};
  SeqTrainResult r = train_seq_predictor(cfg, data);
  CHECK(r.history.aborted);
  CHECK(r.history.rows.size() >= 1);
  CHECK(r.history.rows.size() < 30);
}

TEST_CASE("evaluate matches training-mode loss and scores a perfect model") {
  LabeledDataset train = blobs(96, 10);
  TrainResult r = train_classifier(toy_config(40, 12), train, train);
  EvalResult ev = evaluate(*r.model, train);
  CHECK(ev.accuracy == 1.0);
  // Same inputs, no tape: loss must equal the recorded eval loss.
  CHECK(ev.loss == r.history.rows.back().eval_loss);
}

TEST_CASE("argmax accuracy of random logits against random labels is near chance") {
  Rng rng(13);
  const std::size_t n = 10000;
  Tensor logits(Shape{n, 5}, rng.uniform_vec(n * 5, -1, 1));
  std::vector<int> labels(n);
  for (auto& l : labels) l = static_cast<int>(rng.index(5));
  const double acc = argmax_accuracy(logits, labels);
  CHECK(acc > 0.2 - 0.03);
  CHECK(acc < 0.2 + 0.03);
}

TEST_CASE("recurrent classifiers train on row sequences") {
  LabeledDataset train = blobs(64, 14);
  TrainConfig cfg = toy_config(30, 15);
  cfg.model = ModelKind::Lstm;
  cfg.hidden = 8;
  cfg.seq_step_dim = 1;  // two steps of one feature each
  TrainResult r = train_classifier(cfg, train, train);
  CHECK(r.history.rows.back().eval_accuracy > 0.9);

  cfg.model = ModelKind::Gru;
  TrainResult g = train_classifier(cfg, train, train);
  CHECK(g.history.rows.back().eval_accuracy > 0.9);
}

TEST_CASE("constant-zero series trains to near-zero loss") {
  SequenceDataset data;
  SequencePair p;
  p.inputs.assign(40, 0.0);
  p.targets.assign(40, 0.0);
  data.series.push_back(p);

  SeqTrainConfig cfg;
  cfg.family = BlockFamily::Heun;
  cfg.hidden = 8;
  cfg.iterations = 20;
  cfg.seed = 3;
  SeqTrainResult r = train_seq_predictor(cfg, data);
  REQUIRE_FALSE(r.history.rows.empty());
  CHECK(r.history.rows.back().train_loss < 1e-3);
}

TEST_CASE("sequence training is deterministic under a fixed seed") {
  SequenceDataset data = gen_sine(16.0 * 3.14159265358979323846, 64);
  SeqTrainConfig cfg;
  cfg.iterations = 5;
  cfg.hidden = 8;
  cfg.seed = 21;
  auto run = [&] {
    SeqTrainResult r = train_seq_predictor(cfg, data);
    std::ostringstream os;
    r.history.write_csv(os, false);
    return os.str();
  };
  CHECK(run() == run());
}
