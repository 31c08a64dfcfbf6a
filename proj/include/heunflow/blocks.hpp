// Residual block families built on a shared transition map F:
//
//   Plain         x' = F(x)
//   ResNet        x' = x + F(x)
//   Heun          x~ = x + F(x);  x' = x + (F(x) + F(x~)) / 2
//   ExtendedHeun  x~ = x + F(x);  x' = x + ((1-a)*F(x) + a*F(x~))
//
// The corrector slopes are combined before the state update, so the
// ExtendedHeun block at a=0 matches the ResNet block and at a=1/2 the Heun
// block bit for bit. Both F evaluations of a block share one parameter set
// and both are recorded on the tape.
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "heunflow/autodiff.hpp"
#include "heunflow/rng.hpp"

namespace heunflow {

enum class BlockFamily { Plain, ResNet, Heun, ExtendedHeun };

inline const char* family_name(BlockFamily f) {
  switch (f) {
    case BlockFamily::Plain: return "plain";
    case BlockFamily::ResNet: return "resnet";
    case BlockFamily::Heun: return "heun";
    case BlockFamily::ExtendedHeun: return "extheun";
  }
  return "?";
}

struct BlockSpec {
  BlockFamily family = BlockFamily::Heun;
  int depth = 1;
  bool share_weights = true;
  double alpha = 0.5;  // ExtendedHeun only
};

// Shape-preserving differentiable map applied inside a block.
class TransitionMap {
 public:
  virtual ~TransitionMap() = default;
  virtual Tensor apply(TapeBinding& bind, const Tensor& x) const = 0;
  virtual std::vector<Parameter*> parameters() = 0;
};

// F(x) = act(x W^T) with a square weight matrix; the batch is carried in
// rows.
class DenseMap final : public TransitionMap {
 public:
  DenseMap(std::string name, Tensor weight, Act act = Act::Tanh)
      : weight_(std::move(name), std::move(weight)), act_(act) {
    if (weight_.value.rank() != 2 || weight_.value.rows() != weight_.value.cols())
      throw ShapeMismatch("DenseMap weight must be square, got " +
                          shape_str(weight_.value.shape()));
  }

  static DenseMap init(std::string name, std::size_t n, Rng& rng, Act act = Act::Tanh) {
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    return DenseMap(std::move(name), Tensor(Shape{n, n}, rng.uniform_vec(n * n, -s, s)), act);
  }

  Tensor apply(TapeBinding& bind, const Tensor& x) const override {
    Tensor w = bind(weight_);
    return activation(act_, matmul_nt(x, w));
  }

  std::vector<Parameter*> parameters() override { return {&weight_}; }

  const Parameter& weight() const { return weight_; }
  Parameter& weight() { return weight_; }

 private:
  mutable Parameter weight_;
  Act act_;
};

// Parameterless map defined by a callable; used for fixed fields in tests
// and demos.
class FnMap final : public TransitionMap {
 public:
  using Fn = std::function<Tensor(const Tensor&)>;
  explicit FnMap(Fn fn) : fn_(std::move(fn)) {}

  Tensor apply(TapeBinding&, const Tensor& x) const override { return fn_(x); }
  std::vector<Parameter*> parameters() override { return {}; }

 private:
  Fn fn_;
};

// ---- single-block updates ----

inline Tensor plain_forward(const TransitionMap& f, TapeBinding& bind, const Tensor& x) {
  Tensor fx = f.apply(bind, x);
  if (!fx.same_shape(x))
    throw ShapeMismatch("transition map changed shape " + shape_str(x.shape()) + " -> " +
                        shape_str(fx.shape()));
  return fx;
}

inline Tensor resnet_forward(const TransitionMap& f, TapeBinding& bind, const Tensor& x) {
  return add(x, plain_forward(f, bind, x));
}

inline Tensor heun_forward(const TransitionMap& f, TapeBinding& bind, const Tensor& x) {
  Tensor fx = plain_forward(f, bind, x);
  Tensor pred = add(x, fx);
  Tensor fpred = f.apply(bind, pred);
  return add(x, scale(0.5, add(fx, fpred)));
}

inline Tensor extended_heun_forward(const TransitionMap& f, TapeBinding& bind, const Tensor& x,
                                    double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw AlphaOutOfRange("alpha must lie in [0, 1], got " + std::to_string(alpha));
  Tensor fx = plain_forward(f, bind, x);
  Tensor pred = add(x, fx);
  Tensor fpred = f.apply(bind, pred);
  return add(x, add(scale(1.0 - alpha, fx), scale(alpha, fpred)));
}

inline Tensor block_forward(BlockFamily family, const TransitionMap& f, TapeBinding& bind,
                            const Tensor& x, double alpha = 0.5) {
  switch (family) {
    case BlockFamily::Plain: return plain_forward(f, bind, x);
    case BlockFamily::ResNet: return resnet_forward(f, bind, x);
    case BlockFamily::Heun: return heun_forward(f, bind, x);
    case BlockFamily::ExtendedHeun: return extended_heun_forward(f, bind, x, alpha);
  }
  throw Error("unknown block family");
}

// Convenience overloads that bind on the active tape (or none).
inline Tensor plain_forward(const TransitionMap& f, const Tensor& x) {
  TapeBinding bind(Tape::active());
  return plain_forward(f, bind, x);
}
inline Tensor resnet_forward(const TransitionMap& f, const Tensor& x) {
  TapeBinding bind(Tape::active());
  return resnet_forward(f, bind, x);
}
inline Tensor heun_forward(const TransitionMap& f, const Tensor& x) {
  TapeBinding bind(Tape::active());
  return heun_forward(f, bind, x);
}
inline Tensor extended_heun_forward(const TransitionMap& f, const Tensor& x, double alpha) {
  TapeBinding bind(Tape::active());
  return extended_heun_forward(f, bind, x, alpha);
}

// ---- stacked blocks ----

struct StackResult {
  Tensor output;
  std::vector<Tensor> intermediates;  // x0, x1, ..., xL
};

// maps holds one entry when spec.share_weights, else one per layer.
inline StackResult stack_forward(const BlockSpec& spec,
                                 std::span<const TransitionMap* const> maps, TapeBinding& bind,
                                 const Tensor& x0) {
  if (spec.depth < 1) throw Error("stack depth must be >= 1");
  const std::size_t want = spec.share_weights ? 1 : static_cast<std::size_t>(spec.depth);
  if (maps.size() != want)
    throw Error("stack_forward: expected " + std::to_string(want) + " transition maps, got " +
                std::to_string(maps.size()));
  StackResult out;
  out.intermediates.push_back(x0);
  Tensor x = x0;
  for (int layer = 0; layer < spec.depth; ++layer) {
    const TransitionMap& f = spec.share_weights ? *maps[0] : *maps[static_cast<std::size_t>(layer)];
    x = block_forward(spec.family, f, bind, x, spec.alpha);
    out.intermediates.push_back(x);
  }
  out.output = x;
  return out;
}

inline StackResult stack_forward(const BlockSpec& spec, const TransitionMap& shared,
                                 TapeBinding& bind, const Tensor& x0) {
  const TransitionMap* ptr = &shared;
  return stack_forward(spec, std::span<const TransitionMap* const>(&ptr, 1), bind, x0);
}

// ---- Jacobian of one block update ----

// J[i][j] = d y_i / d x_j for a single sample x (rank-1 or 1 x n), computed
// with one reverse pass per output coordinate.
inline Tensor block_jacobian(BlockFamily family, const TransitionMap& f, const Tensor& x,
                             double alpha = 0.5) {
  const std::size_t n = x.numel();
  const Tensor row = x.rank() == 2 ? x : Tensor::matrix(1, n, x.copy_values());
  std::vector<double> jac(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    Tape tape;
    TapeBinding bind(&tape);
    Tensor xi = tape.watch(row);
    Tensor y = block_forward(family, f, bind, xi, alpha);
    std::vector<double> basis(n, 0.0);
    basis[i] = 1.0;
    Tensor pick = sum(mul(y, Tensor(row.shape(), std::move(basis))));
    tape.backward(pick);
    const Tensor& gx = tape.grad(xi);
    for (std::size_t j = 0; j < n; ++j) jac[i * n + j] = gx[j];
  }
  return Tensor(Shape{n, n}, std::move(jac));
}

}  // namespace heunflow
