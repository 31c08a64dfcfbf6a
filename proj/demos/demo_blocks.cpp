// Shows the near-identity block Jacobian and the depth-20 gradient-flow
// contrast between plain and corrector-based stacks.
#include <cmath>
#include <cstdio>

#include "heunflow/blocks.hpp"

using namespace heunflow;

namespace {

double frob_from_identity(const Tensor& j) {
  double s = 0.0;
  for (std::size_t r = 0; r < j.rows(); ++r)
    for (std::size_t c = 0; c < j.cols(); ++c) {
      const double d = j.at(r, c) - (r == c ? 1.0 : 0.0);
      s += d * d;
    }
  return std::sqrt(s);
}

double grad_ratio(BlockFamily fam, DenseMap& f, const Tensor& x0, int depth) {
  Tape tape;
  TapeBinding bind(&tape);
  Tensor xw = tape.watch(x0);
  StackResult r = stack_forward(BlockSpec{fam, depth, true, 0.5}, f, bind, xw);
  tape.backward(sum(r.output));
  auto norm = [](const Tensor& t) {
    double s = 0.0;
    for (double v : t.values()) s += v * v;
    return std::sqrt(s);
  };
  return norm(tape.grad(xw)) / norm(tape.grad(r.output));
}

}  // namespace

int main() {
  Rng rng(7);
  const std::size_t n = 8;
  Tensor x(Shape{n}, rng.uniform_vec(n, -1, 1));

  std::printf("||J - I||_F of one block, dense tanh field, weight scale s\n");
  std::printf("%10s %12s %12s %12s\n", "s", "resnet", "heun", "extheun(0.8)");
  for (double s : {1e-2, 1e-3, 1e-4}) {
    DenseMap f("w", Tensor(Shape{n, n}, rng.normal_vec(n * n, s)));
    std::printf("%10.0e %12.3e %12.3e %12.3e\n", s,
                frob_from_identity(block_jacobian(BlockFamily::ResNet, f, x)),
                frob_from_identity(block_jacobian(BlockFamily::Heun, f, x)),
                frob_from_identity(block_jacobian(BlockFamily::ExtendedHeun, f, x, 0.8)));
  }

  DenseMap f("w", Tensor(Shape{16, 16}, rng.normal_vec(16 * 16, 0.002)));
  Tensor x0(Shape{1, 16}, rng.uniform_vec(16, -1, 1));
  std::printf("\ninput/output gradient-norm ratio through 20 layers:\n");
  std::printf("  heun  %.4f\n", grad_ratio(BlockFamily::Heun, f, x0, 20));
  std::printf("  plain %.2e\n", grad_ratio(BlockFamily::Plain, f, x0, 20));
  return 0;
}
