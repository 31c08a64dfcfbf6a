// Reverse-mode automatic differentiation over Tensor values.
//
// Define-by-run: a Tape is (re)built on every forward pass. Ops record a
// node whenever an input is tracked on the active tape; backward() walks the
// record in reverse and accumulates gradients for every reachable node.
// One tape per thread of execution; tensors themselves are thread-safe
// values.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "heunflow/errors.hpp"
#include "heunflow/tensor.hpp"

namespace heunflow {

namespace detail {

// ---- raw buffer kernels (no tape involvement) ----

inline std::vector<double> ew(const Tensor& a, const Tensor& b, char op) {
  const double* pa = a.raw();
  const double* pb = b.raw();
  std::vector<double> out(a.numel());
  switch (op) {
    case '+': for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] + pb[i]; break;
    case '-': for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] - pb[i]; break;
    case '*': for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] * pb[i]; break;
  }
  return out;
}

inline std::vector<double> scaled(const Tensor& a, double c) {
  std::vector<double> out(a.numel());
  const double* pa = a.raw();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * pa[i];
  return out;
}

// C(m x n) = A(m x k) * B(k x n)
inline std::vector<double> mm_nn(const double* a, const double* b, std::size_t m, std::size_t k,
                                 std::size_t n) {
  std::vector<double> c(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
  return c;
}

// C(m x n) = A(m x k) * B(n x k)^T
inline std::vector<double> mm_nt(const double* a, const double* b, std::size_t m, std::size_t k,
                                 std::size_t n) {
  std::vector<double> c(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      c[i * n + j] = acc;
    }
  }
  return c;
}

// C(m x n) = A(p x m)^T * B(p x n)
inline std::vector<double> mm_tn(const double* a, const double* b, std::size_t p, std::size_t m,
                                 std::size_t n) {
  std::vector<double> c(m * n, 0.0);
  for (std::size_t r = 0; r < p; ++r) {
    const double* arow = a + r * m;
    const double* brow = b + r * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double ari = arow[i];
      double* crow = c.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += ari * brow[j];
    }
  }
  return c;
}

inline std::vector<double> colsum(const Tensor& m) {
  std::vector<double> out(m.cols(), 0.0);
  const double* p = m.raw();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += p[r * m.cols() + c];
  return out;
}

inline Tensor add_raw(const Tensor& a, const Tensor& b) { return Tensor(a.shape(), ew(a, b, '+')); }

}  // namespace detail

// Record of one forward pass. Constructing a Tape makes it the active tape
// for the current thread; destruction restores the previous one.
class Tape {
 public:
  using BackFn = std::function<std::vector<Tensor>(const Tensor& upstream, const std::vector<int>& parents)>;

  Tape() : id_(++counter_()) {
    prev_ = active_();
    active_() = this;
  }
  ~Tape() { active_() = prev_; }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* active() { return active_(); }

  std::uint64_t id() const { return id_; }
  std::size_t size() const { return nodes_.size(); }
  bool recording() const { return !suspended_; }

  // Registers a leaf; the returned tensor shares the input's buffer.
  Tensor watch(const Tensor& t) {
    Tensor out = t;
    out.node = add_node({}, nullptr);
    out.tape_id = id_;
    return out;
  }

  int add_node(std::vector<int> parents, BackFn back) {
    nodes_.push_back(Node{std::move(parents), std::move(back)});
    return static_cast<int>(nodes_.size()) - 1;
  }

  void backward(const Tensor& root) {
    if (root.numel() != 1)
      throw NotScalar("backward root has " + std::to_string(root.numel()) + " elements");
    if (root.node < 0 || root.tape_id != id_)
      throw Error("backward root was not produced on this tape");

    grads_.assign(nodes_.size(), Tensor());
    has_grad_.assign(nodes_.size(), 0);

    // Nodes appended after the root cannot be its ancestors; restrict the
    // sweep to the ones reachable from it.
    std::vector<char> reach(nodes_.size(), 0);
    std::vector<int> stack{root.node};
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      if (reach[id]) continue;
      reach[id] = 1;
      for (int p : nodes_[id].parents)
        if (p >= 0 && !reach[p]) stack.push_back(p);
    }

    suspended_ = true;
    grads_[root.node] = Tensor::full(root.shape(), 1.0);
    has_grad_[root.node] = 1;
    for (int id = root.node; id >= 0; --id) {
      if (!reach[id] || !has_grad_[id] || !nodes_[id].back) continue;
      std::vector<Tensor> parts = nodes_[id].back(grads_[id], nodes_[id].parents);
      const std::vector<int>& parents = nodes_[id].parents;
      for (std::size_t k = 0; k < parents.size(); ++k) {
        int p = parents[k];
        if (p < 0) continue;
        accumulate(p, parts[k]);
      }
    }
    suspended_ = false;
  }

  bool has_grad(const Tensor& t) const {
    return t.node >= 0 && t.tape_id == id_ && t.node < static_cast<int>(has_grad_.size()) &&
           has_grad_[t.node];
  }

  // Gradient of the last backward() root with respect to t.
  const Tensor& grad(const Tensor& t) const {
    if (t.node < 0 || t.tape_id != id_) throw Error("grad() of a tensor not tracked on this tape");
    if (t.node >= static_cast<int>(has_grad_.size()) || !has_grad_[t.node])
      throw Error("no gradient for this node; is it reachable from the backward root?");
    return grads_[t.node];
  }

 private:
  struct Node {
    std::vector<int> parents;
    BackFn back;  // null for leaves
  };

  void accumulate(int node, const Tensor& part) {
    if (!has_grad_[node]) {
      grads_[node] = part;
      has_grad_[node] = 1;
    } else {
      if (!grads_[node].same_shape(part))
        throw ShapeMismatch("gradient accumulation shape clash at node " + std::to_string(node));
      grads_[node] = detail::add_raw(grads_[node], part);
    }
  }

  static Tape*& active_() {
    thread_local Tape* p = nullptr;
    return p;
  }
  static std::uint64_t& counter_() {
    thread_local std::uint64_t c = 0;
    return c;
  }

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  std::vector<char> has_grad_;
  Tape* prev_ = nullptr;
  std::uint64_t id_ = 0;
  bool suspended_ = false;
};

// Named, trainable value plus its gradient slot.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(Tensor::zeros(value.shape())) {}
};

// Watches parameters on a tape, once each, so shared weights accumulate
// their gradient across every use in the pass. A binding built on a null
// tape hands out plain values (evaluation mode).
class TapeBinding {
 public:
  explicit TapeBinding(Tape* tape) : tape_(tape) {}

  Tensor operator()(Parameter& p) {
    if (!tape_) return p.value;
    for (const auto& [param, bound] : bound_)
      if (param == &p) return bound;
    Tensor w = tape_->watch(p.value);
    bound_.emplace_back(&p, w);
    return w;
  }

  // Writes Parameter::grad for every bound parameter (zeros if unreached).
  void collect() {
    if (!tape_) return;
    for (auto& [param, bound] : bound_)
      param->grad = tape_->has_grad(bound) ? tape_->grad(bound) : Tensor::zeros(bound.shape());
  }

  Tape* tape() const { return tape_; }

 private:
  Tape* tape_;
  std::vector<std::pair<Parameter*, Tensor>> bound_;
};

namespace detail {

inline bool tracked_on(const Tensor& t, const Tape* tape) {
  return t.node >= 0 && tape && t.tape_id == tape->id();
}

inline void record(Tensor& out, std::initializer_list<const Tensor*> inputs, Tape::BackFn back) {
  Tape* tape = Tape::active();
  if (!tape || !tape->recording()) return;
  std::vector<int> parents;
  parents.reserve(inputs.size());
  bool any = false;
  for (const Tensor* in : inputs) {
    bool tr = tracked_on(*in, tape);
    parents.push_back(tr ? in->node : -1);
    any = any || tr;
  }
  if (!any) return;
  out.node = tape->add_node(std::move(parents), std::move(back));
  out.tape_id = tape->id();
}

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b))
    throw ShapeMismatch(std::string(op) + ": shapes " + shape_str(a.shape()) + " and " +
                        shape_str(b.shape()) + " differ");
}

}  // namespace detail

// ---- elementwise ----

inline Tensor add(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "add");
  Tensor out(a.shape(), detail::ew(a, b, '+'));
  detail::record(out, {&a, &b}, [](const Tensor& g, const std::vector<int>&) {
    return std::vector<Tensor>{g, g};
  });
  return out;
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "sub");
  Tensor out(a.shape(), detail::ew(a, b, '-'));
  detail::record(out, {&a, &b}, [](const Tensor& g, const std::vector<int>& ps) {
    std::vector<Tensor> parts(2);
    parts[0] = g;
    if (ps[1] >= 0) parts[1] = Tensor(g.shape(), detail::scaled(g, -1.0));
    return parts;
  });
  return out;
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "mul");
  Tensor out(a.shape(), detail::ew(a, b, '*'));
  detail::record(out, {&a, &b}, [a, b](const Tensor& g, const std::vector<int>& ps) {
    std::vector<Tensor> parts(2);
    if (ps[0] >= 0) parts[0] = Tensor(g.shape(), detail::ew(g, b, '*'));
    if (ps[1] >= 0) parts[1] = Tensor(g.shape(), detail::ew(g, a, '*'));
    return parts;
  });
  return out;
}

inline Tensor scale(double c, const Tensor& a) {
  Tensor out(a.shape(), detail::scaled(a, c));
  detail::record(out, {&a}, [c](const Tensor& g, const std::vector<int>&) {
    return std::vector<Tensor>{Tensor(g.shape(), detail::scaled(g, c))};
  });
  return out;
}

inline Tensor add(const Tensor& a, double c) {
  std::vector<double> v = a.copy_values();
  for (double& x : v) x += c;
  Tensor out(a.shape(), std::move(v));
  detail::record(out, {&a}, [](const Tensor& g, const std::vector<int>&) {
    return std::vector<Tensor>{g};
  });
  return out;
}

inline Tensor sub(double c, const Tensor& a) {
  std::vector<double> v(a.numel());
  const double* p = a.raw();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = c - p[i];
  Tensor out(a.shape(), std::move(v));
  detail::record(out, {&a}, [](const Tensor& g, const std::vector<int>&) {
    return std::vector<Tensor>{Tensor(g.shape(), detail::scaled(g, -1.0))};
  });
  return out;
}

// ---- matrix products ----

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2)
    throw ShapeMismatch("matmul requires rank-2 operands, got " + shape_str(a.shape()) + " and " +
                        shape_str(b.shape()));
  if (a.cols() != b.rows())
    throw ShapeMismatch("matmul inner dimensions: " + shape_str(a.shape()) + " vs " +
                        shape_str(b.shape()));
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out(Shape{m, n}, detail::mm_nn(a.raw(), b.raw(), m, k, n));
  detail::record(out, {&a, &b}, [a, b, m, k, n](const Tensor& g, const std::vector<int>& ps) {
    std::vector<Tensor> parts(2);
    if (ps[0] >= 0) parts[0] = Tensor(Shape{m, k}, detail::mm_nt(g.raw(), b.raw(), m, n, k));
    if (ps[1] >= 0) parts[1] = Tensor(Shape{k, n}, detail::mm_tn(a.raw(), g.raw(), m, k, n));
    return parts;
  });
  return out;
}

// a * b^T; the natural orientation for row-batched affine layers.
inline Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2)
    throw ShapeMismatch("matmul_nt requires rank-2 operands");
  if (a.cols() != b.cols())
    throw ShapeMismatch("matmul_nt inner dimensions: " + shape_str(a.shape()) + " vs " +
                        shape_str(b.shape()));
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  Tensor out(Shape{m, n}, detail::mm_nt(a.raw(), b.raw(), m, k, n));
  detail::record(out, {&a, &b}, [a, b, m, k, n](const Tensor& g, const std::vector<int>& ps) {
    std::vector<Tensor> parts(2);
    if (ps[0] >= 0) parts[0] = Tensor(Shape{m, k}, detail::mm_nn(g.raw(), b.raw(), m, n, k));
    if (ps[1] >= 0) parts[1] = Tensor(Shape{n, k}, detail::mm_tn(g.raw(), a.raw(), m, n, k));
    return parts;
  });
  return out;
}

// mat (r x c) + bias (c), broadcast over rows.
inline Tensor add_bias(const Tensor& mat, const Tensor& bias) {
  if (mat.rank() != 2 || bias.rank() != 1 || mat.cols() != bias.numel())
    throw ShapeMismatch("add_bias: " + shape_str(mat.shape()) + " + " + shape_str(bias.shape()));
  std::vector<double> v = mat.copy_values();
  const double* pb = bias.raw();
  for (std::size_t r = 0; r < mat.rows(); ++r)
    for (std::size_t c = 0; c < mat.cols(); ++c) v[r * mat.cols() + c] += pb[c];
  Tensor out(mat.shape(), std::move(v));
  detail::record(out, {&mat, &bias}, [](const Tensor& g, const std::vector<int>& ps) {
    std::vector<Tensor> parts(2);
    parts[0] = g;
    if (ps[1] >= 0) parts[1] = Tensor(Shape{g.cols()}, detail::colsum(g));
    return parts;
  });
  return out;
}

// ---- shape ops ----

inline Tensor concat_cols(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.rows() != b.rows())
    throw ShapeMismatch("concat_cols: " + shape_str(a.shape()) + " | " + shape_str(b.shape()));
  const std::size_t r = a.rows(), ca = a.cols(), cb = b.cols();
  std::vector<double> v(r * (ca + cb));
  for (std::size_t i = 0; i < r; ++i) {
    std::copy_n(a.raw() + i * ca, ca, v.data() + i * (ca + cb));
    std::copy_n(b.raw() + i * cb, cb, v.data() + i * (ca + cb) + ca);
  }
  Tensor out(Shape{r, ca + cb}, std::move(v));
  detail::record(out, {&a, &b}, [r, ca, cb](const Tensor& g, const std::vector<int>& ps) {
    std::vector<Tensor> parts(2);
    if (ps[0] >= 0) {
      std::vector<double> ga(r * ca);
      for (std::size_t i = 0; i < r; ++i) std::copy_n(g.raw() + i * (ca + cb), ca, ga.data() + i * ca);
      parts[0] = Tensor(Shape{r, ca}, std::move(ga));
    }
    if (ps[1] >= 0) {
      std::vector<double> gb(r * cb);
      for (std::size_t i = 0; i < r; ++i)
        std::copy_n(g.raw() + i * (ca + cb) + ca, cb, gb.data() + i * cb);
      parts[1] = Tensor(Shape{r, cb}, std::move(gb));
    }
    return parts;
  });
  return out;
}

inline Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t len) {
  if (a.rank() != 2 || begin + len > a.cols())
    throw ShapeMismatch("slice_cols [" + std::to_string(begin) + ", +" + std::to_string(len) +
                        ") of " + shape_str(a.shape()));
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> v(r * len);
  for (std::size_t i = 0; i < r; ++i) std::copy_n(a.raw() + i * c + begin, len, v.data() + i * len);
  Tensor out(Shape{r, len}, std::move(v));
  detail::record(out, {&a}, [r, c, begin, len](const Tensor& g, const std::vector<int>&) {
    std::vector<double> ga(r * c, 0.0);
    for (std::size_t i = 0; i < r; ++i) std::copy_n(g.raw() + i * len, len, ga.data() + i * c + begin);
    return std::vector<Tensor>{Tensor(Shape{r, c}, std::move(ga))};
  });
  return out;
}

// ---- activations ----

enum class Act { Sigmoid, Tanh, Relu };

inline const char* act_name(Act a) {
  switch (a) {
    case Act::Sigmoid: return "sigmoid";
    case Act::Tanh: return "tanh";
    case Act::Relu: return "relu";
  }
  return "?";
}

inline Tensor activation(Act kind, const Tensor& x) {
  std::vector<double> v(x.numel());
  const double* p = x.raw();
  switch (kind) {
    case Act::Sigmoid:
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + std::exp(-p[i]));
      break;
    case Act::Tanh:
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::tanh(p[i]);
      break;
    case Act::Relu:
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = p[i] > 0.0 ? p[i] : 0.0;
      break;
  }
  Tensor out(x.shape(), std::move(v));
  detail::record(out, {&x}, [kind, x, out](const Tensor& g, const std::vector<int>&) {
    std::vector<double> d(g.numel());
    const double* pg = g.raw();
    const double* py = out.raw();
    const double* px = x.raw();
    switch (kind) {
      case Act::Sigmoid:
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = pg[i] * py[i] * (1.0 - py[i]);
        break;
      case Act::Tanh:
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = pg[i] * (1.0 - py[i] * py[i]);
        break;
      case Act::Relu:
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = px[i] > 0.0 ? pg[i] : 0.0;
        break;
    }
    return std::vector<Tensor>{Tensor(g.shape(), std::move(d))};
  });
  return out;
}

inline Tensor sigmoid(const Tensor& x) { return activation(Act::Sigmoid, x); }
inline Tensor tanh(const Tensor& x) { return activation(Act::Tanh, x); }
inline Tensor relu(const Tensor& x) { return activation(Act::Relu, x); }

// ---- reductions & losses ----

inline Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.numel(); ++i) s += x[i];
  Tensor out = Tensor::scalar(s);
  const Shape xs = x.shape();
  detail::record(out, {&x}, [xs](const Tensor& g, const std::vector<int>&) {
    return std::vector<Tensor>{Tensor::full(xs, g.item())};
  });
  return out;
}

inline Tensor mean(const Tensor& x) {
  const double n = static_cast<double>(x.numel());
  double s = 0.0;
  for (std::size_t i = 0; i < x.numel(); ++i) s += x[i];
  Tensor out = Tensor::scalar(s / n);
  const Shape xs = x.shape();
  detail::record(out, {&x}, [xs, n](const Tensor& g, const std::vector<int>&) {
    return std::vector<Tensor>{Tensor::full(xs, g.item() / n)};
  });
  return out;
}

enum class Loss { Mse, SoftmaxCrossEntropy };

inline Tensor mse(const Tensor& pred, const Tensor& target) {
  detail::require_same_shape(pred, target, "mse");
  const std::size_t n = pred.numel();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pred[i] - target[i];
    s += d * d;
  }
  const double v = s / static_cast<double>(n);
  if (!std::isfinite(v)) throw NonFiniteLoss("mse evaluated to a non-finite value");
  Tensor out = Tensor::scalar(v);
  detail::record(out, {&pred, &target}, [pred, target, n](const Tensor& g, const std::vector<int>& ps) {
    std::vector<Tensor> parts(2);
    const double c = 2.0 * g.item() / static_cast<double>(n);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = c * (pred[i] - target[i]);
    if (ps[0] >= 0) parts[0] = Tensor(pred.shape(), d);
    if (ps[1] >= 0) {
      for (double& x : d) x = -x;
      parts[1] = Tensor(pred.shape(), std::move(d));
    }
    return parts;
  });
  return out;
}

// Mean cross-entropy between softmax(logits) and the target classes, with
// log-sum-exp stabilization. Targets are either a rank-1 tensor of class
// indices (one per row) or a one-hot tensor of the logits' shape. A rank-1
// logits tensor is treated as a single sample.
inline Tensor softmax_cross_entropy(const Tensor& logits, const Tensor& target) {
  const std::size_t rows = logits.rank() == 2 ? logits.rows() : 1;
  const std::size_t cols = logits.rank() == 2 ? logits.cols() : logits.numel();
  if (logits.rank() < 1 || cols == 0)
    throw ShapeMismatch("softmax_cross_entropy: bad logits shape " + shape_str(logits.shape()));

  const bool one_hot = target.numel() == logits.numel() && target.rank() == logits.rank();
  if (!one_hot && !(target.rank() <= 1 && target.numel() == rows))
    throw ShapeMismatch("softmax_cross_entropy: target shape " + shape_str(target.shape()) +
                        " matches neither class indices nor one-hot rows");

  std::vector<double> soft(rows * cols);
  std::vector<std::size_t> idx(rows);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* z = logits.raw() + r * cols;
    double m = z[0];
    for (std::size_t c = 1; c < cols; ++c) m = std::max(m, z[c]);
    double se = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      soft[r * cols + c] = std::exp(z[c] - m);
      se += soft[r * cols + c];
    }
    const double lse = m + std::log(se);
    for (std::size_t c = 0; c < cols; ++c) soft[r * cols + c] /= se;

    double zt;
    if (one_hot) {
      zt = 0.0;
      for (std::size_t c = 0; c < cols; ++c) zt += target[r * cols + c] * z[c];
      idx[r] = cols;  // marker: use one-hot row in backward
    } else {
      const double ti = target[r];
      const auto k = static_cast<std::size_t>(ti);
      if (ti != std::floor(ti) || k >= cols)
        throw ShapeMismatch("softmax_cross_entropy: class index " + std::to_string(ti) +
                            " out of range for " + std::to_string(cols) + " classes");
      zt = z[k];
      idx[r] = k;
    }
    total += lse - zt;
  }
  const double v = total / static_cast<double>(rows);
  if (!std::isfinite(v)) throw NonFiniteLoss("cross-entropy evaluated to a non-finite value");

  Tensor out = Tensor::scalar(v);
  Tensor softmax_t(logits.shape(), soft);
  detail::record(out, {&logits, &target},
                 [softmax_t, target, idx, rows, cols, one_hot](const Tensor& g, const std::vector<int>& ps) {
                   std::vector<Tensor> parts(2);
                   if (ps[0] >= 0) {
                     const double c0 = g.item() / static_cast<double>(rows);
                     std::vector<double> d = softmax_t.copy_values();
                     for (std::size_t r = 0; r < rows; ++r) {
                       if (one_hot) {
                         for (std::size_t c = 0; c < cols; ++c) d[r * cols + c] -= target[r * cols + c];
                       } else {
                         d[r * cols + idx[r]] -= 1.0;
                       }
                     }
                     for (double& x : d) x *= c0;
                     parts[0] = Tensor(softmax_t.shape(), std::move(d));
                   }
                   // The target is a label, not a differentiable input.
                   if (ps[1] >= 0) parts[1] = Tensor::zeros(target.shape());
                   return parts;
                 });
  return out;
}

inline Tensor loss(Loss kind, const Tensor& pred, const Tensor& target) {
  return kind == Loss::Mse ? mse(pred, target) : softmax_cross_entropy(pred, target);
}

}  // namespace heunflow
