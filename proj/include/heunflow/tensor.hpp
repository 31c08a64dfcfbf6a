// Dense rank-0/1/2 tensor of doubles with shape metadata.
//
// Tensors are immutable values: every operation returns a fresh tensor and
// the underlying buffer is shared on copy. The `node`/`tape_id` pair links a
// tensor to the tape that recorded it (see tape.hpp); constants carry
// node == -1.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "heunflow/errors.hpp"

namespace heunflow {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << ')';
  return os.str();
}

class Tensor {
 public:
  Tensor() : shape_{}, data_(std::make_shared<const std::vector<double>>(1, 0.0)) {}

  Tensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)) {
    if (shape_.size() > 2)
      throw ShapeMismatch("tensor rank " + std::to_string(shape_.size()) + " unsupported (max 2)");
    if (shape_numel(shape_) != values.size())
      throw ShapeMismatch("shape " + shape_str(shape_) + " does not hold " +
                          std::to_string(values.size()) + " values");
    data_ = std::make_shared<const std::vector<double>>(std::move(values));
  }

  static Tensor scalar(double v) { return Tensor(Shape{}, {v}); }
  static Tensor vec(std::vector<double> v) {
    Shape s{v.size()};
    return Tensor(std::move(s), std::move(v));
  }
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> v) {
    return Tensor(Shape{rows, cols}, std::move(v));
  }
  static Tensor zeros(Shape shape) { return full(std::move(shape), 0.0); }
  static Tensor full(Shape shape, double v) {
    std::vector<double> d(shape_numel(shape), v);
    return Tensor(std::move(shape), std::move(d));
  }
  static Tensor identity(std::size_t n) {
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1.0;
    return Tensor(Shape{n, n}, std::move(d));
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t numel() const { return data_->size(); }
  std::size_t rows() const { return rank() == 2 ? shape_[0] : 1; }
  std::size_t cols() const { return rank() == 2 ? shape_[1] : numel(); }

  const std::vector<double>& values() const { return *data_; }
  const double* raw() const { return data_->data(); }
  std::vector<double> copy_values() const { return *data_; }

  double operator[](std::size_t i) const { return (*data_)[i]; }
  double at(std::size_t i) const { return data_->at(i); }
  double at(std::size_t r, std::size_t c) const {
    if (rank() != 2) throw ShapeMismatch("2-index access on rank-" + std::to_string(rank()) + " tensor");
    return data_->at(r * shape_[1] + c);
  }

  double item() const {
    if (numel() != 1) throw NotScalar("item() on tensor of " + std::to_string(numel()) + " elements");
    return (*data_)[0];
  }

  bool all_finite() const {
    for (double v : *data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  // Tape linkage; -1 / 0 for constants.
  int node = -1;
  std::uint64_t tape_id = 0;

 private:
  Shape shape_;
  std::shared_ptr<const std::vector<double>> data_;
};

}  // namespace heunflow
