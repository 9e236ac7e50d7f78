#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2gan {

// Dense row-major array of doubles. Rank is 1 or 2 everywhere in this
// project; the shape is kept generic so reshaping stays cheap.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0)
      : shape_(std::move(shape)),
        data_(std::accumulate(shape_.begin(), shape_.end(), std::size_t{1},
                              std::multiplies<>()),
              fill) {
    if (shape_.empty()) throw std::invalid_argument("Tensor: empty shape");
  }

  static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
    return Tensor({rows, cols}, fill);
  }

  static Tensor vector(std::size_t n, double fill = 0.0) {
    return Tensor({n}, fill);
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }

  std::size_t rows() const { return shape_.at(0); }
  std::size_t cols() const { return rank() == 1 ? 1 : shape_.at(1); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * shape_[1] + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * shape_[1] + j];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double* row(std::size_t i) { return data_.data() + i * shape_[1]; }
  const double* row(std::size_t i) const { return data_.data() + i * shape_[1]; }

  const std::vector<double>& values() const { return data_; }
  std::vector<double>& values() { return data_; }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

  std::string shape_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
      if (i) s += " x ";
      s += std::to_string(shape_[i]);
    }
    return s + "]";
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

}  // namespace d2gan
