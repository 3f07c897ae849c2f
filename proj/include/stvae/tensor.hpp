#ifndef STVAE_TENSOR_HPP
#define STVAE_TENSOR_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace stvae::nn {

// Dense row-major tensor of doubles with up to four extents.
// Layer code uses the NHWC convention: (batch, height, width, channels).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, std::vector<double> data);

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  const std::vector<int>& shape() const { return shape_; }
  int extent(std::size_t axis) const { return shape_[axis]; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // NHWC accessors (rank-4 tensors).
  double& at(int n, int h, int w, int c) {
    return data_[idx(n, h, w, c)];
  }
  double at(int n, int h, int w, int c) const {
    return data_[idx(n, h, w, c)];
  }

  std::string shape_str() const;
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

 private:
  std::size_t idx(int n, int h, int w, int c) const {
    return ((static_cast<std::size_t>(n) * shape_[1] + h) * shape_[2] + w) * shape_[3] + c;
  }

  std::vector<int> shape_;
  std::vector<double> data_;
};

}  // namespace stvae::nn

#endif
