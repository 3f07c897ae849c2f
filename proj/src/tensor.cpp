#include "stvae/tensor.hpp"

#include <sstream>
#include <stdexcept>

namespace stvae::nn {

namespace {
std::size_t checked_size(const std::vector<int>& shape) {
  if (shape.empty() || shape.size() > 4) {
    throw std::invalid_argument("Tensor: rank must be 1..4, got " + std::to_string(shape.size()));
  }
  std::size_t n = 1;
  for (int e : shape) {
    if (e < 1) throw std::invalid_argument("Tensor: all extents must be >= 1");
    n *= static_cast<std::size_t>(e);
  }
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  data_.assign(checked_size(shape_), 0.0);
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (checked_size(shape_) != data_.size()) {
    throw std::invalid_argument("Tensor: shape " + shape_str() + " does not match data length " +
                                std::to_string(data_.size()));
  }
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << ",";
    os << shape_[i];
  }
  os << ")";
  return os.str();
}

}  // namespace stvae::nn
