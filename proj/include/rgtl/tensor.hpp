#pragma once

#include <array>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rgtl {

// Dense row-major array of doubles with a fixed rank. Shapes are part of
// equality, so two tensors compare equal only if both shape and every entry
// match bit-for-bit.
template <std::size_t Rank>
class Tensor {
 public:
  static_assert(Rank >= 1);
  using Shape = std::array<std::size_t, Rank>;

  Tensor() { shape_.fill(0); }

  explicit Tensor(const Shape& shape, double fill = 0.0)
      : shape_(shape), data_(count(shape), fill) {}

  const Shape& shape() const { return shape_; }
  std::size_t extent(std::size_t axis) const { return shape_[axis]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  template <class... Idx>
  double& operator()(Idx... idx) {
    return data_[offset(idx...)];
  }
  template <class... Idx>
  double operator()(Idx... idx) const {
    return data_[offset(idx...)];
  }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  // Multi-index of a flat position, in row-major order.
  Shape unravel(std::size_t pos) const {
    Shape idx{};
    for (std::size_t a = Rank; a-- > 0;) {
      idx[a] = pos % shape_[a];
      pos /= shape_[a];
    }
    return idx;
  }

  bool operator==(const Tensor& other) const = default;

  static std::size_t count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
  }

 private:
  template <class... Idx>
  std::size_t offset(Idx... idx) const {
    static_assert(sizeof...(Idx) == Rank, "index arity must match rank");
    const std::array<std::size_t, Rank> at{static_cast<std::size_t>(idx)...};
    std::size_t pos = 0;
    for (std::size_t a = 0; a < Rank; ++a) {
      pos = pos * shape_[a] + at[a];
    }
    return pos;
  }

  Shape shape_;
  std::vector<double> data_;
};

template <std::size_t Rank>
std::string index_string(const std::array<std::size_t, Rank>& idx) {
  std::string out;
  for (std::size_t v : idx) {
    out += '[' + std::to_string(v) + ']';
  }
  return out;
}

}  // namespace rgtl
