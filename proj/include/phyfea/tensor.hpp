// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "phyfea/error.hpp"

namespace phyfea {

using Dims = std::vector<std::size_t>;

std::string format_dims(const Dims& dims);

/// Dense row-major array of rank 0 to 3. Rank-3 layout is (channel, row, col).
/// Rank 0 holds a single scalar and is used for reductions on the tape.
template <class T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Dims dims, T fill = T(0));
  Tensor(Dims dims, std::vector<T> data);

  static Tensor scalar(T v) { return Tensor(Dims{}, std::vector<T>{v}); }

  std::size_t rank() const { return dims_.size(); }
  const Dims& dims() const { return dims_; }
  std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Trailing two extents; valid for rank >= 2.
  std::size_t rows() const { return dims_[rank() - 2]; }
  std::size_t cols() const { return dims_[rank() - 1]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  const T& at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  T& at(std::size_t ch, std::size_t r, std::size_t c) {
    return data_[(ch * rows() + r) * cols() + c];
  }
  const T& at(std::size_t ch, std::size_t r, std::size_t c) const {
    return data_[(ch * rows() + r) * cols() + c];
  }

  T item() const;

  // Copies channel `ch` of a rank-3 tensor into a rank-2 tensor.
  Tensor channel(std::size_t ch) const;
  void set_channel(std::size_t ch, const Tensor& plane);

  bool same_shape(const Tensor& other) const { return dims_ == other.dims_; }
  bool all_finite() const;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  Dims dims_;
  std::vector<T> data_;
};

std::size_t dims_product(const Dims& dims);

void require_rank(const Dims& dims, std::size_t rank, const char* what);
void require_same_dims(const Dims& a, const Dims& b, const char* what);

template <class To, class From>
Tensor<To> tensor_cast(const Tensor<From>& t) {
  std::vector<To> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = static_cast<To>(t[i]);
  return Tensor<To>(t.dims(), std::move(out));
}

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace phyfea
