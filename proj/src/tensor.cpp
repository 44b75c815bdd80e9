// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/tensor.hpp"

#include <cmath>
#include <utility>

namespace phyfea {

std::string format_dims(const Dims& dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + ")";
}

std::size_t dims_product(const Dims& dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

void require_rank(const Dims& dims, std::size_t rank, const char* what) {
  if (dims.size() != rank) {
    throw DimensionError(std::string(what) + ": expected rank " + std::to_string(rank) +
                         ", got " + format_dims(dims));
  }
  for (auto d : dims) {
    if (d == 0) throw DimensionError(std::string(what) + ": zero extent in " + format_dims(dims));
  }
}

void require_same_dims(const Dims& a, const Dims& b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dims mismatch " + format_dims(a) + " vs " +
                         format_dims(b));
  }
}

template <class T>
Tensor<T>::Tensor(Dims dims, T fill) : dims_(std::move(dims)), data_(dims_product(dims_), fill) {
  if (dims_.size() > 3) throw DimensionError("tensor rank above 3: " + format_dims(dims_));
}

template <class T>
Tensor<T>::Tensor(Dims dims, std::vector<T> data) : dims_(std::move(dims)), data_(std::move(data)) {
  if (dims_.size() > 3) throw DimensionError("tensor rank above 3: " + format_dims(dims_));
  if (data_.size() != dims_product(dims_)) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match dims " + format_dims(dims_));
  }
}

template <class T>
T Tensor<T>::item() const {
  if (data_.size() != 1) throw DimensionError("item() on tensor of dims " + format_dims(dims_));
  return data_[0];
}

template <class T>
Tensor<T> Tensor<T>::channel(std::size_t ch) const {
  if (rank() != 3 || ch >= dims_[0]) {
    throw DimensionError("channel " + std::to_string(ch) + " of " + format_dims(dims_));
  }
  const std::size_t plane = dims_[1] * dims_[2];
  auto first = data_.begin() + static_cast<std::ptrdiff_t>(ch * plane);
  return Tensor(Dims{dims_[1], dims_[2]}, std::vector<T>(first, first + static_cast<std::ptrdiff_t>(plane)));
}

template <class T>
void Tensor<T>::set_channel(std::size_t ch, const Tensor& plane) {
  if (rank() != 3 || ch >= dims_[0] || plane.dims() != Dims{dims_[1], dims_[2]}) {
    throw DimensionError("set_channel " + std::to_string(ch) + " of " + format_dims(dims_) +
                         " from " + format_dims(plane.dims()));
  }
  std::copy(plane.data_.begin(), plane.data_.end(),
            data_.begin() + static_cast<std::ptrdiff_t>(ch * plane.size()));
}

template <class T>
bool Tensor<T>::all_finite() const {
  for (auto v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace phyfea
