// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "phyfea/tensor.hpp"

namespace phyfea {

enum class OpKind {
  pad_frame,
  crop_interior,
  reframe,
  pool_max,
  pool_avg,
  rectifier,
  masked_mean,
  mul,
  add,
  sub,
  sub_scalar,
  scale,
  guarded_max_normalize,
  l1,
  sum,
  abs,
  softmax_channels,
  select_channels,
};

std::string_view op_name(OpKind kind);

template <class T>
class Tape;

/// Handle to an immutable value, optionally tracked on a Tape.
/// Untracked handles are constants: ops that only see constants record nothing.
template <class T>
class Var {
 public:
  Var() = default;

  const Tensor<T>& value() const { return *value_; }
  const std::shared_ptr<const Tensor<T>>& shared_value() const { return value_; }
  const Dims& dims() const { return value_->dims(); }

  bool tracked() const { return tape_ != nullptr; }
  Tape<T>* tape() const { return tape_; }
  int slot() const { return slot_; }

 private:
  friend class Tape<T>;
  template <class U>
  friend Var<U> constant(Tensor<U> value);

  Var(std::shared_ptr<const Tensor<T>> value, Tape<T>* tape, int slot)
      : value_(std::move(value)), tape_(tape), slot_(slot) {}

  std::shared_ptr<const Tensor<T>> value_;
  Tape<T>* tape_ = nullptr;
  int slot_ = -1;
};

template <class T>
Var<T> constant(Tensor<T> value) {
  return Var<T>(std::make_shared<const Tensor<T>>(std::move(value)), nullptr, -1);
}

/// Gradients produced by one backward sweep, indexed by tape slot.
template <class T>
class Gradients {
 public:
  Gradients() = default;
  Gradients(std::vector<Tensor<T>> grads, std::vector<Dims> dims)
      : grads_(std::move(grads)), dims_(std::move(dims)) {}

  // Gradient w.r.t. a tracked leaf; zeros when nothing flowed into it.
  Tensor<T> wrt(const Var<T>& v) const;

 private:
  std::vector<Tensor<T>> grads_;
  std::vector<Dims> dims_;
};

/// Ordered record of executed kernel ops for reverse-mode differentiation.
/// Confined to one thread at a time. Vars point back at their tape, so a tape
/// is neither copyable nor movable.
template <class T>
class Tape {
 public:
  // grad_in[k] is null when input k is a constant.
  using Vjp = std::function<void(const Tensor<T>& grad_out, std::span<Tensor<T>* const> grad_in)>;

  struct Node {
    OpKind kind;
    std::vector<int> inputs;
    int output;
    Vjp vjp;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> leaf(Tensor<T> value);
  Var<T> leaf(std::shared_ptr<const Tensor<T>> value);

  // Appends a node; untracked inputs are recorded as constants (slot -1).
  Var<T> record(OpKind kind, std::initializer_list<const Var<T>*> inputs, Tensor<T> out, Vjp vjp);

  // Reverse sweep from a scalar output, seeded with 1.
  Gradients<T> backward(const Var<T>& output) const;
  Gradients<T> backward(const Var<T>& output, const Tensor<T>& seed) const;

  std::span<const Node> nodes() const { return nodes_; }
  std::size_t num_slots() const { return slot_dims_.size(); }

  // Kinds visited by the last backward sweep, in visiting order.
  const std::vector<OpKind>& last_sweep() const { return last_sweep_; }

 private:
  int new_slot(const Dims& dims, bool is_leaf);

  std::vector<Node> nodes_;
  std::vector<Dims> slot_dims_;
  std::vector<bool> slot_is_leaf_;
  mutable std::vector<OpKind> last_sweep_;
};

// Resolves the tape shared by the tracked inputs of an op; null when none is tracked.
template <class T>
Tape<T>* common_tape(std::initializer_list<const Var<T>*> inputs);

extern template class Gradients<float>;
extern template class Gradients<double>;
extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace phyfea
