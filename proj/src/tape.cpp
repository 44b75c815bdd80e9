// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/tape.hpp"

#include <stdexcept>

namespace phyfea {

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::pad_frame: return "pad_frame";
    case OpKind::crop_interior: return "crop_interior";
    case OpKind::reframe: return "reframe";
    case OpKind::pool_max: return "pool_max";
    case OpKind::pool_avg: return "pool_avg";
    case OpKind::rectifier: return "rectifier";
    case OpKind::masked_mean: return "masked_mean";
    case OpKind::mul: return "mul";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::sub_scalar: return "sub_scalar";
    case OpKind::scale: return "scale";
    case OpKind::guarded_max_normalize: return "guarded_max_normalize";
    case OpKind::l1: return "l1";
    case OpKind::sum: return "sum";
    case OpKind::abs: return "abs";
    case OpKind::softmax_channels: return "softmax_channels";
    case OpKind::select_channels: return "select_channels";
  }
  return "unknown";
}

template <class T>
Tensor<T> Gradients<T>::wrt(const Var<T>& v) const {
  if (!v.tracked()) return Tensor<T>(v.dims());
  const auto slot = static_cast<std::size_t>(v.slot());
  if (slot >= grads_.size() || grads_[slot].empty()) return Tensor<T>(dims_.at(slot));
  return grads_[slot];
}

template <class T>
int Tape<T>::new_slot(const Dims& dims, bool is_leaf) {
  slot_dims_.push_back(dims);
  slot_is_leaf_.push_back(is_leaf);
  return static_cast<int>(slot_dims_.size() - 1);
}

template <class T>
Var<T> Tape<T>::leaf(Tensor<T> value) {
  return leaf(std::make_shared<const Tensor<T>>(std::move(value)));
}

template <class T>
Var<T> Tape<T>::leaf(std::shared_ptr<const Tensor<T>> value) {
  const int slot = new_slot(value->dims(), true);
  return Var<T>(std::move(value), this, slot);
}

template <class T>
Tape<T>* common_tape(std::initializer_list<const Var<T>*> inputs) {
  Tape<T>* tape = nullptr;
  for (const Var<T>* v : inputs) {
    if (!v->tracked()) continue;
    if (tape && tape != v->tape()) throw std::logic_error("op inputs live on different tapes");
    tape = v->tape();
  }
  return tape;
}

template <class T>
Var<T> Tape<T>::record(OpKind kind, std::initializer_list<const Var<T>*> inputs, Tensor<T> out,
                       Vjp vjp) {
  auto value = std::make_shared<const Tensor<T>>(std::move(out));
  Node node{kind, {}, -1, std::move(vjp)};
  node.inputs.reserve(inputs.size());
  for (const Var<T>* v : inputs) node.inputs.push_back(v->tracked() ? v->slot() : -1);
  node.output = new_slot(value->dims(), false);
  const int slot = node.output;
  nodes_.push_back(std::move(node));
  return Var<T>(std::move(value), this, slot);
}

template <class T>
Gradients<T> Tape<T>::backward(const Var<T>& output) const {
  if (output.value().size() != 1) {
    throw ContractError("backward without seed needs a scalar output, got dims " +
                        format_dims(output.dims()));
  }
  return backward(output, Tensor<T>(output.dims(), T(1)));
}

template <class T>
Gradients<T> Tape<T>::backward(const Var<T>& output, const Tensor<T>& seed) const {
  if (output.tape() != this) throw std::logic_error("backward on a var from another tape");
  require_same_dims(output.dims(), seed.dims(), "backward seed");

  std::vector<Tensor<T>> grads(slot_dims_.size());
  grads[static_cast<std::size_t>(output.slot())] = seed;
  last_sweep_.clear();

  std::vector<Tensor<T>*> in_ptrs;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    auto& g_out = grads[static_cast<std::size_t>(it->output)];
    if (g_out.empty()) continue;
    last_sweep_.push_back(it->kind);
    in_ptrs.assign(it->inputs.size(), nullptr);
    for (std::size_t k = 0; k < it->inputs.size(); ++k) {
      const int s = it->inputs[k];
      if (s < 0) continue;
      auto& g = grads[static_cast<std::size_t>(s)];
      if (g.empty()) g = Tensor<T>(slot_dims_[static_cast<std::size_t>(s)]);
      in_ptrs[k] = &g;
    }
    it->vjp(g_out, in_ptrs);
    // Each slot is written by exactly one node, so its gradient is final here.
    if (!slot_is_leaf_[static_cast<std::size_t>(it->output)]) g_out = Tensor<T>();
  }
  return Gradients<T>(std::move(grads), slot_dims_);
}

template class Gradients<float>;
template class Gradients<double>;
template class Tape<float>;
template class Tape<double>;
template Tape<float>* common_tape(std::initializer_list<const Var<float>*>);
template Tape<double>* common_tape(std::initializer_list<const Var<double>*>);

}  // namespace phyfea
