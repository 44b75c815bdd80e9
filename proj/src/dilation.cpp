// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "phyfea/branch.hpp"
#include "phyfea/ops.hpp"
#include "phyfea/parallel.hpp"

namespace phyfea {

template <class T>
Var<T> rectify(const Var<T>& current, const Var<T>& grown) {
  require_same_dims(current.dims(), grown.dims(), "rectify");
  const Var<T> offset = sub(grown, current);
  const auto& d = offset.value();
  // Offsets within a few ulps of zero are summation residue, not growth.
  T scale = T(0);
  for (const T v : d.data()) scale = std::max(scale, std::abs(v));
  const T tol = T(64) * std::numeric_limits<T>::epsilon() * scale;
  Tensor<T> positive(d.dims());
  for (std::size_t i = 0; i < d.size(); ++i) positive[i] = d[i] > tol ? T(1) : T(0);
  const Var<T> mean = masked_mean(offset, positive);
  const Var<T> centered = sub_scalar(offset, mean);
  const auto& cv = centered.value();
  Tensor<T> keep(cv.dims());
  for (std::size_t i = 0; i < cv.size(); ++i) keep[i] = cv[i] > tol ? T(1) : T(0);
  note_branch_mask(std::as_const(keep).data(), [](T v) { return v > T(0); });
  return add(mul(rectifier(centered), constant(std::move(keep))), current);
}

template <class T>
ChannelOutcome<T> dilate_channel(const Var<T>& b, std::size_t iters, T epsilon, T bg_tol,
                                 bool early_exit) {
  require_rank(b.dims(), 2, "dilate_channel");
  if (iters == 0) throw ConfigError("dilate_channel: iteration count must be at least 1");
  if (!(epsilon > T(0))) throw ConfigError("dilate_channel: epsilon must be > 0");
  if (!(bg_tol >= T(0))) throw ConfigError("dilate_channel: bg_tol must be >= 0");
  const auto& bv = b.value();
  for (std::size_t i = 0; i < bv.size(); ++i) {
    if (!(bv[i] >= T(0))) {
      throw ContractError("dilate_channel: negative or non-finite entry at index " +
                          std::to_string(i));
    }
  }

  // Growth runs on the interior with zero outside; the frame only enters the readout.
  Var<T> marker = b;
  std::size_t t = 0;
  while (t < iters) {
    ++t;
    Var<T> next = rectify(marker, pool3(marker, PoolKind::avg, Window::cross));
    const bool fixed = next.value() == marker.value();
    marker = std::move(next);
    if (early_exit && fixed) break;
  }
  note_branch(t);

  const Var<T> reach = crop_interior(guarded_max_normalize(pad_frame(marker, T(1)), epsilon));
  Tensor<T> background(bv.dims());
  for (std::size_t i = 0; i < bv.size(); ++i) background[i] = bv[i] <= bg_tol ? T(1) : T(0);
  note_branch_mask(std::as_const(background).data(), [](T v) { return v > T(0); });
  return {mul(reach, constant(std::move(background))), t};
}

template <class T>
DilationResult<T> dilate_stack(const PairStack<T>& stack, std::size_t iters, T epsilon, T bg_tol,
                               const StageOptions& options) {
  require_rank(stack.maps.dims(), 3, "dilate_stack");
  const std::size_t channels = stack.size();
  if (stack.maps.dim(0) != channels) {
    throw DimensionError("dilate_stack: pair index length does not match the channel count");
  }
  DilationResult<T> result;
  result.maps = Tensor<T>(stack.maps.dims());
  result.iterations_used.assign(channels, 0);
  std::vector<double> mass(channels, 0.0);
  if (options.with_grad) result.grad = Tensor<T>(stack.maps.dims());

  parallel_for(channels, options.workers, [&](std::size_t k) {
    Tape<T> tape;
    const Tensor<T> plane = stack.maps.channel(k);
    const Var<T> b = options.with_grad ? tape.leaf(plane) : constant(plane);
    auto out = dilate_channel(b, iters, epsilon, bg_tol, options.early_exit);
    const Var<T> total = l1(out.map);
    result.maps.set_channel(k, out.map.value());
    result.iterations_used[k] = out.converged_at;
    mass[k] = static_cast<double>(total.value().item());
    if (options.with_grad) result.grad->set_channel(k, tape.backward(total).wrt(b));
  });

  for (std::size_t k = 0; k < channels; ++k) {
    result.loss += mass[k];
    result.per_pair_mass.emplace_back(stack.pair_index[k], mass[k]);
  }
  return result;
}

#define PHYFEA_INSTANTIATE_DILATION(T)                                                     \
  template Var<T> rectify(const Var<T>&, const Var<T>&);                                   \
  template ChannelOutcome<T> dilate_channel(const Var<T>&, std::size_t, T, T, bool);       \
  template DilationResult<T> dilate_stack(const PairStack<T>&, std::size_t, T, T,          \
                                          const StageOptions&);

PHYFEA_INSTANTIATE_DILATION(float)
PHYFEA_INSTANTIATE_DILATION(double)

#undef PHYFEA_INSTANTIATE_DILATION

}  // namespace phyfea
