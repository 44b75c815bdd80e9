// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/opening.hpp"

#include <algorithm>
#include <string>

#include "phyfea/branch.hpp"
#include "phyfea/ops.hpp"
#include "phyfea/parallel.hpp"

namespace phyfea {

std::size_t iteration_budget(std::size_t height, std::size_t width,
                             std::optional<std::size_t> override_iters) {
  if (height == 0 || width == 0) throw DimensionError("iteration_budget: zero-sized plane");
  if (override_iters) {
    if (*override_iters == 0) throw ConfigError("iteration override must be at least 1");
    return *override_iters;
  }
  return std::max<std::size_t>(2, std::max(height, width) / 2);
}

namespace {

// Marker iteration on the padded grid. Works on raw buffers: the marker only
// depends on the support pattern, so nothing here belongs on a tape.
template <class T>
std::size_t reconstruct(const Tensor<T>& b, std::size_t iters, bool early_exit,
                        std::vector<T>& marker) {
  const std::size_t rows = b.rows() + 2, cols = b.cols() + 2;
  std::vector<unsigned char> support(rows * cols, 1);
  for (std::size_t r = 0; r < b.rows(); ++r) {
    for (std::size_t c = 0; c < b.cols(); ++c) {
      support[(r + 1) * cols + c + 1] = b.at(r, c) > T(0) ? 1 : 0;
    }
  }
  marker.assign(rows * cols, T(0));
  for (std::size_t c = 0; c < cols; ++c) marker[c] = marker[(rows - 1) * cols + c] = T(1);
  for (std::size_t r = 0; r < rows; ++r) marker[r * cols] = marker[r * cols + cols - 1] = T(1);

  std::vector<T> grown(rows * cols);
  std::size_t t = 0;
  while (t < iters) {
    ++t;
    kernel::box_max(marker.data(), grown.data(), rows, cols);
    bool changed = false;
    for (std::size_t r = 1; r + 1 < rows; ++r) {
      for (std::size_t c = 1; c + 1 < cols; ++c) {
        const std::size_t i = r * cols + c;
        const T v = support[i] ? grown[i] : T(0);
        changed |= v != marker[i];
        marker[i] = v;
      }
    }
    if (early_exit && !changed) break;
  }
  return t;
}

}  // namespace

template <class T>
ChannelOutcome<T> open_channel(const Var<T>& b, std::size_t iters, T epsilon, bool early_exit) {
  require_rank(b.dims(), 2, "open_channel");
  if (iters == 0) throw ConfigError("open_channel: iteration count must be at least 1");
  if (!(epsilon > T(0))) throw ConfigError("open_channel: epsilon must be > 0");
  const auto& bv = b.value();
  for (std::size_t i = 0; i < bv.size(); ++i) {
    if (!(bv[i] >= T(0))) {
      throw ContractError("open_channel: negative or non-finite entry at index " + std::to_string(i));
    }
  }

  std::vector<T> marker;
  const std::size_t used = reconstruct(bv, iters, early_exit, marker);
  note_branch_mask(bv.data(), [](T v) { return v > T(0); });
  note_branch(used);

  const std::size_t rows = bv.rows(), cols = bv.cols();
  const Var<T> reach = guarded_max_normalize(
      constant(Tensor<T>(Dims{rows + 2, cols + 2}, std::move(marker))), epsilon);
  const auto& R = reach.value();
  Tensor<T> keep(bv.dims());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) keep.at(r, c) = T(1) - R.at(r + 1, c + 1);
  }
  // b~ - b~ * R restricted to the interior equals b * (1 - R); the ring cancels.
  return {mul(b, constant(std::move(keep))), used};
}

template <class T>
OpeningResult<T> open_stack(const PairStack<T>& stack, std::size_t iters, T epsilon,
                            const StageOptions& options) {
  require_rank(stack.maps.dims(), 3, "open_stack");
  const std::size_t channels = stack.size();
  if (stack.maps.dim(0) != channels) {
    throw DimensionError("open_stack: pair index length does not match the channel count");
  }
  OpeningResult<T> result;
  result.maps = Tensor<T>(stack.maps.dims());
  result.iterations_used.assign(channels, 0);
  std::vector<double> mass(channels, 0.0);
  if (options.with_grad) result.grad = Tensor<T>(stack.maps.dims());

  parallel_for(channels, options.workers, [&](std::size_t k) {
    Tape<T> tape;
    const Tensor<T> plane = stack.maps.channel(k);
    const Var<T> b = options.with_grad ? tape.leaf(plane) : constant(plane);
    auto out = open_channel(b, iters, epsilon, options.early_exit);
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

template ChannelOutcome<float> open_channel(const Var<float>&, std::size_t, float, bool);
template ChannelOutcome<double> open_channel(const Var<double>&, std::size_t, double, bool);
template OpeningResult<float> open_stack(const PairStack<float>&, std::size_t, float,
                                         const StageOptions&);
template OpeningResult<double> open_stack(const PairStack<double>&, std::size_t, double,
                                          const StageOptions&);

}  // namespace phyfea
