// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "phyfea/pairmap.hpp"
#include "phyfea/tape.hpp"

namespace phyfea {

// max(2, floor(max(H,W)/2)) unless overridden; an override of 0 is rejected.
std::size_t iteration_budget(std::size_t height, std::size_t width,
                             std::optional<std::size_t> override_iters = std::nullopt);

template <class T>
struct ChannelOutcome {
  Var<T> map;
  // Iterations executed, counting the one that detected the fixpoint.
  std::size_t converged_at = 0;
};

/// Border-seeded reconstruction of one pair channel b (H,W), b >= 0.
///
/// The marker grows from a frame of ones by 3x3 max-pooling and is clipped to
/// the padded support [b~ > 0] after every step, with the ring reset to 1. The
/// readout R = guarded_max_normalize(marker) is 1 on every cell 8-connected to
/// the border through the support and 0 elsewhere, and the anomaly is the
/// interior of b~ - b~ * R. R is piecewise constant in b, so the gradient of the
/// anomaly is (1 - R) on the input.
template <class T>
ChannelOutcome<T> open_channel(const Var<T>& b, std::size_t iters, T epsilon,
                               bool early_exit = true);

struct StageOptions {
  bool with_grad = false;
  std::size_t workers = 1;
  bool early_exit = true;
};

template <class T>
struct StageResult {
  Tensor<T> maps;  // (P,H,W): anomaly for opening, bridge for dilation
  double loss = 0.0;
  std::vector<std::pair<ClassPair, double>> per_pair_mass;
  std::vector<std::size_t> iterations_used;
  // d loss / d stack.maps, filled when StageOptions::with_grad.
  std::optional<Tensor<T>> grad;
};

template <class T>
using OpeningResult = StageResult<T>;

template <class T>
OpeningResult<T> open_stack(const PairStack<T>& stack, std::size_t iters, T epsilon,
                            const StageOptions& options = {});

}  // namespace phyfea
