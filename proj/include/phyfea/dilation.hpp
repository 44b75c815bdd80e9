// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "phyfea/opening.hpp"

namespace phyfea {

/// One rectified growth step: D = grown - current, m = mean of D over cells
/// where D > 0, result = rectifier(D - m) + current.
template <class T>
Var<T> rectify(const Var<T>& current, const Var<T>& grown);

/// Selective dilation of one pair channel b (H,W), b >= 0.
///
/// Starting from b, each step averages over the cross-shaped window (center and
/// its four edge neighbors, divisor 5, out-of-bounds cells read as 0) and keeps
/// only the rectified offset. The readout R normalizes the final marker padded
/// with a frame of ones; the bridge is R on cells where b <= bg_tol.
template <class T>
ChannelOutcome<T> dilate_channel(const Var<T>& b, std::size_t iters, T epsilon, T bg_tol,
                                 bool early_exit = true);

template <class T>
using DilationResult = StageResult<T>;

template <class T>
DilationResult<T> dilate_stack(const PairStack<T>& stack, std::size_t iters, T epsilon, T bg_tol,
                               const StageOptions& options = {});

}  // namespace phyfea
