// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "phyfea/tape.hpp"

namespace phyfea {

enum class PoolKind { max, avg };

// box: the 3x3 neighborhood including the center.
// cross: the center plus its four edge neighbors.
enum class Window { box, cross };

// Constant border ring of width one around a rank-2 tensor.
template <class T>
Var<T> pad_frame(const Var<T>& x, T value);

// Drops the one-cell border ring; inverse of pad_frame on the interior.
template <class T>
Var<T> crop_interior(const Var<T>& x);

// Overwrites the one-cell border ring with `value`. The ring receives no gradient.
template <class T>
Var<T> reframe(const Var<T>& x, T value);

/// Same-size stride-1 pooling over `window`. Out-of-bounds cells read as 0 and the
/// average divides by the full window size (9 or 5) regardless of clipping.
/// Max ties go to the first window cell in row-major order; a virtual
/// out-of-bounds winner routes no gradient.
template <class T>
Var<T> pool3(const Var<T>& x, PoolKind kind, Window window = Window::box);

template <class T>
Var<T> rectifier(const Var<T>& x);

// Rank-0 mean of x over cells where mask == 1; 0 on an empty mask.
template <class T>
Var<T> masked_mean(const Var<T>& x, const Tensor<T>& mask);

template <class T>
Var<T> mul(const Var<T>& a, const Var<T>& b);
template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b);
template <class T>
Var<T> sub(const Var<T>& a, const Var<T>& b);

// x - s with s rank 0.
template <class T>
Var<T> sub_scalar(const Var<T>& x, const Var<T>& s);

template <class T>
Var<T> scale(const Var<T>& x, T factor);

/// x / max(max(x), epsilon) for nonnegative x. The denominator is a constant
/// for differentiation.
template <class T>
Var<T> guarded_max_normalize(const Var<T>& x, T epsilon);

template <class T>
Var<T> l1(const Var<T>& x);

template <class T>
Var<T> sum(const Var<T>& x);

template <class T>
Var<T> abs(const Var<T>& x);

// Softmax across axis 0 of a (C,H,W) tensor.
template <class T>
Var<T> softmax_channels(const Var<T>& x);

// out(r,c) = x(index(r,c), r, c); a negative index yields 0.
template <class T>
Var<T> select_channels(const Var<T>& x, const std::vector<std::int32_t>& index);

// Kernel-level helpers without tape involvement, shared with the fast paths.
namespace kernel {

template <class T>
void box_avg(const T* in, T* out, std::size_t rows, std::size_t cols);

template <class T>
void cross_avg(const T* in, T* out, std::size_t rows, std::size_t cols);

template <class T>
void box_max(const T* in, T* out, std::size_t rows, std::size_t cols);

}  // namespace kernel

}  // namespace phyfea
