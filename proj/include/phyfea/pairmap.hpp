// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "phyfea/catalog.hpp"
#include "phyfea/tape.hpp"

namespace phyfea {

template <class T>
struct NormalizedScores {
  Tensor<T> probs;  // (C,H,W), per-pixel softmax
};

/// Per-ordered-pair foreground maps, one channel per entry of pair_index.
template <class T>
struct PairStack {
  Tensor<T> maps;  // (P,H,W)
  std::vector<ClassPair> pair_index;
  std::size_t num_classes = 0;

  std::size_t size() const { return pair_index.size(); }
};

enum class PairMode { all, infeasible_only };

// Per-pixel exclusion mask (1 = ignore) in row-major order; empty means none.
using IgnoreMask = std::vector<std::uint8_t>;

template <class T>
Var<T> normalize_scores(const Var<T>& scores);

template <class T>
NormalizedScores<T> normalize_scores(const Tensor<T>& scores);

/// Full-class argmax per pixel with the lowest index winning ties; -1 on
/// ignored pixels.
template <class T>
std::vector<std::int32_t> argmax_classes(const Tensor<T>& probs, const IgnoreMask& ignore = {});

/// One pair channel from the per-pixel winning probability (H,W).
/// Support is the set of pixels whose argmax is pair.inner or pair.outer; the
/// channel is rectifier(S - mean_support(S)) on the support and 0 elsewhere.
template <class T>
Var<T> pair_channel(const Var<T>& peak, const std::vector<std::int32_t>& argmax, ClassPair pair);

template <class T>
PairStack<T> build_pair_stack(const NormalizedScores<T>& scores, const IgnoreMask& ignore = {});

template <class T>
PairStack<T> prune_pairs(const PairStack<T>& stack, const ConstraintCatalog& catalog, PairMode mode);

// Pairs selected for a class count under `mode`; catalog may be null for PairMode::all.
std::vector<ClassPair> select_pairs(std::size_t num_classes, const ConstraintCatalog* catalog,
                                    PairMode mode);

}  // namespace phyfea
