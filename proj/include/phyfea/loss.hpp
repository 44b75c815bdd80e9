// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "phyfea/config.hpp"
#include "phyfea/pairmap.hpp"
#include "phyfea/tape.hpp"

namespace phyfea {

// Wall-clock milliseconds per stage. The per-channel stages run in parallel, so
// opening_cpu_ms and dilation_cpu_ms are summed over workers.
struct StageTimings {
  double normalize_ms = 0.0;
  double channels_ms = 0.0;
  double opening_cpu_ms = 0.0;
  double dilation_cpu_ms = 0.0;
  double backward_ms = 0.0;
  double total_ms = 0.0;
};

template <class T>
struct PenaltyReport {
  double l_opening = 0.0;
  double l_dilation = 0.0;
  double alpha = 0.0;
  double penalty = 0.0;
  std::optional<double> total;
  std::optional<Tensor<T>> grad;  // d penalty / d scores, (C,H,W)
  // One entry per selected ordered pair; empty for a disabled loss.
  std::vector<std::pair<ClassPair, double>> opening_mass;
  std::vector<std::pair<ClassPair, double>> dilation_mass;
  std::size_t iterations = 0;  // budget T
  std::size_t channels = 0;
  StageTimings timing;
};

// alpha * |l_opening - l_dilation|
double penalty_value(double alpha, double l_opening, double l_dilation);

// cross_entropy + penalty; a negative cross entropy is a ContractError.
double combine_total(double penalty, double cross_entropy);

/// Full pipeline on raw scores (C,H,W). Channels (i,j) and (j,i) share a
/// support and hence a map, so each unordered pair is evaluated once and
/// counted once per selected orientation. Per-channel work runs on
/// cfg.workers threads and is folded in pair order.
template <class T>
PenaltyReport<T> compute_penalty(const Tensor<T>& scores, const EngineConfig& cfg,
                                 const ConstraintCatalog* catalog = nullptr,
                                 const IgnoreMask& ignore = {});

/// The same penalty as one graph on the tape of `scores`, evaluating every
/// ordered pair separately. Slow; used for gradient checks and as a second
/// route to the values of compute_penalty.
template <class T>
Var<T> penalty_graph(const Var<T>& scores, const EngineConfig& cfg,
                     const ConstraintCatalog* catalog = nullptr, const IgnoreMask& ignore = {});

}  // namespace phyfea
