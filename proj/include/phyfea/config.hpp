// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "phyfea/pairmap.hpp"

namespace phyfea {

enum class Precision { single, double_ };

std::string_view precision_name(Precision p);
Precision parse_precision(std::string_view s);

std::string_view pair_mode_name(PairMode m);
PairMode parse_pair_mode(std::string_view s);

struct EngineConfig {
  double alpha = 1e-5;
  double epsilon = 1e-8;
  std::optional<std::size_t> iterations;  // overrides iteration_budget
  bool use_opening = true;
  bool use_dilation = true;
  PairMode pair_mode = PairMode::all;
  int connectivity = 8;
  Precision precision = Precision::double_;
  double bg_tol = 1e-6;
  std::uint64_t infeasibility_threshold = 3;
  std::optional<std::size_t> workers;  // unset: PHYFEA_THREADS or hardware
  bool with_grad = false;
  bool early_exit = true;
  int ignore_value = 255;

  // Throws ConfigError. Penalty runs need at least one loss enabled; analysis
  // runs pass require_losses = false.
  void validate(bool require_losses = true) const;
};

// "opening", "dilation", "opening,dilation", "both" or "none".
void set_losses(EngineConfig& cfg, std::string_view spec);
std::string losses_name(const EngineConfig& cfg);

}  // namespace phyfea
