// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "phyfea/tape.hpp"

namespace phyfea {

struct GradCheckOptions {
  std::size_t probes = 16;
  double tolerance = 1e-6;
  // Central-difference step; absolute, applied to one coordinate at a time.
  double step = 1e-6;
  // Errors are relative to max(|analytic|, |numeric|, floor * max|analytic gradient|).
  double floor = 1e-3;
  std::uint64_t seed = 0;
  // Candidates drawn per requested probe before giving up on kink-free ones.
  std::size_t attempts_per_probe = 20;
};

struct ProbeResult {
  std::size_t index;
  double analytic;
  double numeric;
  double rel_error;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t probes_used = 0;
  // Candidates rejected because x-h, x and x+h took different branches.
  std::size_t probes_skipped = 0;
  double tolerance = 0.0;
  bool passed = false;
  std::vector<ProbeResult> probes;
};

template <class T>
using ScalarFn = std::function<Var<T>(const Var<T>&)>;

/// Compares the tape gradient of scalar-valued f at x against central finite
/// differences at randomly drawn coordinates. Probes whose +-step neighborhood
/// crosses a kink are redrawn. The run passes when at least one probe was
/// usable and every usable probe is within tolerance.
template <class T>
GradCheckReport vjp_check(const ScalarFn<T>& f, const Tensor<T>& x, const GradCheckOptions& opts);

/// As above, but the finite differences come from `reference`, a double
/// precision evaluation of the same function at the same (representable) point.
/// Single-precision sums cancel too much for a float-only difference quotient
/// to resolve 1e-3 on small gradients, so this is the oracle for float tapes.
template <class T>
GradCheckReport vjp_check(const ScalarFn<T>& f, const Tensor<T>& x, const GradCheckOptions& opts,
                          const ScalarFn<double>& reference);

}  // namespace phyfea
