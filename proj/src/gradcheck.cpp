// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "phyfea/branch.hpp"
#include "phyfea/rng.hpp"

namespace phyfea {
namespace {

template <class T>
struct Eval {
  double value;
  std::uint64_t signature;
};

template <class T>
Eval<T> evaluate(const ScalarFn<T>& f, const Tensor<T>& x) {
  BranchScope scope;
  const Var<T> out = f(constant(x));
  if (out.value().size() != 1) {
    throw ContractError("vjp_check: function output must be scalar, got dims " +
                        format_dims(out.dims()));
  }
  return {static_cast<double>(out.value()[0]), scope.signature()};
}

template <class T, class R>
GradCheckReport run_check(const ScalarFn<T>& f, const Tensor<T>& x, const GradCheckOptions& opts,
                          const ScalarFn<R>& numeric_fn) {
  if (opts.probes == 0) throw ConfigError("vjp_check: probes must be >= 1");
  if (x.empty()) throw DimensionError("vjp_check: empty input");

  Tensor<T> analytic;
  {
    Tape<T> tape;
    const Var<T> leaf = tape.leaf(x);
    const Var<T> out = f(leaf);
    if (out.value().size() != 1) {
      throw ContractError("vjp_check: function output must be scalar, got dims " +
                          format_dims(out.dims()));
    }
    // A result that never touched the leaf is a constant: gradient zero.
    analytic = out.tracked() ? tape.backward(out).wrt(leaf) : Tensor<T>(x.dims());
  }
  double scale = 0.0;
  for (auto g : analytic.data()) scale = std::max(scale, std::abs(static_cast<double>(g)));
  const double floor = std::max(opts.floor * scale, 1e-300);

  GradCheckReport report;
  report.tolerance = opts.tolerance;
  Rng rng(opts.seed);
  const std::size_t budget = opts.probes * opts.attempts_per_probe;
  const auto h = static_cast<R>(opts.step);
  const Tensor<R> base = tensor_cast<R>(x);

  for (std::size_t attempt = 0; attempt < budget && report.probes_used < opts.probes; ++attempt) {
    const auto i = static_cast<std::size_t>(rng.below(x.size()));
    Tensor<R> probe = base;
    const Eval<R> mid = evaluate(numeric_fn, probe);
    probe[i] = base[i] + h;
    const double step_up = static_cast<double>(probe[i]) - static_cast<double>(base[i]);
    const Eval<R> up = evaluate(numeric_fn, probe);
    probe[i] = base[i] - h;
    const double step_down = static_cast<double>(base[i]) - static_cast<double>(probe[i]);
    const Eval<R> down = evaluate(numeric_fn, probe);
    if (up.signature != mid.signature || down.signature != mid.signature) {
      ++report.probes_skipped;
      continue;
    }
    // Use the representable step actually taken, which matters in single precision.
    const double numeric = (up.value - down.value) / (step_up + step_down);
    const double a = static_cast<double>(analytic[i]);
    const double denom = std::max({std::abs(a), std::abs(numeric), floor});
    const double err = (a == numeric) ? 0.0 : std::abs(a - numeric) / denom;
    report.probes.push_back({i, a, numeric, err});
    report.max_rel_error = std::max(report.max_rel_error, err);
    ++report.probes_used;
  }
  report.passed = report.probes_used > 0 && report.max_rel_error < opts.tolerance;
  return report;
}

}  // namespace

template <class T>
GradCheckReport vjp_check(const ScalarFn<T>& f, const Tensor<T>& x, const GradCheckOptions& opts) {
  return run_check<T, T>(f, x, opts, f);
}

template <class T>
GradCheckReport vjp_check(const ScalarFn<T>& f, const Tensor<T>& x, const GradCheckOptions& opts,
                          const ScalarFn<double>& reference) {
  return run_check<T, double>(f, x, opts, reference);
}

template GradCheckReport vjp_check(const ScalarFn<float>&, const Tensor<float>&,
                                   const GradCheckOptions&);
template GradCheckReport vjp_check(const ScalarFn<double>&, const Tensor<double>&,
                                   const GradCheckOptions&);
template GradCheckReport vjp_check(const ScalarFn<float>&, const Tensor<float>&,
                                   const GradCheckOptions&, const ScalarFn<double>&);
template GradCheckReport vjp_check(const ScalarFn<double>&, const Tensor<double>&,
                                   const GradCheckOptions&, const ScalarFn<double>&);

}  // namespace phyfea
